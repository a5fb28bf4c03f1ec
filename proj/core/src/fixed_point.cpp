#include "pbitemu/fixed_point.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>

#include "pbitemu/errors.hpp"

namespace pbitemu {
namespace {

__extension__ typedef __int128 i128;
__extension__ typedef unsigned __int128 u128;

std::int64_t clamp_raw(i128 raw, const FixedFormat& format) {
  if (raw < format.raw_min()) return format.raw_min();
  if (raw > format.raw_max()) return format.raw_max();
  return static_cast<std::int64_t>(raw);
}

// Floor division by 2^shift for 128-bit intermediates.
i128 floor_shift(i128 value, int shift) {
  if (shift <= 0) return value;
  return value >> shift;  // arithmetic shift floors
}

void require_same_frac(const FixedPoint& a, const FixedPoint& b, const char* op) {
  if (a.format().frac_bits != b.format().frac_bits) {
    throw ValidationError(std::string(op) + ": fractional widths differ (" +
                          a.format().to_string() + " vs " + b.format().to_string() + ")");
  }
}

}  // namespace

double FixedFormat::resolution() const { return std::ldexp(1.0, -frac_bits); }

void FixedFormat::validate() const {
  if (int_bits < 0 || frac_bits < 0) {
    throw ValidationError("fixed-point widths must be non-negative: " + to_string());
  }
  if (total_bits() > kMaxTotalBits || int_bits + frac_bits > kMaxTotalBits - 1) {
    throw ValidationError("fixed-point format wider than 63 bits: " + to_string());
  }
}

std::string FixedFormat::to_string() const {
  return std::string(is_signed ? "s" : "u") + "[" + std::to_string(int_bits) + "][" +
         std::to_string(frac_bits) + "]";
}

FixedFormat FixedFormat::parse(std::string_view text) {
  auto fail = [&] { return ValidationError("bad fixed-point format '" + std::string(text) + "'"); };
  if (text.size() < 6 || (text[0] != 's' && text[0] != 'u') || text[1] != '[') throw fail();
  FixedFormat format;
  format.is_signed = text[0] == 's';
  const char* p = text.data() + 2;
  const char* end = text.data() + text.size();
  auto r1 = std::from_chars(p, end, format.int_bits);
  if (r1.ec != std::errc{} || r1.ptr + 1 >= end || r1.ptr[0] != ']' || r1.ptr[1] != '[') throw fail();
  auto r2 = std::from_chars(r1.ptr + 2, end, format.frac_bits);
  if (r2.ec != std::errc{} || r2.ptr + 1 != end || *r2.ptr != ']') throw fail();
  format.validate();
  return format;
}

FixedPoint FixedPoint::from_raw(std::int64_t raw, FixedFormat format) {
  format.validate();
  if (!format.contains_raw(raw)) {
    throw ValidationError("raw value " + std::to_string(raw) + " does not fit " +
                          format.to_string());
  }
  return FixedPoint(raw, format);
}

FixedPoint FixedPoint::from_rational(std::int64_t numer, std::int64_t denom, FixedFormat format,
                                     Rounding rounding) {
  format.validate();
  if (denom <= 0 || !std::has_single_bit(static_cast<std::uint64_t>(denom))) {
    throw ValidationError("denominator must be a positive power of two, got " +
                          std::to_string(denom));
  }
  const int denom_bits = std::countr_zero(static_cast<std::uint64_t>(denom));
  i128 raw;
  if (denom_bits <= format.frac_bits) {
    raw = static_cast<i128>(numer) << (format.frac_bits - denom_bits);
  } else {
    const int shift = denom_bits - format.frac_bits;
    const i128 mask = (i128{1} << shift) - 1;
    if (rounding == Rounding::exact && (static_cast<i128>(numer) & mask) != 0) {
      throw NotRepresentableError(std::to_string(numer) + "/" + std::to_string(denom) +
                                  " is not a multiple of the resolution of " +
                                  format.to_string());
    }
    raw = floor_shift(numer, shift);
  }
  return FixedPoint(clamp_raw(raw, format), format);
}

FixedPoint FixedPoint::parse(std::string_view text, FixedFormat format) {
  format.validate();
  auto fail = [&](const std::string& why) {
    return ValidationError("'" + std::string(text) + "': " + why);
  };
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) throw fail("empty number");

  i128 digits = 0;
  int frac_digits = 0;
  int total_digits = 0;
  bool seen_point = false;
  for (char c : s) {
    if (c == '.') {
      if (seen_point) throw fail("more than one decimal point");
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9') throw fail("not a decimal number");
    if (++total_digits > 18) throw fail("too many digits");
    digits = digits * 10 + (c - '0');
    if (seen_point) ++frac_digits;
  }
  if (total_digits == 0) throw fail("no digits");

  // value = digits / 10^k; raw = digits * 2^f / 10^k must be an integer.
  i128 pow10 = 1;
  for (int i = 0; i < frac_digits; ++i) pow10 *= 10;
  const i128 scaled = digits << format.frac_bits;
  if (scaled % pow10 != 0) {
    throw NotRepresentableError("'" + std::string(text) + "' is not representable in " +
                                format.to_string() + " (resolution " +
                                FixedPoint(1, format).to_string() + ")");
  }
  i128 raw = scaled / pow10;
  if (negative) raw = -raw;
  if (raw < format.raw_min() || raw > format.raw_max()) {
    throw fail("outside the range of " + format.to_string());
  }
  return FixedPoint(static_cast<std::int64_t>(raw), format);
}

double FixedPoint::to_double() const {
  return std::ldexp(static_cast<double>(raw_), -format_.frac_bits);
}

std::string FixedPoint::to_string() const {
  const bool negative = raw_ < 0;
  u128 magnitude = negative ? static_cast<u128>(-static_cast<i128>(raw_)) : static_cast<u128>(raw_);
  const int f = format_.frac_bits;
  const u128 mask = (u128{1} << f) - 1;
  std::string out = negative ? "-" : "";
  const auto whole = static_cast<std::uint64_t>(magnitude >> f);
  out += std::to_string(whole);
  u128 rem = magnitude & mask;
  if (rem != 0) {
    out += '.';
    while (rem != 0) {
      rem *= 10;
      out += static_cast<char>('0' + static_cast<int>(rem >> f));
      rem &= mask;
    }
  }
  return out;
}

std::strong_ordering operator<=>(const FixedPoint& a, const FixedPoint& b) {
  const int f = std::max(a.format_.frac_bits, b.format_.frac_bits);
  const i128 ra = static_cast<i128>(a.raw_) << (f - a.format_.frac_bits);
  const i128 rb = static_cast<i128>(b.raw_) << (f - b.format_.frac_bits);
  return ra <=> rb;
}

FixedPoint add_widened(const FixedPoint& a, const FixedPoint& b) {
  require_same_frac(a, b, "add_widened");
  FixedFormat format{std::max(a.format().int_bits, b.format().int_bits) + 1, a.format().frac_bits,
                     a.format().is_signed || b.format().is_signed};
  return FixedPoint::from_raw(a.raw() + b.raw(), format);
}

FixedPoint saturate(const FixedPoint& a, const FixedPoint& lo, const FixedPoint& hi) {
  if (!(lo.format() == hi.format())) {
    throw ValidationError("saturate: bounds must share a format");
  }
  require_same_frac(a, lo, "saturate");
  if (hi < lo) throw ValidationError("saturate: lo > hi");
  if (a < lo) return lo;
  if (a > hi) return hi;
  return FixedPoint::from_raw(a.raw(), lo.format());
}

FixedPoint multiply(const FixedPoint& a, const FixedPoint& b) {
  const bool is_signed = a.format().is_signed || b.format().is_signed;
  FixedFormat format{a.format().int_bits + b.format().int_bits + (is_signed ? 1 : 0),
                     a.format().frac_bits + b.format().frac_bits, is_signed};
  format.validate();
  const i128 raw = static_cast<i128>(a.raw()) * b.raw();
  return FixedPoint::from_raw(static_cast<std::int64_t>(raw), format);
}

FixedPoint truncate(const FixedPoint& a, int frac_bits) {
  FixedFormat format = a.format();
  format.frac_bits = frac_bits;
  format.validate();
  const int shift = a.format().frac_bits - frac_bits;
  const i128 raw = shift >= 0 ? floor_shift(a.raw(), shift) : static_cast<i128>(a.raw()) << -shift;
  return FixedPoint::from_raw(static_cast<std::int64_t>(raw), format);
}

FixedPoint scale(const FixedPoint& a, const FixedPoint& k) {
  return truncate(multiply(a, k), a.format().frac_bits);
}

FixedFormat fit_format(std::span<const FixedPoint> values, int frac_bits, int min_int_bits) {
  FixedFormat format = FixedFormat::s(min_int_bits, frac_bits);
  for (const auto& v : values) {
    while (true) {
      format.validate();
      const FixedPoint lo = FixedPoint::from_raw(format.raw_min(), format);
      const FixedPoint hi = FixedPoint::from_raw(format.raw_max(), format);
      if (v >= lo && v <= hi) break;
      ++format.int_bits;
    }
    if (v.format().frac_bits > frac_bits && !(truncate(v, frac_bits) == v)) {
      throw NotRepresentableError(v.to_string() + " needs more than " + std::to_string(frac_bits) +
                                  " fractional bits");
    }
  }
  return format;
}

FixedPoint convert(const FixedPoint& a, FixedFormat format) {
  const FixedPoint moved = truncate(a, format.frac_bits);
  if (!(moved == a)) {
    throw NotRepresentableError(a.to_string() + " is not representable in " + format.to_string());
  }
  if (!format.contains_raw(moved.raw())) {
    throw ValidationError(a.to_string() + " is outside the range of " + format.to_string());
  }
  return FixedPoint::from_raw(moved.raw(), format);
}

}  // namespace pbitemu
