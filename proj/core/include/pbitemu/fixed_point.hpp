#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace pbitemu {

/// Layout of a two's-complement fixed-point number, written s[x][y].
///
/// A signed format has a sign bit on top of `int_bits` integer bits, so the
/// representable range is [-2^x, 2^x - 2^-y] in steps of 2^-y (s[4][2] spans
/// -16 .. 15.75). Unsigned formats drop the sign bit; the activation table's
/// s[0][31] outputs use one, since they always lie in [0, 1).
struct FixedFormat {
  int int_bits = 0;
  int frac_bits = 0;
  bool is_signed = true;

  static constexpr FixedFormat s(int int_bits, int frac_bits) {
    return {int_bits, frac_bits, true};
  }
  static constexpr FixedFormat u(int int_bits, int frac_bits) {
    return {int_bits, frac_bits, false};
  }

  static constexpr int kMaxTotalBits = 63;

  constexpr int total_bits() const { return int_bits + frac_bits + (is_signed ? 1 : 0); }
  constexpr std::int64_t raw_max() const {
    return (std::int64_t{1} << (int_bits + frac_bits)) - 1;
  }
  constexpr std::int64_t raw_min() const {
    return is_signed ? -(std::int64_t{1} << (int_bits + frac_bits)) : 0;
  }
  constexpr bool contains_raw(std::int64_t raw) const {
    return raw >= raw_min() && raw <= raw_max();
  }
  double resolution() const;

  // Throws ValidationError for negative widths or more than 63 mantissa bits.
  void validate() const;

  // "s[3][2]" / "u[0][31]"
  std::string to_string() const;
  static FixedFormat parse(std::string_view text);

  friend constexpr bool operator==(const FixedFormat&, const FixedFormat&) = default;
};

enum class Rounding {
  exact,  // reject values that are not a multiple of the resolution
  floor,  // truncate toward negative infinity
};

/// Exact fixed-point value: raw * 2^-frac_bits.
///
/// Comparison operators compare exact values, so numbers in different
/// formats compare meaningfully. Arithmetic lives in the free functions
/// below; none of them rounds except `truncate`.
class FixedPoint {
 public:
  FixedPoint() = default;

  static FixedPoint from_raw(std::int64_t raw, FixedFormat format);

  // numer / denom with denom a positive power of two. Out-of-range values
  // saturate to the format bounds.
  static FixedPoint from_rational(std::int64_t numer, std::int64_t denom, FixedFormat format,
                                  Rounding rounding = Rounding::exact);

  static FixedPoint from_int(std::int64_t value, FixedFormat format) {
    return from_rational(value, 1, format);
  }

  // Parses an exact decimal literal such as "-1.25". Unlike from_rational this
  // is strict: values outside the format or off its grid are errors.
  static FixedPoint parse(std::string_view text, FixedFormat format);

  std::int64_t raw() const { return raw_; }
  const FixedFormat& format() const { return format_; }
  double to_double() const;

  // Shortest exact decimal spelling ("-16", "7.75", "0.5").
  std::string to_string() const;

  friend std::strong_ordering operator<=>(const FixedPoint& a, const FixedPoint& b);
  friend bool operator==(const FixedPoint& a, const FixedPoint& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

  // Same value and same format.
  bool identical(const FixedPoint& other) const {
    return raw_ == other.raw_ && format_ == other.format_;
  }

 private:
  FixedPoint(std::int64_t raw, FixedFormat format) : raw_(raw), format_(format) {}

  std::int64_t raw_ = 0;
  FixedFormat format_{};
};

// Sum in a format one integer bit wider than the wider operand; never overflows.
FixedPoint add_widened(const FixedPoint& a, const FixedPoint& b);

// min(max(a, lo), hi) returned in the format of lo/hi. a must share their
// fractional width; lo and hi must share a format.
FixedPoint saturate(const FixedPoint& a, const FixedPoint& lo, const FixedPoint& hi);

// Exact product: fractional widths add, integer widths add plus one.
FixedPoint multiply(const FixedPoint& a, const FixedPoint& b);

// Drops (floor) or appends fractional bits; the integer width is unchanged.
FixedPoint truncate(const FixedPoint& a, int frac_bits);

// a * k truncated back to a's fractional width.
FixedPoint scale(const FixedPoint& a, const FixedPoint& k);

// Narrowest signed format with `frac_bits` fractional bits and at least
// `min_int_bits` integer bits that holds every value exactly.
FixedFormat fit_format(std::span<const FixedPoint> values, int frac_bits, int min_int_bits = 0);

// Re-expresses a value in another format. Throws if it does not fit exactly.
FixedPoint convert(const FixedPoint& a, FixedFormat format);

}  // namespace pbitemu
