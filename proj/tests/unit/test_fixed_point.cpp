#include <gtest/gtest.h>

#include <cmath>

#include "pbitemu/errors.hpp"
#include "pbitemu/fixed_point.hpp"
#include "test_support.hpp"

namespace pbitemu {
namespace {

using testing::exact;
using testing::Gen;

FixedPoint fx(const char* text, FixedFormat format) { return FixedPoint::parse(text, format); }

const FixedFormat s32 = FixedFormat::s(3, 2);
const FixedFormat s42 = FixedFormat::s(4, 2);

TEST(FixedFormat, RangeAndResolution) {
  EXPECT_EQ(FixedPoint::from_raw(s42.raw_min(), s42).to_string(), "-16");
  EXPECT_EQ(FixedPoint::from_raw(s42.raw_max(), s42).to_string(), "15.75");
  EXPECT_EQ(s32.resolution(), 0.25);
  EXPECT_EQ(FixedFormat::u(0, 31).resolution(), std::ldexp(1.0, -31));
}

TEST(FixedFormat, ParseAndPrint) {
  EXPECT_EQ(FixedFormat::parse("s[3][2]"), s32);
  EXPECT_EQ(FixedFormat::parse("u[0][31]"), FixedFormat::u(0, 31));
  EXPECT_EQ(FixedFormat::s(7, 8).to_string(), "s[7][8]");
  EXPECT_THROW(FixedFormat::parse("s[3]"), ValidationError);
  EXPECT_THROW(FixedFormat::parse("q[3][2]"), ValidationError);
  EXPECT_THROW(FixedFormat::parse("s[40][40]"), ValidationError);
}

TEST(FromRational, Examples) {
  const auto min = FixedPoint::from_rational(-64, 4, s42);
  EXPECT_EQ(min.raw(), -64);
  EXPECT_EQ(min.to_double(), -16.0);
  EXPECT_EQ(FixedPoint::from_rational(0, 1, s32).to_double(), 0.0);
  EXPECT_EQ(FixedPoint::from_rational(63, 4, s32).to_double(), 7.75);
}

TEST(FromRational, TruncatesAndSaturates) {
  EXPECT_THROW(FixedPoint::from_rational(1, 8, s32), NotRepresentableError);
  EXPECT_EQ(FixedPoint::from_rational(1, 8, s32, Rounding::floor).to_double(), 0.0);
  EXPECT_EQ(FixedPoint::from_rational(-1, 8, s32, Rounding::floor).to_double(), -0.25);
  EXPECT_EQ(FixedPoint::from_rational(100, 1, s32).to_double(), 7.75);
  EXPECT_EQ(FixedPoint::from_rational(-100, 1, s32).to_double(), -8.0);
  EXPECT_THROW(FixedPoint::from_rational(1, 3, s32), ValidationError);
  EXPECT_THROW(FixedPoint::from_rational(1, 0, s32), ValidationError);
}

TEST(Parse, ExactDecimalsOnly) {
  EXPECT_EQ(fx("-1.25", s32).raw(), -5);
  EXPECT_EQ(fx("7.75", s32).raw(), 31);
  EXPECT_THROW(fx("1.125", s32), NotRepresentableError);
  EXPECT_THROW(fx("8", s32), ValidationError);
  EXPECT_THROW(fx("1e3", s32), ValidationError);
  EXPECT_THROW(fx("", s32), ValidationError);
  EXPECT_EQ(fx("-8", s32).to_string(), "-8");
}

TEST(AddWidened, Examples) {
  const auto a = add_widened(fx("7.75", s32), fx("7.75", s32));
  EXPECT_EQ(a.to_double(), 15.5);
  EXPECT_EQ(a.format(), s42);
  const auto b = add_widened(fx("-16", s42), fx("-16", s42));
  EXPECT_EQ(b.to_double(), -32.0);
  EXPECT_EQ(b.format(), FixedFormat::s(5, 2));
  EXPECT_EQ(add_widened(fx("2", s32), fx("-1", s32)).to_double(), 1.0);
  EXPECT_THROW(add_widened(fx("1", s32), fx("1", FixedFormat::s(3, 3))), ValidationError);
}

TEST(Saturate, Examples) {
  const auto lo = fx("-8", s32);
  const auto hi = fx("7.75", s32);
  EXPECT_EQ(saturate(fx("15.5", s42), lo, hi).to_double(), 7.75);
  EXPECT_EQ(saturate(fx("-10.25", FixedFormat::s(5, 2)), lo, hi).to_double(), -8.0);
  const auto in = saturate(fx("3", s42), lo, hi);
  EXPECT_EQ(in.to_double(), 3.0);
  EXPECT_EQ(in.format(), s32);
}

TEST(Scale, Examples) {
  EXPECT_EQ(scale(fx("3", s32), fx("1", s32)).to_double(), 3.0);
  EXPECT_EQ(scale(fx("-2.5", s42), fx("2", s32)).to_double(), -5.0);
  const auto half = scale(fx("1.25", s32), fx("0.5", FixedFormat::s(7, 8)));
  EXPECT_EQ(half.to_double(), 0.5);
  EXPECT_EQ(half.format().frac_bits, 2);
  // 0.75 * 0.5 = 0.375 floors to 0.25; -0.75 * 0.5 floors to -0.5
  EXPECT_EQ(scale(fx("0.75", s32), fx("0.5", s32)).to_double(), 0.25);
  EXPECT_EQ(scale(fx("-0.75", s32), fx("0.5", s32)).to_double(), -0.5);
}

TEST(ToString, ShortestExactDecimal) {
  EXPECT_EQ(fx("0.5", s32).to_string(), "0.5");
  EXPECT_EQ(FixedPoint::from_raw(1, FixedFormat::u(0, 31)).to_string(),
            "0.0000000004656612873077392578125");
}

TEST(FitFormat, NarrowestHolding) {
  const std::vector<FixedPoint> v{fx("-2", s32), fx("4", s32)};
  EXPECT_EQ(fit_format(v, 2), FixedFormat::s(3, 2));
  const std::vector<FixedPoint> w{fx("-1", s32)};
  EXPECT_EQ(fit_format(w, 2), FixedFormat::s(0, 2));
  EXPECT_EQ(fit_format(w, 2, 3), FixedFormat::s(3, 2));
}

TEST(Convert, ExactOrThrow) {
  EXPECT_EQ(convert(fx("1.5", FixedFormat::s(3, 4)), s32).raw(), 6);
  EXPECT_THROW(convert(fx("1.125", FixedFormat::s(3, 4)), s32), NotRepresentableError);
  EXPECT_THROW(convert(fx("9", s42), s32), ValidationError);
}

// Properties over random formats and values.

TEST(FixedPointProperty, RationalRoundTrip) {
  Gen gen(11);
  for (int i = 0; i < 5000; ++i) {
    const auto f = gen.format();
    const auto raw = gen.range(f.raw_min(), f.raw_max());
    const auto v = FixedPoint::from_rational(raw, std::int64_t{1} << f.frac_bits, f);
    EXPECT_EQ(v.raw(), raw);
    EXPECT_EQ(exact(v), std::ldexp(static_cast<long double>(raw), -f.frac_bits));
    EXPECT_TRUE(FixedPoint::parse(v.to_string(), f).identical(v));
  }
}

TEST(FixedPointProperty, WidenedAdditionCommutesAndAssociates) {
  Gen gen(12);
  for (int i = 0; i < 5000; ++i) {
    const int frac = static_cast<int>(gen.range(0, 10));
    auto pick = [&] {
      return gen.value(FixedFormat::s(static_cast<int>(gen.range(0, 20)), frac));
    };
    const auto a = pick(), b = pick(), c = pick();
    EXPECT_EQ(add_widened(a, b), add_widened(b, a));
    EXPECT_EQ(add_widened(add_widened(a, b), c), add_widened(a, add_widened(b, c)));
    EXPECT_EQ(exact(add_widened(a, b)), exact(a) + exact(b));
  }
}

TEST(FixedPointProperty, SaturationIsIdempotent) {
  Gen gen(13);
  for (int i = 0; i < 5000; ++i) {
    const int frac = static_cast<int>(gen.range(0, 8));
    const auto bounds = FixedFormat::s(static_cast<int>(gen.range(0, 8)), frac);
    auto lo = gen.value(bounds), hi = gen.value(bounds);
    if (hi < lo) std::swap(lo, hi);
    const auto a = gen.value(FixedFormat::s(static_cast<int>(gen.range(0, 12)), frac));
    const auto once = saturate(a, lo, hi);
    EXPECT_TRUE(saturate(once, lo, hi).identical(once));
    EXPECT_GE(once, lo);
    EXPECT_LE(once, hi);
    if (a >= lo && a <= hi) {
      EXPECT_EQ(once, a);
    }
  }
}

TEST(FixedPointProperty, TruncationErrorBelowResolution) {
  Gen gen(14);
  for (int i = 0; i < 5000; ++i) {
    const auto f = gen.format(10, 20);
    const auto a = gen.value(f);
    const int frac = static_cast<int>(gen.range(0, f.frac_bits));
    const auto t = truncate(a, frac);
    const long double err = exact(a) - exact(t);
    EXPECT_GE(err, 0.0L);
    EXPECT_LT(err, std::ldexp(1.0L, -frac));
  }
}

TEST(FixedPointProperty, MultiplyIsExact) {
  Gen gen(15);
  for (int i = 0; i < 5000; ++i) {
    const auto a = gen.value(gen.format(8, 10));
    const auto b = gen.value(gen.format(8, 10));
    EXPECT_EQ(exact(multiply(a, b)), exact(a) * exact(b));
  }
}

}  // namespace
}  // namespace pbitemu
