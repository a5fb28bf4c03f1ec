#include <gtest/gtest.h>

#include <cmath>
#include <unordered_set>
#include <vector>

#include "pbitemu/lfsr.hpp"
#include "test_support.hpp"

namespace pbitemu {
namespace {

using Lfsr8 = XnorLfsr<8, tap_mask({8, 6, 5, 4})>;
using Lfsr16 = XnorLfsr<16, tap_mask({16, 15, 13, 4})>;

TEST(Lfsr32, Seeds) {
  EXPECT_NO_THROW(Lfsr32(0x00000000u));
  EXPECT_NO_THROW(Lfsr32(0xDEADBEEFu));
  EXPECT_THROW(Lfsr32(0xFFFFFFFFu), ValidationError);
  EXPECT_EQ(Lfsr32(0xDEADBEEFu).state(), 0xDEADBEEFu);
}

TEST(Lfsr32, HandTraceFromZero) {
  Lfsr32 r(0);
  EXPECT_EQ(r.step(), 0x1u);  // XNOR(0,0,0,0) = 1 enters position 1
  EXPECT_EQ(r.step(), 0x2u);  // tap 1 set: feedback 0
  EXPECT_EQ(r.step(), 0x4u);  // tap 2 set: feedback 0
  EXPECT_EQ(r.step(), 0x9u);  // no tap set: feedback 1
}

TEST(Lfsr32, MatchesBitLevelReference) {
  for (std::uint32_t seed : {0u, 1u, 0xDEADBEEFu, 0x80000000u, 0x7FFFFFFFu}) {
    Lfsr32 r(seed);
    testing::ReferenceLfsr<32> ref(seed, {32, 22, 2, 1});
    for (int i = 0; i < 20000; ++i) ASSERT_EQ(r.step(), ref.step()) << "seed " << seed;
  }
}

TEST(Lfsr32, NeverReachesLockup) {
  Lfsr32 r(0x12345678u);
  for (int i = 0; i < 2000000; ++i) ASSERT_NE(r.step(), Lfsr32::kLockup);
}

TEST(Lfsr32, Deterministic) {
  Lfsr32 a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.step(), b.step());
  EXPECT_EQ(a, b);
}

TEST(UnitFraction, TopThirtyOneBits) {
  EXPECT_EQ(unit_fraction(0x00000000u).to_double(), 0.0);
  EXPECT_EQ(unit_fraction(0x80000000u).to_double(), 0.5);
  EXPECT_EQ(unit_fraction(0xFFFFFFFEu).to_double(), 1.0 - std::ldexp(1.0, -31));
  EXPECT_EQ(unit_fraction(0xFFFFFFFEu).raw(), 0x7FFFFFFF);
  EXPECT_EQ(unit_fraction(0x1u).raw(), 0);
  EXPECT_EQ(unit_fraction(0x1u).format(), kUnitFormat);
}

TEST(UnitFraction, MeanIsOneHalf) {
  Lfsr32 r(derive_seed(3, 0));
  double sum = 0;
  constexpr int n = 1000000;
  for (int i = 0; i < n; ++i) sum += next_uniform(r).to_double();
  EXPECT_NEAR(sum / n, 0.5, 0.002);
}

TEST(MiniatureLfsr, EightBitFullPeriod) {
  Lfsr8 r(0);
  std::vector<bool> seen(256, false);
  for (int i = 0; i < 255; ++i) {
    const auto s = r.step();
    ASSERT_FALSE(seen[s]) << "repeat after " << i << " steps";
    seen[s] = true;
  }
  EXPECT_EQ(r.state(), 0u);
  EXPECT_FALSE(seen[0xFF]);
  EXPECT_THROW(Lfsr8(0xFF), ValidationError);
  EXPECT_THROW(Lfsr8(0x100), ValidationError);
}

TEST(MiniatureLfsr, SixteenBitSeedsShareOneCycle) {
  std::vector<std::uint32_t> cycle;
  std::vector<int> position(1 << 16, -1);
  Lfsr16 a(0);
  for (int i = 0; i < 65535; ++i) {
    const auto s = a.step();
    ASSERT_EQ(position[s], -1);
    position[s] = i;
    cycle.push_back(s);
  }
  EXPECT_EQ(a.state(), 0u);

  Lfsr16 b(0xBEEF);
  const int offset = position[0xBEEF];
  ASSERT_GE(offset, 0);
  for (int i = 0; i < 65536; ++i) {
    ASSERT_EQ(b.step(), cycle[(offset + 1 + i) % 65535]);
  }
}

TEST(DeriveSeed, DistinctAndValid) {
  std::unordered_set<std::uint32_t> seen;
  for (std::uint64_t i = 0; i < 200000; ++i) {
    const auto s = derive_seed(7, i);
    ASSERT_NE(s, 0xFFFFFFFFu);
    ASSERT_TRUE(seen.insert(s).second) << "index " << i;
  }
  EXPECT_EQ(derive_seed(7, 5), derive_seed(7, 5));
  EXPECT_NE(derive_seed(7, 5), derive_seed(8, 5));
}

}  // namespace
}  // namespace pbitemu
