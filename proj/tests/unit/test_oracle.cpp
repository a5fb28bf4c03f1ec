#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "pbitemu/errors.hpp"
#include "pbitemu/oracle.hpp"
#include "test_support.hpp"

namespace pbitemu {
namespace {

double total(const BoltzmannDistribution& d) {
  double sum = 0;
  for (const auto& [k, p] : d.probs) sum += p;
  return sum;
}

GateSpec random_gate(testing::Gen& gen, std::size_t n) {
  std::vector<std::string> names;
  std::vector<std::vector<int>> j(n, std::vector<int>(n, 0));
  std::vector<int> h(n);
  for (std::size_t a = 0; a < n; ++a) {
    names.push_back("p" + std::to_string(a));
    h[a] = static_cast<int>(gen.range(-3, 3));
    for (std::size_t b = a + 1; b < n; ++b) j[a][b] = j[b][a] = static_cast<int>(gen.range(-2, 2));
  }
  return make_gate(names, j, h);
}

TEST(Energy, AndExamples) {
  const auto g = and_gate();
  const int down[] = {-1, -1, -1};
  const int up[] = {1, 1, 1};
  EXPECT_DOUBLE_EQ(energy(g, down, 1.0), -3.0);
  EXPECT_DOUBLE_EQ(energy(g, up, 1.0), -3.0);
  EXPECT_DOUBLE_EQ(energy(g, up, 2.0), -6.0);
  const auto zero = make_gate({"x", "y", "z"}, {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}, {0, 0, 0});
  EXPECT_DOUBLE_EQ(energy(zero, up, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(energy(zero, down, 1.0), 0.0);
}

TEST(Energy, Validation) {
  auto g = and_gate();
  const int bad[] = {0, 1, 1};
  EXPECT_THROW(energy(g, bad, 1.0), ValidationError);
  const int short_state[] = {1, 1};
  EXPECT_THROW(energy(g, short_state, 1.0), ValidationError);
  g.j[0][1] = FixedPoint::from_int(1, g.j[0][1].format());
  const int up[] = {1, 1, 1};
  EXPECT_THROW(energy(g, up, 1.0), ValidationError);
  const int binary[] = {0, 1, 1};
  EXPECT_NO_THROW(energy(to_binary(and_gate()), binary, 1.0));
}

TEST(Enumerate, AndFloating) {
  const auto d = enumerate(and_gate(), 1.0);
  EXPECT_EQ(d.width, 3u);
  EXPECT_EQ(d.probs.size(), 8u);
  EXPECT_NEAR(total(d), 1.0, 1e-12);
  double truth = 0;
  for (std::uint64_t k : {0b000u, 0b001u, 0b010u, 0b111u}) {
    EXPECT_NEAR(d.probability(k), 0.2466, 5e-5);
    truth += d.probability(k);
  }
  EXPECT_NEAR(truth, 0.9865, 1e-4);
}

TEST(Enumerate, AndOutputClampedLow) {
  const auto d = enumerate(and_gate(), 1.0, Clamps{{2, false}});
  EXPECT_EQ(d.probs.size(), 4u);
  for (std::uint64_t k : {0b000u, 0b001u, 0b010u}) EXPECT_NEAR(d.probability(k), 0.3313, 5e-5);
  EXPECT_LT(d.probability(0b011), 0.01);
  EXPECT_EQ(d.probability(0b100), 0.0);
}

TEST(Enumerate, SinglePBit) {
  const auto d = enumerate(make_gate({"m"}, {{0}}, {0}), 1.0);
  EXPECT_DOUBLE_EQ(d.probability(0), 0.5);
  EXPECT_DOUBLE_EQ(d.probability(1), 0.5);
}

TEST(Enumerate, MatchesIndependentOracle) {
  testing::Gen gen(41);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = static_cast<std::size_t>(gen.range(1, 8));
    const auto g = random_gate(gen, n);
    std::vector<std::vector<int>> j(n, std::vector<int>(n));
    std::vector<int> h(n);
    for (std::size_t a = 0; a < n; ++a) {
      h[a] = static_cast<int>(g.h[a].to_double());
      for (std::size_t b = 0; b < n; ++b) j[a][b] = static_cast<int>(g.j[a][b].to_double());
    }
    const double i0 = 0.5 + gen.unit();
    const auto want = testing::boltzmann(j, h, i0);
    const auto got = enumerate(g, i0);
    for (std::uint64_t k = 0; k < want.size(); ++k) {
      EXPECT_NEAR(got.probability(k), want[k], 1e-12);
    }
  }
}

TEST(Enumerate, BudgetExceeded) {
  EXPECT_THROW(enumerate(full_adder_14(), 1.0, {}, 10), BudgetExceededError);
  Clamps pins;
  for (std::size_t i = 0; i < 5; ++i) pins[i] = false;
  EXPECT_NO_THROW(enumerate(full_adder_14(), 1.0, pins, 10));
  testing::Gen gen(1);
  EXPECT_THROW(enumerate(random_gate(gen, 25), 1.0), BudgetExceededError);
}

TEST(Enumerate, Marginal) {
  const auto d = enumerate(and_gate(), 1.0);
  const std::size_t c[] = {2};
  const auto m = d.marginal(c);
  EXPECT_NEAR(m.at(0) + m.at(1), 1.0, 1e-12);
  EXPECT_NEAR(m.at(1),
              d.probability(0b100) + d.probability(0b101) + d.probability(0b110) +
                  d.probability(0b111),
              1e-12);
}

TEST(Equivalence, BinaryAndBipolarAgreeStateForState) {
  for (const auto& g : {and_gate(), full_adder_5()}) {
    const auto bip = enumerate(g, 1.0);
    const auto bin = enumerate(to_binary(g), 1.0);
    ASSERT_EQ(bip.probs.size(), bin.probs.size());
    for (std::size_t i = 0; i < bip.probs.size(); ++i) {
      EXPECT_EQ(bip.probs[i].first, bin.probs[i].first);
      EXPECT_NEAR(bip.probs[i].second, bin.probs[i].second, 1e-12);
    }
  }
}

TEST(Equivalence, HoldsForRandomGatesAndClamps) {
  testing::Gen gen(43);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = static_cast<std::size_t>(gen.range(1, 9));
    const auto g = random_gate(gen, n);
    Clamps pins;
    for (std::size_t i = 0; i < n; ++i) {
      if (gen.range(0, 3) == 0) pins[i] = gen.range(0, 1) == 1;
    }
    const double i0 = 0.25 + 2 * gen.unit();
    const auto bip = enumerate(g, i0, pins);
    const auto bin = enumerate(to_binary(g), i0, pins);
    EXPECT_NEAR(total(bip), 1.0, 1e-12);
    EXPECT_LT(tv_distance(bip.to_distribution(), bin.to_distribution()), 1e-12);
  }
}

TEST(ReferenceSample, AndConverges) {
  const auto exact = enumerate(and_gate(), 1.0).to_distribution();
  const double tv_short = tv_distance(reference_sample(and_gate(), 1.0, {}, 10000, 3), exact);
  const double tv_long = tv_distance(reference_sample(and_gate(), 1.0, {}, 1000000, 3), exact);
  EXPECT_LT(tv_long, 0.005);
  EXPECT_LT(tv_long, tv_short);
}

TEST(ReferenceSample, ZeroCouplingIsUniform) {
  const auto g = make_gate({"a", "b", "c"}, {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}, {0, 0, 0});
  const auto d = reference_sample(g, 1.0, {}, 1000000, 4);
  Distribution uniform;
  for (std::uint64_t k = 0; k < 8; ++k) uniform[k] = 0.125;
  EXPECT_LT(tv_distance(d, uniform), 0.005);
}

TEST(ReferenceSample, FullAdderTruthTableDominates) {
  const auto d = reference_sample(full_adder_5(), 1.0, {}, 1000000, 5);
  std::vector<std::pair<double, std::uint64_t>> ranked;
  for (const auto& [k, p] : d) ranked.emplace_back(p, k);
  std::sort(ranked.rbegin(), ranked.rend());
  std::vector<std::uint64_t> top;
  for (std::size_t i = 0; i < 8; ++i) top.push_back(ranked[i].second);
  std::sort(top.begin(), top.end());
  // Cout S A B Cin
  const std::vector<std::uint64_t> truth{0b00000, 0b01001, 0b01010, 0b01100,
                                         0b10011, 0b10101, 0b10110, 0b11111};
  EXPECT_EQ(top, truth);
}

TEST(ReferenceSample, ClampedBitsStayPinned) {
  const auto d = reference_sample(and_gate(), 1.0, Clamps{{2, false}}, 100000, 6);
  for (const auto& [k, p] : d) EXPECT_EQ(k & 0b100, 0u);
}

TEST(GibbsSampler, FlipRatesFollowLocalField) {
  const auto g = and_gate();
  GibbsSampler s(g, 1.0, {}, 7);
  // (p-bit, other spins) -> (updates, ups, field)
  struct Tally {
    double n = 0, up = 0, field = 0;
  };
  std::map<std::pair<std::size_t, std::uint64_t>, Tally> tally;
  for (int sweep = 0; sweep < 300000; ++sweep) {
    for (std::size_t i = 0; i < 3; ++i) {
      auto& t = tally[{i, s.state_key() & ~(std::uint64_t{1} << i)}];
      t.field = s.local_field(i);
      t.n += 1;
      t.up += s.update(i) == 1;
    }
  }
  for (const auto& [context, t] : tally) {
    if (t.n < 20000) continue;
    const double logistic = 1 / (1 + std::exp(-2 * t.field));
    EXPECT_NEAR(t.up / t.n, logistic, 0.01) << "p-bit " << context.first;
  }
}

TEST(GibbsSampler, RejectsBinaryGates) {
  EXPECT_THROW(GibbsSampler(to_binary(and_gate()), 1.0, {}, 1), ValidationError);
}

}  // namespace
}  // namespace pbitemu
