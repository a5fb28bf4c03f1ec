#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "pbitemu/gates.hpp"
#include "pbitemu/stats.hpp"

namespace pbitemu {

// Gate index -> pinned value (true = up).
using Clamps = std::map<std::size_t, bool>;

inline constexpr std::size_t kEnumerationBudgetBits = 24;

// E = -I0 (sum_{i<j} J_ij m_i m_j + sum_i h_i m_i) in real arithmetic. The
// state uses the gate's own convention: +-1 for bipolar, 0/1 for binary.
double energy(const GateSpec& gate, std::span<const int> state, double i0);

/// Exact stationary distribution of a reciprocal network. State keys set bit
/// i when p-bit i is up; clamped bits are fixed in every key.
struct BoltzmannDistribution {
  double i0 = 1;
  std::size_t width = 0;
  std::vector<std::pair<std::uint64_t, double>> probs;  // sorted by key

  double probability(std::uint64_t key) const;
  Distribution to_distribution() const;
  // Marginal over the listed bits, keyed as SampleLog::key does.
  Distribution marginal(std::span<const std::size_t> bits) const;
};

// P({m}) proportional to exp(-E). Binary-convention gates are weighted by
// exp(-2E), since their energy is half the bipolar energy up to a constant.
// Throws BudgetExceededError when more than `budget_bits` p-bits are free.
BoltzmannDistribution enumerate(const GateSpec& gate, double i0, const Clamps& clamps = {},
                                std::size_t budget_bits = kEnumerationBudgetBits);

/// Floating-point sequential Gibbs sampler using m = sgn(rand(-1,1) + tanh(I))
/// on a bipolar gate. Independent of the fixed-point code path.
class GibbsSampler {
 public:
  GibbsSampler(const GateSpec& gate, double i0, const Clamps& clamps, std::uint64_t seed);

  // I_i = I0 (h_i + sum_j J_ij m_j) for the current state.
  double local_field(std::size_t i) const;
  // Resamples p-bit i (no-op for clamped bits) and returns its new value.
  int update(std::size_t i);
  // One sequential pass over the free p-bits in index order.
  void sweep();

  std::span<const int> state() const { return state_; }
  std::uint64_t state_key() const;
  bool is_clamped(std::size_t i) const { return clamped_[i] != 0; }

 private:
  double uniform_pm1();

  std::vector<std::vector<double>> j_;
  std::vector<double> h_;
  double i0_;
  std::vector<int> state_;
  std::vector<std::uint8_t> clamped_;
  std::mt19937_64 rng_;
};

// Normalized histogram of full-state keys after each of `sweeps` sweeps.
Distribution reference_sample(const GateSpec& gate, double i0, const Clamps& clamps,
                              std::uint64_t sweeps, std::uint64_t seed);

}  // namespace pbitemu
