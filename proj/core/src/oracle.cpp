#include "pbitemu/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pbitemu/errors.hpp"

namespace pbitemu {
namespace {

struct RealGate {
  std::vector<std::vector<double>> j;
  std::vector<double> h;
};

RealGate to_real(const GateSpec& gate) {
  gate.validate();
  RealGate out;
  out.h.reserve(gate.size());
  for (std::size_t r = 0; r < gate.size(); ++r) {
    out.h.push_back(gate.h[r].to_double());
    auto& row = out.j.emplace_back();
    for (const auto& v : gate.j[r]) row.push_back(v.to_double());
  }
  return out;
}

double energy_of(const RealGate& g, std::span<const int> m, double i0) {
  double pairs = 0;
  double bias = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    bias += g.h[i] * m[i];
    for (std::size_t k = i + 1; k < m.size(); ++k) pairs += g.j[i][k] * m[i] * m[k];
  }
  return -i0 * (pairs + bias);
}

void check_clamps(const GateSpec& gate, const Clamps& clamps) {
  for (const auto& [index, value] : clamps) {
    if (index >= gate.size()) {
      throw ValidationError("clamp index " + std::to_string(index) + " outside a " +
                            std::to_string(gate.size()) + "-p-bit gate");
    }
  }
}

}  // namespace

double energy(const GateSpec& gate, std::span<const int> state, double i0) {
  if (!gate.is_symmetric()) throw ValidationError("energy: J is not symmetric");
  const RealGate g = to_real(gate);
  if (state.size() != gate.size()) throw ValidationError("energy: state has the wrong length");
  const bool bipolar = gate.convention == Convention::bipolar;
  for (int m : state) {
    if (bipolar ? (m != 1 && m != -1) : (m != 0 && m != 1)) {
      throw ValidationError(bipolar ? "energy: bipolar states are -1 or +1"
                                    : "energy: binary states are 0 or 1");
    }
  }
  return energy_of(g, state, i0);
}

double BoltzmannDistribution::probability(std::uint64_t key) const {
  auto it = std::lower_bound(probs.begin(), probs.end(), key,
                             [](const auto& entry, std::uint64_t k) { return entry.first < k; });
  return it != probs.end() && it->first == key ? it->second : 0.0;
}

Distribution BoltzmannDistribution::to_distribution() const {
  return Distribution(probs.begin(), probs.end());
}

Distribution BoltzmannDistribution::marginal(std::span<const std::size_t> bits) const {
  Distribution out;
  for (const auto& [key, p] : probs) {
    std::uint64_t m = 0;
    for (std::size_t k = 0; k < bits.size(); ++k) m |= ((key >> bits[k]) & 1u) << k;
    out[m] += p;
  }
  return out;
}

BoltzmannDistribution enumerate(const GateSpec& gate, double i0, const Clamps& clamps,
                                std::size_t budget_bits) {
  if (!gate.is_symmetric()) throw ValidationError("enumerate: J is not symmetric");
  check_clamps(gate, clamps);
  const RealGate g = to_real(gate);
  const std::size_t n = gate.size();
  if (n > 63) throw BudgetExceededError("enumerate: more than 63 p-bits");

  std::vector<std::size_t> free;
  std::uint64_t fixed_key = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto it = clamps.find(i);
    if (it == clamps.end()) {
      free.push_back(i);
    } else if (it->second) {
      fixed_key |= std::uint64_t{1} << i;
    }
  }
  if (free.size() > budget_bits) {
    throw BudgetExceededError("enumerate: " + std::to_string(free.size()) +
                              " free p-bits exceed the budget of " + std::to_string(budget_bits));
  }

  const bool bipolar = gate.convention == Convention::bipolar;
  const double weight = bipolar ? 1.0 : 2.0;
  const std::uint64_t count = std::uint64_t{1} << free.size();
  std::vector<std::pair<std::uint64_t, double>> log_weights;
  log_weights.reserve(count);
  std::vector<int> m(n);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::uint64_t c = 0; c < count; ++c) {
    std::uint64_t key = fixed_key;
    for (std::size_t k = 0; k < free.size(); ++k) key |= ((c >> k) & 1u) << free[k];
    for (std::size_t i = 0; i < n; ++i) {
      const bool up = (key >> i) & 1u;
      m[i] = up ? 1 : (bipolar ? -1 : 0);
    }
    const double lw = -weight * energy_of(g, m, i0);
    max_log = std::max(max_log, lw);
    log_weights.emplace_back(key, lw);
  }

  double z = 0;
  for (auto& [key, lw] : log_weights) {
    lw = std::exp(lw - max_log);
    z += lw;
  }
  for (auto& [key, w] : log_weights) w /= z;
  std::sort(log_weights.begin(), log_weights.end());

  BoltzmannDistribution out;
  out.i0 = i0;
  out.width = n;
  out.probs = std::move(log_weights);
  return out;
}

GibbsSampler::GibbsSampler(const GateSpec& gate, double i0, const Clamps& clamps,
                           std::uint64_t seed)
    : i0_(i0), rng_(seed) {
  if (gate.convention != Convention::bipolar) {
    throw ValidationError("GibbsSampler: gate must use the bipolar convention");
  }
  check_clamps(gate, clamps);
  RealGate g = to_real(gate);
  j_ = std::move(g.j);
  h_ = std::move(g.h);
  state_.assign(gate.size(), -1);
  clamped_.assign(gate.size(), 0);
  for (const auto& [index, value] : clamps) {
    state_[index] = value ? 1 : -1;
    clamped_[index] = 1;
  }
}

double GibbsSampler::uniform_pm1() {
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

double GibbsSampler::local_field(std::size_t i) const {
  double sum = h_[i];
  for (std::size_t k = 0; k < state_.size(); ++k) sum += j_[i][k] * state_[k];
  return i0_ * sum;
}

int GibbsSampler::update(std::size_t i) {
  if (clamped_[i]) return state_[i];
  const double drive = uniform_pm1() + std::tanh(local_field(i));
  state_[i] = drive >= 0 ? 1 : -1;
  return state_[i];
}

void GibbsSampler::sweep() {
  for (std::size_t i = 0; i < state_.size(); ++i) update(i);
}

std::uint64_t GibbsSampler::state_key() const {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < state_.size(); ++i) {
    if (state_[i] > 0) key |= std::uint64_t{1} << i;
  }
  return key;
}

Distribution reference_sample(const GateSpec& gate, double i0, const Clamps& clamps,
                              std::uint64_t sweeps, std::uint64_t seed) {
  GibbsSampler sampler(gate, i0, clamps, seed);
  StateHistogram counts;
  for (std::uint64_t s = 0; s < sweeps; ++s) {
    sampler.sweep();
    ++counts[sampler.state_key()];
  }
  return normalize(counts);
}

}  // namespace pbitemu
