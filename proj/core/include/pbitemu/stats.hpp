#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pbitemu/fixed_point.hpp"

namespace pbitemu {

/// Named group of state bits decoded as an unsigned integer. `bits[0]` is
/// the least significant bit.
struct BitGroup {
  std::string name;
  std::vector<std::size_t> bits;
};

using Histogram = std::map<std::int64_t, std::uint64_t>;
using StateHistogram = std::map<std::uint64_t, std::uint64_t>;
using Distribution = std::map<std::uint64_t, double>;

/// Append-only record of sampled state vectors, bit-packed.
class SampleLog {
 public:
  SampleLog() = default;
  explicit SampleLog(std::size_t width, std::vector<BitGroup> groups = {});

  void push(std::span<const std::uint8_t> state);
  // Concatenates another log of the same width and groups.
  void merge(const SampleLog& other);

  std::size_t width() const { return width_; }
  std::size_t size() const { return count_; }
  bool bit(std::size_t sample, std::size_t index) const;

  const std::vector<BitGroup>& groups() const { return groups_; }
  const BitGroup& group(std::string_view name) const;
  std::uint64_t decode(std::size_t sample, const BitGroup& group) const;

  // Packs the listed bits (listed[k] -> bit k of the key).
  std::uint64_t key(std::size_t sample, std::span<const std::size_t> bits) const;

 private:
  std::size_t width_ = 0;
  std::size_t words_per_sample_ = 0;
  std::size_t count_ = 0;
  std::vector<BitGroup> groups_;
  std::vector<std::uint64_t> words_;
};

/// Signed sum of group values, e.g. "S-A-B" or "A+B+C".
class GroupExpression {
 public:
  static GroupExpression parse(std::string_view text, std::span<const BitGroup> groups);

  std::int64_t evaluate(const SampleLog& log, std::size_t sample) const;
  const std::string& text() const { return text_; }

 private:
  struct Term {
    int sign;
    const BitGroup* group;
  };
  std::string text_;
  std::vector<Term> terms_;
};

Histogram histogram(const SampleLog& log, std::string_view expression);

// Joint histogram of the listed bits, keyed as in SampleLog::key.
StateHistogram state_histogram(const SampleLog& log, std::span<const std::size_t> bits);

template <typename Key, typename Count>
std::map<Key, double> normalize(const std::map<Key, Count>& counts) {
  double total = 0;
  for (const auto& [k, c] : counts) total += static_cast<double>(c);
  std::map<Key, double> out;
  if (total == 0) return out;
  for (const auto& [k, c] : counts) out[k] = static_cast<double>(c) / total;
  return out;
}

// Half the L1 distance; keys absent from one side count as zero mass.
template <typename Key>
double tv_distance(const std::map<Key, double>& p, const std::map<Key, double>& q) {
  double sum = 0;
  auto a = p.begin();
  auto b = q.begin();
  while (a != p.end() || b != q.end()) {
    if (b == q.end() || (a != p.end() && a->first < b->first)) {
      sum += std::abs(a->second);
      ++a;
    } else if (a == p.end() || b->first < a->first) {
      sum += std::abs(b->second);
      ++b;
    } else {
      sum += std::abs(a->second - b->second);
      ++a;
      ++b;
    }
  }
  return sum / 2;
}

template <typename Key, typename Count>
Key mode(const std::map<Key, Count>& counts) {
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

struct SigmoidPoint {
  FixedPoint input;
  double mean = 0;   // time-averaged binary output
  double ideal = 0;  // (tanh(u) + 1) / 2
};

// Every s[3][2] value in [-8, 7.75].
std::vector<FixedPoint> activation_grid();

// Drives a lone, unclamped p-bit tile with a fixed input (bias = u, I0 = 1)
// at each grid point and averages its output over `updates` updates.
std::vector<SigmoidPoint> sigmoid_sweep(std::uint64_t updates, std::span<const FixedPoint> grid,
                                        std::uint64_t seed);

// value,count,probability
void write_histogram_csv(std::ostream& out, const Histogram& hist);
// Same layout with the state key spelled as a bit string, first listed bit first.
void write_state_histogram_csv(std::ostream& out, const StateHistogram& hist, std::size_t bits);
std::string state_string(std::uint64_t key, std::size_t bits);

}  // namespace pbitemu
