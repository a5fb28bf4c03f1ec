#include "pbitemu/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>

#include "pbitemu/circuit.hpp"
#include "pbitemu/errors.hpp"

namespace pbitemu {
namespace {


std::string format_double(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

bool is_space(char c) { return c == ' ' || c == '\t'; }

}  // namespace

SampleLog::SampleLog(std::size_t width, std::vector<BitGroup> groups)
    : width_(width), words_per_sample_((width + 63) / 64), groups_(std::move(groups)) {
  for (const auto& g : groups_) {
    if (g.bits.empty() || g.bits.size() > 63) {
      throw ValidationError("group '" + g.name + "' must have 1..63 bits");
    }
    for (std::size_t b : g.bits) {
      if (b >= width_) {
        throw ValidationError("group '" + g.name + "' refers to bit " + std::to_string(b) +
                              " of a " + std::to_string(width_) + "-bit state");
      }
    }
  }
}

void SampleLog::push(std::span<const std::uint8_t> state) {
  if (state.size() != width_) {
    throw ValidationError("sample has " + std::to_string(state.size()) + " bits, log expects " +
                          std::to_string(width_));
  }
  const std::size_t base = words_.size();
  words_.resize(base + words_per_sample_, 0);
  for (std::size_t i = 0; i < width_; ++i) {
    if (state[i]) words_[base + i / 64] |= std::uint64_t{1} << (i % 64);
  }
  ++count_;
}

void SampleLog::merge(const SampleLog& other) {
  if (other.width_ != width_ || other.groups_.size() != groups_.size()) {
    throw ValidationError("cannot merge logs with different layouts");
  }
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (groups_[g].name != other.groups_[g].name || groups_[g].bits != other.groups_[g].bits) {
      throw ValidationError("cannot merge logs with different groups");
    }
  }
  words_.insert(words_.end(), other.words_.begin(), other.words_.end());
  count_ += other.count_;
}

bool SampleLog::bit(std::size_t sample, std::size_t index) const {
  return (words_[sample * words_per_sample_ + index / 64] >> (index % 64)) & 1u;
}

const BitGroup& SampleLog::group(std::string_view name) const {
  for (const auto& g : groups_) {
    if (g.name == name) return g;
  }
  throw ValidationError("unknown group '" + std::string(name) + "'");
}

std::uint64_t SampleLog::decode(std::size_t sample, const BitGroup& group) const {
  return key(sample, group.bits);
}

std::uint64_t SampleLog::key(std::size_t sample, std::span<const std::size_t> bits) const {
  std::uint64_t out = 0;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    out |= static_cast<std::uint64_t>(bit(sample, bits[k])) << k;
  }
  return out;
}

GroupExpression GroupExpression::parse(std::string_view text, std::span<const BitGroup> groups) {
  GroupExpression expr;
  expr.text_ = std::string(text);
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && is_space(text[pos])) ++pos;
  };
  // Accepts '+', '-' and U+2212.
  auto read_sign = [&]() -> int {
    skip();
    if (pos < text.size() && text[pos] == '+') {
      ++pos;
      return 1;
    }
    if (pos < text.size() && text[pos] == '-') {
      ++pos;
      return -1;
    }
    if (text.substr(pos, 3) == "\xE2\x88\x92") {
      pos += 3;
      return -1;
    }
    return 0;
  };

  // Bound on |partial sum|: the sum of the largest value of every term.
  std::uint64_t magnitude = 0;
  bool overflow = false;
  bool first = true;
  while (true) {
    int sign = read_sign();
    if (sign == 0) {
      if (!first) throw ValidationError("expression '" + expr.text_ + "': expected + or -");
      sign = 1;
    }
    skip();
    const std::size_t start = pos;
    while (pos < text.size() && !is_space(text[pos]) && text[pos] != '+' && text[pos] != '-' &&
           text.substr(pos, 3) != "\xE2\x88\x92") {
      ++pos;
    }
    const std::string_view name = text.substr(start, pos - start);
    if (name.empty()) throw ValidationError("expression '" + expr.text_ + "': missing group name");
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const BitGroup& g) { return g.name == name; });
    if (it == groups.end()) {
      throw ValidationError("expression '" + expr.text_ + "': unknown group '" +
                            std::string(name) + "'");
    }
    expr.terms_.push_back({sign, &*it});
    const std::uint64_t largest = (std::uint64_t{1} << it->bits.size()) - 1;
    overflow |= largest > static_cast<std::uint64_t>(INT64_MAX) - magnitude;
    if (!overflow) magnitude += largest;
    first = false;
    skip();
    if (pos == text.size()) break;
  }
  if (overflow) {
    throw ValidationError("expression '" + expr.text_ + "' may overflow 64-bit arithmetic");
  }
  return expr;
}

std::int64_t GroupExpression::evaluate(const SampleLog& log, std::size_t sample) const {
  std::int64_t total = 0;
  for (const auto& term : terms_) {
    total += term.sign * static_cast<std::int64_t>(log.decode(sample, *term.group));
  }
  return total;
}

Histogram histogram(const SampleLog& log, std::string_view expression) {
  const auto expr = GroupExpression::parse(expression, log.groups());
  Histogram out;
  for (std::size_t s = 0; s < log.size(); ++s) ++out[expr.evaluate(log, s)];
  return out;
}

StateHistogram state_histogram(const SampleLog& log, std::span<const std::size_t> bits) {
  if (bits.size() > 64) throw ValidationError("state_histogram: at most 64 bits");
  for (std::size_t b : bits) {
    if (b >= log.width()) throw ValidationError("state_histogram: bit outside the state");
  }
  StateHistogram out;
  for (std::size_t s = 0; s < log.size(); ++s) ++out[log.key(s, bits)];
  return out;
}

std::vector<FixedPoint> activation_grid() {
  std::vector<FixedPoint> grid;
  for (std::int64_t raw = kActivationInputFormat.raw_min(); raw <= kActivationInputFormat.raw_max();
       ++raw) {
    grid.push_back(FixedPoint::from_raw(raw, kActivationInputFormat));
  }
  return grid;
}

std::vector<SigmoidPoint> sigmoid_sweep(std::uint64_t updates, std::span<const FixedPoint> grid,
                                        std::uint64_t seed) {
  if (updates == 0) throw ValidationError("sigmoid_sweep: need at least one update");
  const FixedPoint i0 = default_i0();
  std::vector<SigmoidPoint> out;
  out.reserve(grid.size());
  for (const auto& u : grid) {
    const FixedPoint bias = convert(u, kActivationInputFormat);
    std::vector<WeightedPBit> pbits;
    pbits.emplace_back(std::vector<FixedPoint>{FixedPoint::from_int(0, kActivationInputFormat)},
                       bias, i0, 0);
    Circuit circuit(i0);
    circuit.add_tile(Tile("p", std::move(pbits), {"m"}));
    circuit.reset(seed);
    std::uint64_t ones = 0;
    for (std::uint64_t k = 0; k < updates; ++k) ones += circuit.sweep()[0];
    out.push_back({bias, static_cast<double>(ones) / static_cast<double>(updates),
                   (std::tanh(bias.to_double()) + 1) / 2});
  }
  return out;
}

void write_histogram_csv(std::ostream& out, const Histogram& hist) {
  std::uint64_t total = 0;
  for (const auto& [v, c] : hist) total += c;
  out << "value,count,probability\n";
  for (const auto& [v, c] : hist) {
    out << v << ',' << c << ',' << format_double(static_cast<double>(c) / static_cast<double>(total))
        << '\n';
  }
}

std::string state_string(std::uint64_t key, std::size_t bits) {
  std::string s(bits, '0');
  for (std::size_t k = 0; k < bits; ++k) {
    if ((key >> k) & 1u) s[k] = '1';
  }
  return s;
}

void write_state_histogram_csv(std::ostream& out, const StateHistogram& hist, std::size_t bits) {
  std::uint64_t total = 0;
  for (const auto& [v, c] : hist) total += c;
  out << "value,count,probability\n";
  for (const auto& [v, c] : hist) {
    out << state_string(v, bits) << ',' << c << ','
        << format_double(static_cast<double>(c) / static_cast<double>(total)) << '\n';
  }
}

}  // namespace pbitemu
