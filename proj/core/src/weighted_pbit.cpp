#include "pbitemu/weighted_pbit.hpp"

#include <algorithm>
#include <bit>

#include "pbitemu/errors.hpp"

namespace pbitemu {
namespace {

constexpr int kSumFracBits = kActivationInputFormat.frac_bits;

void require_grid(const FixedPoint& v, const char* what) {
  if (v.format().frac_bits != kSumFracBits) {
    throw ValidationError(std::string(what) + " " + v.to_string() + " must use an s[x][2] format, got " +
                          v.format().to_string());
  }
}

}  // namespace

FixedPoint mux_threshold(bool select, bool clamp, const FixedPoint& sum) {
  if (select) return clamp ? max_tanh() : min_tanh();
  return saturate(sum, min_tanh(), max_tanh());
}

WeightedPBit::WeightedPBit(std::vector<FixedPoint> weights, FixedPoint bias, FixedPoint i0,
                           std::uint32_t seed)
    : weights_(std::move(weights)), bias_(bias), i0_(i0), lfsr_(seed) {
  for (const auto& w : weights_) require_grid(w, "weight");
  require_grid(bias_, "bias");
  weight_raw_.reserve(weights_.size());
  for (const auto& w : weights_) weight_raw_.push_back(w.raw());
  refresh_sum_format();
}

void WeightedPBit::refresh_sum_format() {
  int int_bits = bias_.format().int_bits;
  std::size_t terms = 1 + weights_.size();
  for (const auto& w : weights_) int_bits = std::max(int_bits, w.format().int_bits);
  if (coupling_) {
    int_bits = std::max(int_bits, coupling_->format().int_bits);
    ++terms;
  }
  // Each doubling of the term count needs one more integer bit.
  int_bits += static_cast<int>(std::bit_width(terms - 1));
  sum_format_ = FixedFormat::s(int_bits, kSumFracBits);
  sum_format_.validate();
}

FixedPoint WeightedPBit::weighted_sum(std::span<const std::uint8_t> outputs) const {
  if (outputs.size() != weight_raw_.size()) {
    throw ValidationError("weighted_sum: expected " + std::to_string(weight_raw_.size()) +
                          " outputs, got " + std::to_string(outputs.size()));
  }
  std::int64_t acc = bias_.raw();
  for (std::size_t j = 0; j < weight_raw_.size(); ++j) {
    if (outputs[j]) acc += weight_raw_[j];
  }
  if (coupling_ && coupling_input_) acc += coupling_->raw();
  return scale(FixedPoint::from_raw(acc, sum_format_), i0_);
}

void WeightedPBit::evaluate(std::span<const std::uint8_t> outputs) {
  const FixedPoint u = threshold(weighted_sum(outputs));
  activation_raw_ = ActivationTable::standard().raw_at(
      static_cast<std::size_t>(u.raw() + ActivationTable::kIndexOffset));
  pending_ = true;
}

std::uint8_t WeightedPBit::compare() {
  output_ = unit_fraction_raw(lfsr_.state()) < activation_raw_ ? 1 : 0;
  pending_ = false;
  return output_;
}

std::uint8_t WeightedPBit::update(std::span<const std::uint8_t> outputs) {
  evaluate(outputs);
  advance_rng_to(rng_shifts_ + 1);
  return compare();
}

void WeightedPBit::advance_rng_to(std::uint64_t shifts) {
  if (shifts < rng_shifts_) throw ValidationError("LFSR cannot run backwards");
  lfsr_.advance(shifts - rng_shifts_);
  rng_shifts_ = shifts;
}

void WeightedPBit::reseed(std::uint32_t seed) {
  lfsr_ = Lfsr32(seed);
  rng_shifts_ = 0;
}

void WeightedPBit::set_clamp(ClampValue value) {
  select_ = value != ClampValue::floating;
  clamp_ = value == ClampValue::one;
}

ClampValue WeightedPBit::clamp_value() const {
  if (!select_) return ClampValue::floating;
  return clamp_ ? ClampValue::one : ClampValue::zero;
}

void WeightedPBit::set_coupling(FixedPoint strength) {
  require_grid(strength, "coupling strength");
  coupling_ = strength;
  refresh_sum_format();
}

void WeightedPBit::clear_coupling() {
  coupling_.reset();
  coupling_input_ = 0;
  refresh_sum_format();
}

FixedPoint WeightedPBit::latched_activation() const {
  return FixedPoint::from_raw(activation_raw_, kActivationOutputFormat);
}

}  // namespace pbitemu
