#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pbitemu/activation_table.hpp"
#include "pbitemu/fixed_point.hpp"
#include "pbitemu/lfsr.hpp"

namespace pbitemu {

enum class ClampValue { zero, one, floating };

// Format used for I0 when it is read from text; I0 = 1 is the default everywhere.
inline constexpr FixedFormat kI0Format = FixedFormat::s(7, 8);
inline FixedPoint default_i0() { return FixedPoint::from_int(1, kI0Format); }

/// The weight-matrix multiplexer. With select high the output is pinned to
/// the clamp rail; otherwise the sum passes through, saturated to the
/// activation domain [-8, 7.75].
///
///   S C  >max <min | out
///   0 x   0    0   | sum
///   0 x   0    1   | min_tanh
///   0 x   1    0   | max_tanh
///   1 0   x    x   | min_tanh
///   1 1   x    x   | max_tanh
///
/// `sum` must have two fractional bits.
FixedPoint mux_threshold(bool select, bool clamp, const FixedPoint& sum);

/// One p-bit with its local weight row, bias, clamp controls and LFSR.
///
/// Outputs are binary (0/1); weights and bias use the binary convention and
/// must be s[x][2] values. An update is split the way the hardware does it:
/// evaluate() forms I0 * (h + sum_j J_j m_j + h_C m_C), thresholds it and
/// latches the table output, and compare() tests the LFSR register against
/// it and latches m.
class WeightedPBit {
 public:
  WeightedPBit(std::vector<FixedPoint> weights, FixedPoint bias, FixedPoint i0,
               std::uint32_t seed);

  // I0 * (h + sum_j J_j m_j [+ h_C m_C]) in a widened format, truncated to two
  // fractional bits.
  FixedPoint weighted_sum(std::span<const std::uint8_t> outputs) const;

  FixedPoint threshold(const FixedPoint& sum) const {
    return mux_threshold(select_, clamp_, sum);
  }

  // Cycle 1: sum, MUX and table lookup from a snapshot of the other outputs.
  void evaluate(std::span<const std::uint8_t> outputs);

  // Cycle 2: m = 1 iff the register's fraction is strictly below the latched
  // activation. Does not shift the register.
  std::uint8_t compare();

  // Standalone update: evaluate, shift the LFSR once, compare.
  std::uint8_t update(std::span<const std::uint8_t> outputs);

  // Brings the free-running register to `shifts` total shifts since seeding.
  void advance_rng_to(std::uint64_t shifts);

  void reseed(std::uint32_t seed);

  void set_clamp(ClampValue value);
  void set_select(bool select) { select_ = select; }
  void set_clamp_level(bool clamp) { clamp_ = clamp; }

  // m_C input weighted by h_C. Strength must have two fractional bits.
  void set_coupling(FixedPoint strength);
  void clear_coupling();
  void set_coupling_input(std::uint8_t bit) { coupling_input_ = bit; }

  std::uint8_t output() const { return output_; }
  void set_output(std::uint8_t bit) { output_ = bit; }
  bool select() const { return select_; }
  bool clamp_level() const { return clamp_; }
  ClampValue clamp_value() const;
  bool pending() const { return pending_; }
  FixedPoint latched_activation() const;

  std::span<const FixedPoint> weights() const { return weights_; }
  const FixedPoint& bias() const { return bias_; }
  const FixedPoint& i0() const { return i0_; }
  const std::optional<FixedPoint>& coupling() const { return coupling_; }
  std::uint8_t coupling_input() const { return coupling_input_; }
  const Lfsr32& lfsr() const { return lfsr_; }
  std::uint64_t rng_shifts() const { return rng_shifts_; }

 private:
  void refresh_sum_format();

  std::vector<FixedPoint> weights_;
  FixedPoint bias_;
  FixedPoint i0_;
  std::optional<FixedPoint> coupling_;
  std::uint8_t coupling_input_ = 0;

  std::vector<std::int64_t> weight_raw_;
  FixedFormat sum_format_{};

  bool select_ = false;
  bool clamp_ = false;

  Lfsr32 lfsr_;
  std::uint64_t rng_shifts_ = 0;

  std::uint32_t activation_raw_ = 0;
  bool pending_ = false;
  std::uint8_t output_ = 0;
};

}  // namespace pbitemu
