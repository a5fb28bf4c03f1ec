#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>

#include "pbitemu/errors.hpp"
#include "pbitemu/fixed_point.hpp"

namespace pbitemu {

// Tap positions are 1-indexed: position 1 is the least significant bit.
constexpr std::uint32_t tap_mask(std::initializer_list<unsigned> positions) {
  std::uint32_t mask = 0;
  for (unsigned p : positions) mask |= std::uint32_t{1} << (p - 1);
  return mask;
}

/// Fibonacci shift register with XNOR feedback.
///
/// Each step shifts toward the MSB and feeds XNOR(taps) into position 1.
/// With XNOR feedback the all-ones word is the lock-up state, so every other
/// word (including zero) is a legal seed and a maximal tap set cycles through
/// all 2^Width - 1 of them.
template <unsigned Width, std::uint32_t Taps>
class XnorLfsr {
  static_assert(Width >= 2 && Width <= 32);

 public:
  static constexpr std::uint32_t kMask =
      Width == 32 ? 0xFFFFFFFFu : ((std::uint32_t{1} << Width) - 1);
  static constexpr std::uint32_t kLockup = kMask;
  static constexpr std::uint32_t kTaps = Taps;

  explicit XnorLfsr(std::uint32_t seed = 0) : state_(seed) {
    if ((seed & ~kMask) != 0 || seed == kLockup) {
      throw ValidationError("invalid LFSR seed " + std::to_string(seed) +
                            " (all-ones is the XNOR lock-up state)");
    }
  }

  // One shift; returns the register contents after the shift.
  std::uint32_t step() {
    const std::uint32_t feedback = ~static_cast<std::uint32_t>(std::popcount(state_ & Taps)) & 1u;
    state_ = ((state_ << 1) | feedback) & kMask;
    return state_;
  }

  void advance(std::uint64_t shifts) {
    for (std::uint64_t i = 0; i < shifts; ++i) step();
  }

  std::uint32_t state() const { return state_; }

  friend bool operator==(const XnorLfsr&, const XnorLfsr&) = default;

 private:
  std::uint32_t state_;
};

// 32-bit register with taps 32, 22, 2, 1.
using Lfsr32 = XnorLfsr<32, tap_mask({32, 22, 2, 1})>;

inline constexpr FixedFormat kUnitFormat = FixedFormat::u(0, 31);

// The comparator's view of a 32-bit sample: its top 31 bits as a fraction in [0, 1).
inline std::uint32_t unit_fraction_raw(std::uint32_t sample) { return sample >> 1; }
FixedPoint unit_fraction(std::uint32_t sample);

// Steps once and returns the new sample as an s[0][31] fraction.
inline FixedPoint next_uniform(Lfsr32& lfsr) { return unit_fraction(lfsr.step()); }

// Distinct per-index seeds from one master seed. Never returns all-ones, and
// distinct indices below 2^32 - 1 always map to distinct seeds.
std::uint32_t derive_seed(std::uint64_t master, std::uint64_t index);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace pbitemu
