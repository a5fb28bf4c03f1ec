#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "pbitemu/fixed_point.hpp"

namespace pbitemu {

inline constexpr FixedFormat kActivationInputFormat = FixedFormat::s(3, 2);
inline constexpr FixedFormat kActivationOutputFormat = FixedFormat::u(0, 31);

// Bounds of the lookup domain: -8 and 7.75.
FixedPoint min_tanh();
FixedPoint max_tanh();

/// z(u) = (tanh(u) + 1) / 2 tabulated on the s[3][2] grid -8, -7.75, ..., 7.75
/// and truncated to 31 fractional bits. Entry k holds u = -8 + k/4, i.e. the
/// index is u's raw mantissa plus 32.
class ActivationTable {
 public:
  static constexpr std::size_t kSize = 64;
  static constexpr std::int64_t kIndexOffset = 32;

  static const ActivationTable& standard();

  // u must be an exact s[3][2] value in [-8, 7.75].
  FixedPoint lookup(const FixedPoint& u) const;

  std::uint32_t raw_at(std::size_t index) const { return entries_[index]; }
  std::span<const std::uint32_t, kSize> raw_entries() const { return entries_; }

  // Grid input for an entry.
  static FixedPoint input_at(std::size_t index);

 private:
  ActivationTable();

  std::array<std::uint32_t, kSize> entries_{};
};

}  // namespace pbitemu
