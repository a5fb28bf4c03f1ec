#include "pbitemu/activation_table.hpp"

#include <cmath>

#include "pbitemu/errors.hpp"

namespace pbitemu {

FixedPoint min_tanh() { return FixedPoint::from_raw(-32, kActivationInputFormat); }
FixedPoint max_tanh() { return FixedPoint::from_raw(31, kActivationInputFormat); }

ActivationTable::ActivationTable() {
  for (std::size_t k = 0; k < kSize; ++k) {
    const long double u = static_cast<long double>(static_cast<std::int64_t>(k) - kIndexOffset) / 4;
    // (tanh(u) + 1) / 2 == 1 / (1 + e^{-2u}); the latter keeps full precision near z = 0.
    const long double z = 1.0L / (1.0L + std::exp(-2.0L * u));
    entries_[k] = static_cast<std::uint32_t>(std::floor(std::ldexp(z, 31)));
  }
}

const ActivationTable& ActivationTable::standard() {
  static const ActivationTable table;
  return table;
}

FixedPoint ActivationTable::input_at(std::size_t index) {
  return FixedPoint::from_raw(static_cast<std::int64_t>(index) - kIndexOffset,
                              kActivationInputFormat);
}

FixedPoint ActivationTable::lookup(const FixedPoint& u) const {
  if (u.format().frac_bits != kActivationInputFormat.frac_bits || u < min_tanh() ||
      u > max_tanh()) {
    throw ValidationError("activation input " + u.to_string() + " " + u.format().to_string() +
                          " is not on the s[3][2] grid");
  }
  const auto index = static_cast<std::size_t>(u.raw() + kIndexOffset);
  return FixedPoint::from_raw(entries_[index], kActivationOutputFormat);
}

}  // namespace pbitemu
