#include "pbitemu/lfsr.hpp"

namespace pbitemu {
namespace {

// murmur3 finalizer; a bijection on 32-bit words.
std::uint32_t fmix32(std::uint32_t h) {
  h ^= h >> 16;
  h *= 0x85EBCA6Bu;
  h ^= h >> 13;
  h *= 0xC2B2AE35u;
  h ^= h >> 16;
  return h;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

FixedPoint unit_fraction(std::uint32_t sample) {
  return FixedPoint::from_raw(unit_fraction_raw(sample), kUnitFormat);
}

std::uint32_t derive_seed(std::uint64_t master, std::uint64_t index) {
  const auto base = static_cast<std::uint32_t>(splitmix64(master));
  const auto key = static_cast<std::uint32_t>(index);
  std::uint32_t seed = fmix32(base ^ key);
  if (seed == Lfsr32::kLockup) seed = fmix32(base ^ 0xFFFFFFFFu);
  return seed;
}

}  // namespace pbitemu
