#pragma once

#include <cstdint>

#include "pbitemu/circuit.hpp"
#include "pbitemu/stats.hpp"

namespace pbitemu {

// Runs `sweeps` sweeps and logs the full state after each one. The log
// carries the circuit's groups.
SampleLog collect(Circuit& circuit, std::uint64_t sweeps);

// Replica r is a copy of `prototype` reset to seed + r. Replicas run
// concurrently and their logs are concatenated in replica order, so the
// merged log is independent of scheduling.
SampleLog run_replicas(const Circuit& prototype, std::uint64_t sweeps, std::uint64_t seed,
                       std::size_t replicas);

}  // namespace pbitemu
