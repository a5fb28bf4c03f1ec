#include "pbitemu/experiment.hpp"

#include <future>

#include "pbitemu/errors.hpp"

namespace pbitemu {

SampleLog collect(Circuit& circuit, std::uint64_t sweeps) {
  SampleLog log(circuit.pbit_count(), circuit.groups());
  std::vector<std::uint8_t> state(circuit.pbit_count());
  const std::uint64_t cycles = circuit.sweep_cycles();
  for (std::uint64_t s = 0; s < sweeps; ++s) {
    circuit.run_cycles(cycles);
    circuit.read_state(state);
    log.push(state);
  }
  return log;
}

SampleLog run_replicas(const Circuit& prototype, std::uint64_t sweeps, std::uint64_t seed,
                       std::size_t replicas) {
  if (replicas == 0) throw ValidationError("need at least one replica");
  std::vector<std::future<SampleLog>> jobs;
  jobs.reserve(replicas);
  for (std::size_t r = 0; r < replicas; ++r) {
    jobs.push_back(std::async(std::launch::async, [&prototype, sweeps, seed, r] {
      Circuit circuit = prototype;
      circuit.reset(seed + r);
      return collect(circuit, sweeps);
    }));
  }
  SampleLog merged = jobs.front().get();
  for (std::size_t r = 1; r < replicas; ++r) merged.merge(jobs[r].get());
  return merged;
}

}  // namespace pbitemu
