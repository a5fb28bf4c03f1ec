#include <benchmark/benchmark.h>

#include <vector>

#include "pbitemu/gates.hpp"
#include "pbitemu/lfsr.hpp"
#include "pbitemu/oracle.hpp"
#include "pbitemu/weighted_pbit.hpp"

namespace pbitemu {
namespace {

void BM_LfsrStep(benchmark::State& state) {
  Lfsr32 r(0xDEADBEEFu);
  for (auto _ : state) benchmark::DoNotOptimize(r.step());
}
BENCHMARK(BM_LfsrStep);

void BM_PBitUpdate(benchmark::State& state) {
  const auto row = to_binary(full_adder_5()).j[4];
  WeightedPBit p(row, FixedPoint::from_int(0, row[0].format()), default_i0(), 1);
  std::vector<std::uint8_t> others{1, 0, 1, 1, 0};
  for (auto _ : state) benchmark::DoNotOptimize(p.update(others));
}
BENCHMARK(BM_PBitUpdate);

void BM_AndSweep(benchmark::State& state) {
  auto c = build_gate_circuit(and_gate(), "and");
  for (auto _ : state) benchmark::DoNotOptimize(c.sweep());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AndSweep);

void BM_RcaSweep(benchmark::State& state) {
  auto c = build_rca(static_cast<std::size_t>(state.range(0)), full_adder_5());
  for (auto _ : state) benchmark::DoNotOptimize(c.sweep());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RcaSweep)->Arg(8)->Arg(32);

void BM_SspSweep(benchmark::State& state) {
  const std::vector<std::vector<std::uint64_t>> sets{{0, 512}, {0, 1024}, {0, 2048}};
  auto c = build_ssp(3584, sets, full_adder_14());
  for (auto _ : state) benchmark::DoNotOptimize(c.sweep());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SspSweep);

void BM_EnumerateFa14(benchmark::State& state) {
  const auto g = full_adder_14();
  for (auto _ : state) benchmark::DoNotOptimize(enumerate(g, 1.0));
}
BENCHMARK(BM_EnumerateFa14);

}  // namespace
}  // namespace pbitemu

BENCHMARK_MAIN();
