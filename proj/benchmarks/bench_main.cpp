// Microbenchmarks for the hot paths: the slot-level simulator, kernel
// assembly, the stationary solver and the identity checker.

#include <benchmark/benchmark.h>

#include "aloha2/chain.hpp"
#include "aloha2/params.hpp"
#include "aloha2/sim.hpp"

namespace {

using namespace aloha2;

const NetworkParams kParams(0.1, 0.1, 0.5, 0.5);
const NetworkParams kHeavy(0.19, 0.19, 0.5, 0.5);

void BM_SimulateHalfDuplex(benchmark::State& state) {
  const auto slots = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    sim::SimConfig config{kParams, slots, seed++, 0, sim::Mode::half_duplex};
    benchmark::DoNotOptimize(sim::simulate(config));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(slots));
}
BENCHMARK(BM_SimulateHalfDuplex)->Arg(10000)->Arg(100000);

void BM_SimulateFullDuplex(benchmark::State& state) {
  const auto slots = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    sim::SimConfig config{kParams, slots, seed++, 0, sim::Mode::full_duplex};
    benchmark::DoNotOptimize(sim::simulate(config));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(slots));
}
BENCHMARK(BM_SimulateFullDuplex)->Arg(10000)->Arg(100000);

void BM_BuildKernel(benchmark::State& state) {
  const int truncation = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(chain::build_truncated_kernel(kHeavy, truncation));
  }
}
BENCHMARK(BM_BuildKernel)->Arg(40)->Arg(120);

void BM_StationarySolve(benchmark::State& state) {
  const int truncation = static_cast<int>(state.range(0));
  const chain::TruncatedChain kernel = chain::build_truncated_kernel(kHeavy, truncation);
  for (auto _ : state) {
    benchmark::DoNotOptimize(chain::stationary_distribution(kernel));
  }
}
BENCHMARK(BM_StationarySolve)->Arg(40)->Arg(80)->Arg(120);

void BM_VerifyIdentity(benchmark::State& state) {
  const int window = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(chain::verify_theorem_identity(kParams, window));
  }
}
BENCHMARK(BM_VerifyIdentity)->Arg(10)->Arg(40);

}  // namespace

BENCHMARK_MAIN();
