#include <benchmark/benchmark.h>

#include "cmimo/capacity.hpp"
#include "cmimo/verification.hpp"

using namespace cmimo;

namespace {

struct FloorCase {
  ChannelMatrix h0 = random_unitary(4, 1) * diag_embed(RealVector::LinSpaced(4, 2.0, 0.5), 4, 4) *
                     random_unitary(4, 2).adjoint();
  CapacityReport rep = compound_capacity(h0, {NormKind::Spectral, 0.3}, 2.0, SumPower{4.0});
};

const FloorCase& floor_case() {
  static const FloorCase c;
  return c;
}

VerificationConfig floor_config(int threads) {
  VerificationConfig cfg;
  cfg.samples = 10000;
  cfg.seed = 5;
  cfg.threads = threads;
  return cfg;
}

void BM_FloorSerial(benchmark::State& state) {
  const FloorCase& c = floor_case();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        adversarial_mi_floor_serial(c.h0, c.rep.q_star, 0.3, 2.0, floor_config(1)).min_mi);
  }
}

void BM_FloorParallel(benchmark::State& state) {
  const FloorCase& c = floor_case();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        adversarial_mi_floor(c.h0, c.rep.q_star, 0.3, 2.0, floor_config(threads)).min_mi);
  }
}

RealVector three_modes() {
  RealVector s(3);
  s << 2.0, 1.2, 0.6;
  return s;
}

void BM_GridSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_oracle_maxmin_serial(three_modes(), 0.3, 1.0, SumPower{3.0}, 5e-3).value);
  }
}

void BM_GridParallel(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        grid_oracle_maxmin(three_modes(), 0.3, 1.0, SumPower{3.0}, 5e-3, threads).value);
  }
}

}  // namespace

BENCHMARK(BM_FloorSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FloorParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GridSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GridParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
