// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "fdrelay/beamforming.hpp"
#include "fdrelay/trajectory.hpp"

namespace {

using namespace fdrelay;

SlotInputs inputs(const SystemConfig& cfg) {
  const TimeSlotChannels a = draw_slot_channels(cfg, 1, 0, 0);
  const TimeSlotChannels b = draw_slot_channels(cfg, 1, 0, 1);
  return SlotInputs::from_channels(a, b, {0.3, cfg.n_r});
}

void BM_RelaySolve(benchmark::State& state) {
  const SystemConfig cfg =
      config_from_snr_inr(5, 0, 2, static_cast<int>(state.range(0)));
  const SlotInputs in = inputs(cfg);
  const BeamformingSolution start = identity_start(in, cfg);
  const SlotOperators ops =
      build_slot_operators(in, start.f, start.r1, start.r2, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_relay_beamformer(ops, cfg));
  }
}
BENCHMARK(BM_RelaySolve)->Arg(2)->Arg(5)->Arg(8);

void BM_AlternateOptimize(benchmark::State& state) {
  const SystemConfig cfg =
      config_from_snr_inr(5, 0, 2, static_cast<int>(state.range(0)));
  const SlotInputs in = inputs(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(alternate_optimize(in, cfg));
  }
}
BENCHMARK(BM_AlternateOptimize)->Arg(3)->Arg(5);

void BM_Trajectory(benchmark::State& state) {
  const SystemConfig cfg = config_from_snr_inr(5, 0, 2, 5);
  int r = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_trajectory(cfg, Scheme::kProposed, 1, r++, 10));
  }
}
BENCHMARK(BM_Trajectory)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
