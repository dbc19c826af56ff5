// SPDX-License-Identifier: Apache-2.0
//
// One Monte Carlo realisation: slots 0..T of a single scheme.

#pragma once

#include <cstdint>
#include <vector>

#include "fdrelay/beamforming.hpp"
#include "fdrelay/metrics.hpp"
#include "fdrelay/si_propagation.hpp"

namespace fdrelay {

struct TrajectoryResult {
  Scheme scheme = Scheme::kProposed;
  // metrics[k] and solutions[k] belong to slot k + 1. The half-duplex
  // reference records metrics only.
  std::vector<SlotMetrics> metrics;
  std::vector<BeamformingSolution> solutions;
  // G_c handed to the optimiser in each slot (zero for conventional).
  std::vector<SICovariance> design_gc;
  RealizedPath path;
};

// Slot 0 only draws channels (the relay is silent). Each slot t >= 1 then
// computes G_c from the relay history, runs the alternating design and scores
// it. Channels come from the keyed stream (seed, realization, slot), so every
// scheme sees the same draws. cfg.memory must not be kAuto.
TrajectoryResult run_trajectory(const SystemConfig& cfg, Scheme scheme,
                                std::uint64_t seed, int realization,
                                int slots);

}  // namespace fdrelay
