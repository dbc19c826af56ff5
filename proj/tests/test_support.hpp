// SPDX-License-Identifier: Apache-2.0
//
// Random instances shared by the unit and acceptance tests.

#pragma once

#include <cstdint>

#include "fdrelay/beamforming.hpp"
#include "fdrelay/channel_model.hpp"

namespace fdrelay::testing {

inline CMatrix random_matrix(SeededRng& rng, Eigen::Index rows,
                             Eigen::Index cols) {
  return rng.complex_gaussian(rows, cols);
}

// Slot inputs drawn from the channel model plus a random G_c scalar in
// [0, gc_max).
inline SlotInputs random_slot_inputs(const SystemConfig& cfg,
                                     std::uint64_t seed, double gc_max = 1.0) {
  auto rng = SeededRng::substream(seed, {0x54455354ULL});
  const TimeSlotChannels prev = draw_slot_channels(cfg, rng, 0);
  TimeSlotChannels cur = draw_slot_channels(cfg, rng, 1);
  std::uniform_real_distribution<double> u(0.0, gc_max);
  return SlotInputs::from_channels(prev, cur, {u(rng.engine()), cfg.n_r});
}

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace fdrelay::testing
