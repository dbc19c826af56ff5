// SPDX-License-Identifier: Apache-2.0

#include "fdrelay/trajectory.hpp"

#include <stdexcept>

namespace fdrelay {

TrajectoryResult run_trajectory(const SystemConfig& cfg, Scheme scheme,
                                std::uint64_t seed, int realization,
                                int slots) {
  cfg.validate();
  if (slots < 1) throw std::invalid_argument("trajectory needs slots >= 1");
  if (cfg.memory.is_auto()) {
    throw std::invalid_argument(
        "trajectory: resolve memory=auto with select_memory() first");
  }

  TrajectoryResult out;
  out.scheme = scheme;
  out.path.channels.reserve(slots + 1);
  out.path.relay.reserve(slots + 1);
  out.path.channels.push_back(draw_slot_channels(cfg, seed, realization, 0));
  out.path.relay.emplace_back();  // F^(0) does not exist

  RelayHistory design(cfg.memory, cfg.n_r);
  RelayHistory actual(MemorySpec::infinite(), cfg.n_r);

  for (int t = 1; t <= slots; ++t) {
    out.path.channels.push_back(draw_slot_channels(cfg, seed, realization, t));
    const TimeSlotChannels& previous = out.path.channels[t - 1];
    const TimeSlotChannels& current = out.path.channels[t];

    if (scheme == Scheme::kHalfDuplex) {
      out.metrics.push_back(half_duplex_reference(previous, current, cfg));
      out.design_gc.push_back(SICovariance::zero(cfg.n_r));
      out.path.relay.emplace_back(CMatrix::Zero(cfg.n_r, cfg.n_r));
      continue;
    }

    const SICovariance design_gc = scheme == Scheme::kConventional
                                       ? SICovariance::zero(cfg.n_r)
                                       : residual_si_covariance(design, cfg);
    const SlotInputs in =
        SlotInputs::from_channels(previous, current, design_gc);
    AlternateOptions opts;
    opts.update_receivers = scheme != Scheme::kRelayOnly;
    BeamformingSolution sol = alternate_optimize(in, cfg, opts);

    SlotInputs scored = in;
    scored.g_c = residual_si_covariance(actual, cfg);
    const double true_mse =
        evaluate_mse(scored, sol.f_bar, sol.alpha, sol.r1, sol.r2, cfg);

    out.path.relay.push_back(sol.f);
    SlotMetrics m = achievable_sum_rate(out.path, t, sol, cfg);
    m.scheme = scheme;
    m.sum_mse = true_mse;
    m.design_mse = sol.j_value;
    out.metrics.push_back(m);
    out.design_gc.push_back(design_gc);

    design.push_slot(sol.f, previous.h_1r, previous.h_2r);
    actual.push_slot(sol.f, previous.h_1r, previous.h_2r);
    out.solutions.push_back(std::move(sol));
  }
  return out;
}

}  // namespace fdrelay
