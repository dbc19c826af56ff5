// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fdrelay/metrics.hpp"
#include "fdrelay/trajectory.hpp"
#include "test_support.hpp"

namespace fdrelay {
namespace {

constexpr double kNoLoopback = -std::numeric_limits<double>::infinity();

TEST(Scheme, NamesRoundtrip) {
  for (Scheme s : {Scheme::kProposed, Scheme::kConventional,
                   Scheme::kRelayOnly, Scheme::kHalfDuplex}) {
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  }
  EXPECT_THROW(parse_scheme("mmse"), std::invalid_argument);
}

TEST(DuplexMode, FullDuplexOnlyWhenStrictlyBetter) {
  EXPECT_EQ(duplex_mode_select(2.0, 1.0), DuplexMode::kFullDuplex);
  EXPECT_EQ(duplex_mode_select(0.9, 1.0), DuplexMode::kHalfDuplex);
  EXPECT_EQ(duplex_mode_select(1.0, 1.0), DuplexMode::kHalfDuplex);
  EXPECT_EQ(to_string(DuplexMode::kFullDuplex), "FD");
}

TEST(Rates, SilentSourcesCarryNothing) {
  SystemConfig cfg = config_from_snr_inr(5, 0, 2, 3);
  const SlotInputs in = testing::random_slot_inputs(cfg, 1);
  const BeamformingSolution sol = alternate_optimize(in, cfg);
  SystemConfig silent = cfg;
  silent.p1 = silent.p2 = 0.0;
  const CMatrix zs = CMatrix::Zero(2, 2);
  const SourceRates r =
      achievable_rates(in, sol, zs, zs, CMatrix::Zero(3, 3), silent);
  EXPECT_EQ(r.sum(), 0.0);
}

TEST(Rates, ScalarByHand) {
  SystemConfig cfg = config_from_snr_inr(5, 0, 1, 1);
  const SlotInputs in = testing::random_slot_inputs(cfg, 2);
  BeamformingSolution sol;
  sol.f_bar = CMatrix::Identity(1, 1);
  sol.alpha = 0.8;
  sol.r1 = sol.r2 = CMatrix::Identity(1, 1);
  CMatrix d11(1, 1), d22(1, 1), g0(1, 1);
  d11(0, 0) = Complex(0.2, 0.1);
  d22(0, 0) = Complex(-0.3, 0.0);
  g0(0, 0) = 0.4;
  const SourceRates r = achievable_rates(in, sol, d11, d22, g0, cfg);
  const double a1 = std::norm(in.h_r1(0, 0)) * (cfg.sigma_n_sq_r + 0.4) +
                    (cfg.p1 * std::norm(d11(0, 0)) + cfg.sigma_n_sq_1) /
                        (sol.alpha * sol.alpha);
  const double s1 = cfg.p2 * std::norm(in.h_r1(0, 0) * in.h_2r_prev(0, 0));
  EXPECT_NEAR(r.at_source1, std::log2(1.0 + s1 / a1), 1e-12);
}

TEST(Rates, ReceiverCancelsWhenInvertible) {
  SystemConfig cfg = config_from_snr_inr(5, 0, 2, 3);
  const SlotInputs in = testing::random_slot_inputs(cfg, 3);
  BeamformingSolution sol = alternate_optimize(in, cfg);
  const CMatrix zs = CMatrix::Zero(2, 2);
  const CMatrix z3 = CMatrix::Zero(3, 3);
  const double base = achievable_rates(in, sol, zs, zs, z3, cfg).sum();
  auto rng = SeededRng::substream(3, {1});
  sol.r1 = rng.complex_gaussian(2, 2);
  sol.r2 = rng.complex_gaussian(2, 2);
  EXPECT_NEAR(achievable_rates(in, sol, zs, zs, z3, cfg).sum(), base,
              1e-10 * base);
}

TEST(RelayInterference, ZeroAtFirstSlotAndOneHopLater) {
  SystemConfig cfg = config_from_snr_inr(5, 0, 2, 3);
  const TrajectoryResult traj = run_trajectory(cfg, Scheme::kProposed, 4, 0, 2);
  EXPECT_EQ(realized_relay_interference(traj.path, 1, cfg).norm(), 0.0);
  const auto& ch0 = traj.path.channels[0];
  const CMatrix q = ch0.h_1r * ch0.h_1r.adjoint() +
                    ch0.h_2r * ch0.h_2r.adjoint() +
                    cfg.sigma_n_sq_r * CMatrix::Identity(3, 3);
  const CMatrix hop = traj.path.channels[1].delta_rr * traj.path.relay[1];
  EXPECT_LE(testing::max_abs(realized_relay_interference(traj.path, 2, cfg) -
                             hop * q * hop.adjoint()),
            1e-12 * (hop * q * hop.adjoint()).norm());
}

TEST(HalfDuplex, HalfTheLoopbackFreeFullDuplexRate) {
  SystemConfig cfg = config_from_snr_inr(10, kNoLoopback, 2, 3);
  const TrajectoryResult fd = run_trajectory(cfg, Scheme::kProposed, 5, 0, 3);
  const TrajectoryResult hd = run_trajectory(cfg, Scheme::kHalfDuplex, 5, 0, 3);
  for (std::size_t k = 0; k < fd.metrics.size(); ++k) {
    EXPECT_NEAR(hd.metrics[k].sum_rate, 0.5 * fd.metrics[k].sum_rate,
                1e-9 * fd.metrics[k].sum_rate);
    EXPECT_EQ(hd.metrics[k].scheme, Scheme::kHalfDuplex);
  }
}

TEST(HalfDuplex, IgnoresLoopbackError) {
  const SystemConfig noisy = config_from_snr_inr(10, 10, 2, 3);
  const SystemConfig clean = config_from_snr_inr(10, kNoLoopback, 2, 3);
  const TimeSlotChannels a0 = draw_slot_channels(noisy, 6, 0, 0);
  const TimeSlotChannels a1 = draw_slot_channels(noisy, 6, 0, 1);
  const TimeSlotChannels b0 = draw_slot_channels(clean, 6, 0, 0);
  const TimeSlotChannels b1 = draw_slot_channels(clean, 6, 0, 1);
  EXPECT_DOUBLE_EQ(half_duplex_reference(a0, a1, noisy).sum_rate,
                   half_duplex_reference(b0, b1, clean).sum_rate);
}

}  // namespace
}  // namespace fdrelay
