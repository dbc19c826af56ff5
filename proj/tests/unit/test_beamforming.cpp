// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "fdrelay/beamforming.hpp"
#include "test_support.hpp"

namespace fdrelay {
namespace {

using testing::max_abs;
using testing::random_slot_inputs;

CMatrix eye(int n) { return CMatrix::Identity(n, n); }

TEST(SlotOperators, NoiseScalarExample) {
  // N_s = 2, sigma_n^2 = 1, sigma_e^2 = 0, R = I: w_f = 2 + 2.
  SystemConfig cfg = config_from_snr_inr(
      0, -std::numeric_limits<double>::infinity(), 2, 3);
  const SlotInputs in = random_slot_inputs(cfg, 1);
  const SlotOperators ops = build_slot_operators(in, eye(3), eye(2), eye(2), cfg);
  EXPECT_DOUBLE_EQ(ops.w_f_scalar, 4.0);
}

TEST(SlotOperators, CovariancesWithSilentSources) {
  SystemConfig cfg = config_from_snr_inr(5, 0, 2, 3);
  cfg.p1 = cfg.p2 = 0.0;
  const SlotInputs in = random_slot_inputs(cfg, 2);
  const SlotOperators ops = build_slot_operators(in, eye(3), eye(2), eye(2), cfg);
  const CMatrix expected = (in.g_c.scalar_form + cfg.sigma_n_sq_r) * eye(3);
  EXPECT_LE(max_abs(ops.g1 - expected), 1e-15);
  EXPECT_LE(max_abs(ops.g2 - expected), 1e-15);
  EXPECT_LE(max_abs(ops.gr - expected), 1e-15);
}

TEST(SlotOperators, RelayCovarianceSplits) {
  // G_r - G_1 = p1 H_1r H_1r^H.
  SystemConfig cfg = config_from_snr_inr(5, 0, 2, 4);
  const SlotInputs in = random_slot_inputs(cfg, 3);
  const SlotOperators ops = build_slot_operators(in, eye(4), eye(2), eye(2), cfg);
  EXPECT_LE(max_abs(ops.gr - ops.g1 -
                    cfg.p1 * in.h_1r_prev * in.h_1r_prev.adjoint()),
            1e-12);
  EXPECT_TRUE(is_hermitian(ops.gr));
}

TEST(SlotOperators, RejectsMismatchedShapes) {
  SystemConfig cfg = config_from_snr_inr(5, 0, 2, 3);
  const SlotInputs in = random_slot_inputs(cfg, 4);
  EXPECT_THROW(build_slot_operators(in, eye(2), eye(2), eye(2), cfg),
               DimensionMismatch);
  EXPECT_THROW(build_slot_operators(in, eye(3), eye(3), eye(2), cfg),
               DimensionMismatch);
}

TEST(RelayBeamformer, ZeroDesiredSignalIsDegenerate) {
  SystemConfig cfg = config_from_snr_inr(5, 0, 2, 3);
  const SlotInputs in = random_slot_inputs(cfg, 5);
  const CMatrix zero = CMatrix::Zero(2, 2);
  const SlotOperators ops = build_slot_operators(in, eye(3), zero, zero, cfg);
  EXPECT_THROW(solve_relay_beamformer(ops, cfg), DegenerateObjective);
}

TEST(RelayBeamformer, ScalarAmplification) {
  // N_r = 1: |F_bar| = 1, so alpha^2 = p_r / g_r.
  SystemConfig cfg = config_from_snr_inr(5, 0, 1, 1);
  const SlotInputs in = random_slot_inputs(cfg, 6);
  const SlotOperators ops = build_slot_operators(in, eye(1), eye(1), eye(1), cfg);
  const RelayUpdate u = solve_relay_beamformer(ops, cfg);
  EXPECT_NEAR(std::abs(u.f_bar(0, 0)), 1.0, 1e-14);
  EXPECT_NEAR(u.alpha * u.alpha, cfg.pr / ops.gr(0, 0).real(), 1e-12);
}

TEST(RelayBeamformer, StationarityPowerAndMultiplier) {
  for (std::uint64_t seed = 10; seed < 30; ++seed) {
    SystemConfig cfg = config_from_snr_inr(5, 0, 2, 3);
    const SlotInputs in = random_slot_inputs(cfg, seed);
    auto rng = SeededRng::substream(seed, {7});
    const SlotOperators ops =
        build_slot_operators(in, rng.complex_gaussian(3, 3),
                             rng.complex_gaussian(2, 2),
                             rng.complex_gaussian(2, 2), cfg);
    const RelayUpdate u = solve_relay_beamformer(ops, cfg);
    EXPECT_LE(relay_stationarity_residual(ops, u.f_bar_raw, cfg),
              1e-8 * ops.w_f0.norm());
    const CMatrix f = u.f();
    const double power = (f * ops.gr * f.adjoint()).trace().real();
    EXPECT_NEAR(power, cfg.n_r * cfg.pr, 1e-9 * cfg.n_r * cfg.pr);
    EXPECT_NEAR(u.lambda * u.alpha * u.alpha,
                ops.w_f_scalar / (cfg.n_r * cfg.pr),
                1e-10 * ops.w_f_scalar);
  }
}

TEST(ReceiveBeamformer, ZeroRelayGivesZeroReceiver) {
  SystemConfig cfg = config_from_snr_inr(5, 0, 2, 3);
  const SlotInputs in = random_slot_inputs(cfg, 31);
  const ReceiveUpdate rx =
      solve_receive_beamformers(in, CMatrix::Zero(3, 3), 1.0, cfg);
  EXPECT_EQ(max_abs(rx.r1), 0.0);
  EXPECT_EQ(max_abs(rx.r2), 0.0);
}

TEST(ReceiveBeamformer, ScalarWiener) {
  SystemConfig cfg = config_from_snr_inr(5, 0, 1, 1);
  const SlotInputs in = random_slot_inputs(cfg, 32);
  const CMatrix f_bar = eye(1);
  const double alpha = 0.7;
  const ReceiveUpdate rx = solve_receive_beamformers(in, f_bar, alpha, cfg);
  const Complex h = in.h_r1(0, 0) * alpha;
  const double g1 = in.g_c.scalar_form + cfg.sigma_n_sq_r +
                    cfg.p2 * std::norm(in.h_2r_prev(0, 0));
  const double floor1 = cfg.p1 * cfg.sigma_e_sq_1 + cfg.sigma_n_sq_1;
  const Complex expected =
      alpha * cfg.p2 * h * in.h_2r_prev(0, 0) / (std::norm(h) * g1 + floor1);
  EXPECT_LE(std::abs(rx.r1(0, 0) - expected), 1e-12 * std::abs(expected));
}

TEST(ReceiveBeamformer, MatchesFiniteDifferenceStationarity) {
  SystemConfig cfg = config_from_snr_inr(5, 0, 2, 3);
  const SlotInputs in = random_slot_inputs(cfg, 33);
  auto rng = SeededRng::substream(33, {1});
  CMatrix f_bar = rng.complex_gaussian(3, 3);
  f_bar /= f_bar.norm();
  const double alpha = 1.3;
  const ReceiveUpdate rx = solve_receive_beamformers(in, f_bar, alpha, cfg);
  const SlotOperators ops = build_slot_operators(in, alpha * f_bar, rx.r1,
                                                 rx.r2, cfg);
  const double h = 1e-5;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (Complex dir : {Complex(1, 0), Complex(0, 1)}) {
        CMatrix plus = rx.r1, minus = rx.r1;
        plus(i, j) += h * dir;
        minus(i, j) -= h * dir;
        const double d =
            (evaluate_mse_receive_form(ops, alpha, plus, rx.r2, cfg) -
             evaluate_mse_receive_form(ops, alpha, minus, rx.r2, cfg)) /
            (2 * h);
        EXPECT_LE(std::abs(d), 1e-6);
      }
    }
  }
}

TEST(Objective, SilentRelayGivesSignalPower) {
  SystemConfig cfg = config_from_snr_inr(5, 0, 2, 3);
  const SlotInputs in = random_slot_inputs(cfg, 40);
  const CMatrix zero = CMatrix::Zero(2, 2);
  const CMatrix f_bar = eye(3) / std::sqrt(3.0);
  EXPECT_NEAR(evaluate_mse(in, f_bar, 1.0, zero, zero, cfg),
              cfg.n_s * (cfg.p1 + cfg.p2), 1e-12);
}

TEST(Objective, BothFormsAgree) {
  SystemConfig cfg = config_from_snr_inr(0, -3, 2, 4);
  const SlotInputs in = random_slot_inputs(cfg, 41);
  auto rng = SeededRng::substream(41, {1});
  CMatrix f_bar = rng.complex_gaussian(4, 4);
  f_bar /= f_bar.norm();
  const CMatrix r1 = rng.complex_gaussian(2, 2);
  const CMatrix r2 = rng.complex_gaussian(2, 2);
  const double alpha = 0.9;
  const SlotOperators ops = build_slot_operators(in, alpha * f_bar, r1, r2, cfg);
  const double a = evaluate_mse(ops, f_bar, alpha, cfg);
  const double b = evaluate_mse_receive_form(ops, alpha, r1, r2, cfg);
  EXPECT_NEAR(a, b, 1e-10 * std::abs(a));
}

TEST(Alternate, OneIterationComposesTheSteps) {
  SystemConfig cfg = config_from_snr_inr(5, 0, 2, 3);
  cfg.max_iterations = 1;
  const SlotInputs in = random_slot_inputs(cfg, 50);
  const BeamformingSolution s = alternate_optimize(in, cfg);

  const BeamformingSolution start = identity_start(in, cfg);
  const SlotOperators ops =
      build_slot_operators(in, start.f, start.r1, start.r2, cfg);
  const RelayUpdate relay = solve_relay_beamformer(ops, cfg);
  const ReceiveUpdate rx =
      solve_receive_beamformers(in, relay.f_bar, relay.alpha, cfg);
  EXPECT_LE(max_abs(s.f - relay.f()), 1e-12);
  EXPECT_LE(max_abs(s.r1 - rx.r1), 1e-12);
  EXPECT_LE(max_abs(s.r2 - rx.r2), 1e-12);
  EXPECT_EQ(s.iterations_used, 1);
  EXPECT_EQ(s.j_trace.size(), 2u);
}

TEST(Alternate, ObjectiveNeverIncreases) {
  for (std::uint64_t seed = 60; seed < 80; ++seed) {
    SystemConfig cfg = config_from_snr_inr(double(seed % 4) * 5, 0, 2, 3);
    cfg.convergence_tol = 0.0;
    const BeamformingSolution s =
        alternate_optimize(random_slot_inputs(cfg, seed), cfg);
    for (std::size_t k = 1; k < s.j_trace.size(); ++k) {
      EXPECT_LE(s.j_trace[k], s.j_trace[k - 1] + 1e-10) << "seed " << seed;
    }
  }
}

TEST(Alternate, StrongInterferenceStaysFinite) {
  SystemConfig cfg = config_from_snr_inr(0, 20, 2, 5);
  const BeamformingSolution s =
      alternate_optimize(random_slot_inputs(cfg, 90, 100.0), cfg);
  EXPECT_TRUE(std::isfinite(s.j_value));
  EXPECT_TRUE(s.f.allFinite());
  EXPECT_LE(s.j_value, cfg.n_s * (cfg.p1 + cfg.p2) + 1e-9);
}

TEST(Alternate, RelayOnlyStopsAfterOneStep) {
  SystemConfig cfg = config_from_snr_inr(5, 0, 2, 3);
  AlternateOptions opts;
  opts.update_receivers = false;
  const BeamformingSolution s =
      alternate_optimize(random_slot_inputs(cfg, 91), cfg, opts);
  EXPECT_EQ(s.iterations_used, 1);
  EXPECT_LE(s.j_value, s.j_trace.front() + 1e-10);
}

TEST(PowerScaling, RejectsZeroBeamformer) {
  SystemConfig cfg;
  EXPECT_THROW(power_scaling(CMatrix::Zero(5, 5), eye(5), cfg),
               std::domain_error);
}

}  // namespace
}  // namespace fdrelay
