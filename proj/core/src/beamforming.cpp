// SPDX-License-Identifier: Apache-2.0

#include "fdrelay/beamforming.hpp"

#include <algorithm>
#include <cmath>

namespace fdrelay {

namespace {

double source_noise_floor(int l, const SystemConfig& cfg) {
  return l == 1 ? cfg.n_s * cfg.p1 * cfg.sigma_e_sq_1 + cfg.sigma_n_sq_1
                : cfg.n_s * cfg.p2 * cfg.sigma_e_sq_2 + cfg.sigma_n_sq_2;
}

void check_dims(const SlotInputs& in, const CMatrix& f, const CMatrix& r1,
                const CMatrix& r2, const SystemConfig& cfg) {
  const auto nr = cfg.n_r;
  const auto ns = cfg.n_s;
  auto ok = [](const CMatrix& m, int r, int c) {
    return m.rows() == r && m.cols() == c;
  };
  if (!ok(in.h_1r_prev, nr, ns) || !ok(in.h_2r_prev, nr, ns) ||
      !ok(in.h_r1, ns, nr) || !ok(in.h_r2, ns, nr)) {
    throw DimensionMismatch("slot channels do not match the configuration");
  }
  if (!ok(f, nr, nr)) throw DimensionMismatch("F must be N_r x N_r");
  if (!ok(r1, ns, ns) || !ok(r2, ns, ns)) {
    throw DimensionMismatch("receive matrices must be N_s x N_s");
  }
  if (in.g_c.n_r != nr) {
    throw DimensionMismatch("G_c size does not match N_r");
  }
}

}  // namespace

SlotInputs SlotInputs::from_channels(const TimeSlotChannels& previous,
                                     const TimeSlotChannels& current,
                                     SICovariance g_c) {
  SlotInputs in;
  in.slot = current.slot_index;
  in.h_1r_prev = previous.h_1r;
  in.h_2r_prev = previous.h_2r;
  in.h_r1 = current.h_r1;
  in.h_r2 = current.h_r2;
  in.g_c = g_c;
  return in;
}

SlotOperators build_slot_operators(const SlotInputs& in, const CMatrix& f,
                                   const CMatrix& r1, const CMatrix& r2,
                                   const SystemConfig& cfg) {
  check_dims(in, f, r1, r2, cfg);
  const auto nr = cfg.n_r;
  const auto ns = cfg.n_s;
  const CMatrix eye_r = CMatrix::Identity(nr, nr);
  const CMatrix eye_s = CMatrix::Identity(ns, ns);

  const CMatrix base = (in.g_c.scalar_form + cfg.sigma_n_sq_r) * eye_r;
  const CMatrix from1 = cfg.p1 * in.h_1r_prev * in.h_1r_prev.adjoint();
  const CMatrix from2 = cfg.p2 * in.h_2r_prev * in.h_2r_prev.adjoint();

  SlotOperators ops;
  ops.g1 = base + from2;
  ops.g2 = base + from1;
  ops.gr = base + from1 + from2;

  ops.w_f0 = cfg.p1 * in.h_r2.adjoint() * r2 * in.h_1r_prev.adjoint() +
             cfg.p2 * in.h_r1.adjoint() * r1 * in.h_2r_prev.adjoint();
  ops.w_f1 = in.h_r1.adjoint() * r1 * r1.adjoint() * in.h_r1;
  ops.w_f2 = in.h_r2.adjoint() * r2 * r2.adjoint() * in.h_r2;
  ops.w_f_scalar = source_noise_floor(1, cfg) * r1.squaredNorm() +
                   source_noise_floor(2, cfg) * r2.squaredNorm();

  const CMatrix hf1 = in.h_r1 * f;
  const CMatrix hf2 = in.h_r2 * f;
  ops.w_r1 = hf1 * in.h_2r_prev;
  ops.w_r2 = hf2 * in.h_1r_prev;
  ops.w_r3 = hf1 * ops.g1 * hf1.adjoint() + source_noise_floor(1, cfg) * eye_s;
  ops.w_r4 = hf2 * ops.g2 * hf2.adjoint() + source_noise_floor(2, cfg) * eye_s;
  return ops;
}

double power_scaling(const CMatrix& f_bar, const CMatrix& gr,
                     const SystemConfig& cfg) {
  const double power = (f_bar * gr * f_bar.adjoint()).trace().real();
  if (!(power > 0.0)) {
    throw std::domain_error(
        "relay beamformer carries no power: tr(F_bar G_r F_bar^H) <= 0");
  }
  return std::sqrt(cfg.n_r * cfg.pr / power);
}

double relay_stationarity_residual(const SlotOperators& ops, const CMatrix& x,
                                   const SystemConfig& cfg) {
  const double mu = ops.w_f_scalar / (cfg.n_r * cfg.pr);
  const CMatrix lhs =
      ops.w_f1 * x * ops.g1 + ops.w_f2 * x * ops.g2 + mu * x * ops.gr;
  return (lhs - ops.w_f0).norm();
}

RelayUpdate solve_relay_beamformer(const SlotOperators& ops,
                                   const SystemConfig& cfg) {
  const Eigen::Index nr = ops.gr.rows();
  if (ops.w_f0.norm() == 0.0) {
    throw DegenerateObjective(
        "W_f0 is zero: no desired signal reaches either source");
  }
  const double mu = ops.w_f_scalar / (cfg.n_r * cfg.pr);
  const CMatrix eye = CMatrix::Identity(nr, nr);
  const CMatrix system = kron(ops.g1.transpose(), ops.w_f1) +
                         kron(ops.g2.transpose(), ops.w_f2) +
                         kron(ops.gr.transpose(), mu * eye);

  RelayUpdate out;
  out.f_bar_raw = mat(solve_linear(system, vec(ops.w_f0)), nr, nr);
  const double norm = out.f_bar_raw.norm();
  if (!(norm > 0.0)) {
    throw DegenerateObjective("relay solution vanished");
  }
  out.f_bar = out.f_bar_raw / norm;
  const double power = (out.f_bar * ops.gr * out.f_bar.adjoint()).trace().real();
  out.alpha = power_scaling(out.f_bar, ops.gr, cfg);
  const double budget = cfg.n_r * cfg.pr;
  out.lambda = ops.w_f_scalar * power / (budget * budget);
  return out;
}

ReceiveUpdate solve_receive_beamformers(const SlotInputs& in,
                                        const CMatrix& f_bar, double alpha,
                                        const SystemConfig& cfg) {
  const CMatrix f = alpha * f_bar;
  const CMatrix eye_s = CMatrix::Identity(cfg.n_s, cfg.n_s);
  const SlotOperators ops = build_slot_operators(in, f, eye_s, eye_s, cfg);

  auto wiener = [&](const CMatrix& w_r_cov, const CMatrix& w_r_cross,
                    double p_other) -> CMatrix {
    const Eigen::LDLT<CMatrix> ldlt(w_r_cov);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        !(ldlt.rcond() * kMaxConditionNumber >= 1.0)) {
      throw SingularSystem("receive bracket is not positive definite",
                           ldlt.rcond());
    }
    return alpha * p_other * ldlt.solve(w_r_cross);
  };

  ReceiveUpdate out;
  out.r1 = wiener(ops.w_r3, ops.w_r1, cfg.p2);
  out.r2 = wiener(ops.w_r4, ops.w_r2, cfg.p1);
  return out;
}

double evaluate_mse(const SlotOperators& ops, const CMatrix& f_bar,
                    double alpha, const SystemConfig& cfg) {
  const double cross = (ops.w_f0.adjoint() * f_bar).trace().real();
  const double quad1 =
      (ops.w_f1 * f_bar * ops.g1 * f_bar.adjoint()).trace().real();
  const double quad2 =
      (ops.w_f2 * f_bar * ops.g2 * f_bar.adjoint()).trace().real();
  return cfg.n_s * (cfg.p1 + cfg.p2) - 2.0 * cross + quad1 + quad2 +
         ops.w_f_scalar / (alpha * alpha);
}

double evaluate_mse_receive_form(const SlotOperators& ops, double alpha,
                                 const CMatrix& r1, const CMatrix& r2,
                                 const SystemConfig& cfg) {
  const double cross = cfg.p2 * (ops.w_r1.adjoint() * r1).trace().real() +
                       cfg.p1 * (ops.w_r2.adjoint() * r2).trace().real();
  const double quad = (ops.w_r3 * r1 * r1.adjoint()).trace().real() +
                      (ops.w_r4 * r2 * r2.adjoint()).trace().real();
  return cfg.n_s * (cfg.p1 + cfg.p2) - 2.0 * cross / alpha +
         quad / (alpha * alpha);
}

double evaluate_mse(const SlotInputs& in, const CMatrix& f_bar, double alpha,
                    const CMatrix& r1, const CMatrix& r2,
                    const SystemConfig& cfg) {
  const SlotOperators ops =
      build_slot_operators(in, alpha * f_bar, r1, r2, cfg);
  return evaluate_mse(ops, f_bar, alpha, cfg);
}

BeamformingSolution identity_start(const SlotInputs& in,
                                   const SystemConfig& cfg) {
  BeamformingSolution s;
  s.f_bar = CMatrix::Identity(cfg.n_r, cfg.n_r) / std::sqrt(double(cfg.n_r));
  s.r1 = CMatrix::Identity(cfg.n_s, cfg.n_s);
  s.r2 = CMatrix::Identity(cfg.n_s, cfg.n_s);
  const SlotOperators ops =
      build_slot_operators(in, s.f_bar, s.r1, s.r2, cfg);
  s.alpha = power_scaling(s.f_bar, ops.gr, cfg);
  s.f = s.alpha * s.f_bar;
  s.j_value = evaluate_mse(ops, s.f_bar, s.alpha, cfg);
  s.j_trace.push_back(s.j_value);
  return s;
}

BeamformingSolution alternate_optimize(const SlotInputs& in,
                                       const SystemConfig& cfg,
                                       const AlternateOptions& opts) {
  BeamformingSolution s = identity_start(in, cfg);

  for (int k = 1; k <= cfg.max_iterations; ++k) {
    // Relay: direction, amplification, then F.
    const SlotOperators ops = build_slot_operators(in, s.f, s.r1, s.r2, cfg);
    const RelayUpdate relay = solve_relay_beamformer(ops, cfg);
    s.f_bar = relay.f_bar;
    s.alpha = relay.alpha;
    s.f = relay.f();
    s.lambda = relay.lambda;
    // Unit-norm scaling of F_bar moves alpha by the same factor; scaling R
    // along keeps the effective receiver R / alpha of the raw solution.
    const double scale = relay.f_bar_raw.norm();
    s.r1 *= scale;
    s.r2 *= scale;

    // Receivers.
    if (opts.update_receivers) {
      ReceiveUpdate rx = solve_receive_beamformers(in, s.f_bar, s.alpha, cfg);
      s.r1 = std::move(rx.r1);
      s.r2 = std::move(rx.r2);
    }

    // Objective and stopping test.
    const double previous = s.j_value;
    s.j_value = evaluate_mse(in, s.f_bar, s.alpha, s.r1, s.r2, cfg);
    s.j_trace.push_back(s.j_value);
    s.iterations_used = k;
    if (!opts.update_receivers) {
      // Fixed receivers: the relay step already is the optimum.
      break;
    }
    if (std::abs(previous - s.j_value) <=
        cfg.convergence_tol * std::max(1.0, previous)) {
      break;
    }
  }
  return s;
}

}  // namespace fdrelay
