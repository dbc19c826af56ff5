// SPDX-License-Identifier: Apache-2.0

#include "fdrelay/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fdrelay {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kProposed:
      return "proposed";
    case Scheme::kConventional:
      return "conventional";
    case Scheme::kRelayOnly:
      return "relay_only";
    case Scheme::kHalfDuplex:
      return "half_duplex";
  }
  return "?";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "proposed") return Scheme::kProposed;
  if (text == "conventional") return Scheme::kConventional;
  if (text == "relay_only") return Scheme::kRelayOnly;
  if (text == "half_duplex") return Scheme::kHalfDuplex;
  throw std::invalid_argument("unknown scheme: " + std::string(text));
}

std::string_view to_string(DuplexMode mode) {
  return mode == DuplexMode::kFullDuplex ? "FD" : "HD";
}

DuplexMode duplex_mode_select(double fd_rate, double hd_rate) {
  return fd_rate > hd_rate ? DuplexMode::kFullDuplex : DuplexMode::kHalfDuplex;
}

namespace {

CMatrix uplink_covariance(const TimeSlotChannels& ch, const SystemConfig& cfg) {
  return cfg.p1 * ch.h_1r * ch.h_1r.adjoint() +
         cfg.p2 * ch.h_2r * ch.h_2r.adjoint() +
         cfg.sigma_n_sq_r * CMatrix::Identity(cfg.n_r, cfg.n_r);
}

double log2_det_hpd(const CMatrix& a) {
  const Eigen::LLT<CMatrix> llt(a);
  if (llt.info() == Eigen::Success) {
    const auto diag = llt.matrixLLT().diagonal();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
      acc += std::log2(diag(i).real());
    }
    return 2.0 * acc;
  }
  // Entries spanning more than double precision (runaway loopback power):
  // fall back to eigenvalues floored at the resolvable scale.
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(a, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw SingularSystem("rate: covariance eigen-decomposition failed", 0.0);
  }
  const auto& ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  if (!(top > 0.0) || !std::isfinite(top)) {
    throw SingularSystem("rate: covariance is not positive definite", 0.0);
  }
  const double floor = top * std::numeric_limits<double>::epsilon();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    acc += std::log2(std::max(ev(i), floor));
  }
  return acc;
}

}  // namespace

CMatrix realized_relay_interference(const RealizedPath& path, int t,
                                    const SystemConfig& cfg) {
  if (t < 1) throw std::invalid_argument("slot must be >= 1");
  if (t == 1) return CMatrix::Zero(cfg.n_r, cfg.n_r);
  if (static_cast<int>(path.channels.size()) < t ||
      static_cast<int>(path.relay.size()) < t) {
    throw std::invalid_argument("realised path is shorter than the slot");
  }
  CMatrix z = uplink_covariance(path.channels[0], cfg);
  for (int s = 1; s <= t - 1; ++s) {
    const CMatrix hop = path.channels[s].delta_rr * path.relay[s];
    const CMatrix residual = hop * z * hop.adjoint();
    if (s == t - 1) return residual;
    z = uplink_covariance(path.channels[s], cfg) + residual;
  }
  return CMatrix::Zero(cfg.n_r, cfg.n_r);
}

SourceRates achievable_rates(const SlotInputs& in,
                             const BeamformingSolution& solution,
                             const CMatrix& delta_11, const CMatrix& delta_22,
                             const CMatrix& g0, const SystemConfig& cfg) {
  const CMatrix eye_r = CMatrix::Identity(cfg.n_r, cfg.n_r);
  const CMatrix eye_s = CMatrix::Identity(cfg.n_s, cfg.n_s);
  const double inv_alpha_sq = 1.0 / (solution.alpha * solution.alpha);
  const CMatrix relay_cov = cfg.sigma_n_sq_r * eye_r + g0;

  auto rate = [&](const CMatrix& h_down, const CMatrix& h_desired,
                  double p_desired, double p_own, const CMatrix& delta,
                  double noise, const CMatrix& r) {
    const CMatrix hf = h_down * solution.f_bar;
    const CMatrix a = hf * relay_cov * hf.adjoint() +
                      inv_alpha_sq * (p_own * delta * delta.adjoint() +
                                      noise * eye_s);
    const CMatrix desired = hf * h_desired;
    const CMatrix s = p_desired * desired * desired.adjoint();
    // The receive filter cancels out of the ratio whenever it is invertible.
    if (r.fullPivLu().rank() < r.rows()) {
      const CMatrix interference = r.adjoint() * a * r;
      const CMatrix total = interference + r.adjoint() * s * r;
      return std::max(0.0, log2_det_hpd(total) - log2_det_hpd(interference));
    }
    return std::max(0.0, log2_det_hpd(a + s) - log2_det_hpd(a));
  };

  SourceRates out;
  out.at_source1 = rate(in.h_r1, in.h_2r_prev, cfg.p2, cfg.p1, delta_11,
                        cfg.sigma_n_sq_1, solution.r1);
  out.at_source2 = rate(in.h_r2, in.h_1r_prev, cfg.p1, cfg.p2, delta_22,
                        cfg.sigma_n_sq_2, solution.r2);
  return out;
}

SlotMetrics achievable_sum_rate(const RealizedPath& path, int t,
                                const BeamformingSolution& solution,
                                const SystemConfig& cfg) {
  if (static_cast<int>(path.channels.size()) <= t) {
    throw std::invalid_argument("realised path lacks the current slot");
  }
  const TimeSlotChannels& now = path.channels[t];
  const SlotInputs in = SlotInputs::from_channels(
      path.channels[t - 1], now, SICovariance::zero(cfg.n_r));
  const CMatrix g0 = realized_relay_interference(path, t, cfg);
  const SourceRates rates =
      achievable_rates(in, solution, now.delta_11, now.delta_22, g0, cfg);
  SlotMetrics m;
  m.slot_index = t;
  m.sum_mse = solution.j_value;
  m.design_mse = solution.j_value;
  m.rate_at_source1 = rates.at_source1;
  m.rate_at_source2 = rates.at_source2;
  m.sum_rate = rates.sum();
  return m;
}

SlotMetrics half_duplex_reference(const TimeSlotChannels& previous,
                                  const TimeSlotChannels& current,
                                  const SystemConfig& cfg) {
  const SystemConfig hd = cfg.without_loopback_error();
  const SlotInputs in = SlotInputs::from_channels(previous, current,
                                                  SICovariance::zero(hd.n_r));
  const BeamformingSolution sol = alternate_optimize(in, hd);
  const CMatrix zero_s = CMatrix::Zero(hd.n_s, hd.n_s);
  const SourceRates rates = achievable_rates(
      in, sol, zero_s, zero_s, CMatrix::Zero(hd.n_r, hd.n_r), hd);

  SlotMetrics m;
  m.slot_index = current.slot_index;
  m.scheme = Scheme::kHalfDuplex;
  m.sum_mse = sol.j_value;
  m.design_mse = sol.j_value;
  m.rate_at_source1 = 0.5 * rates.at_source1;
  m.rate_at_source2 = 0.5 * rates.at_source2;
  m.sum_rate = m.rate_at_source1 + m.rate_at_source2;
  return m;
}

}  // namespace fdrelay
