// SPDX-License-Identifier: Apache-2.0

#include "fdrelay/validation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fdrelay/si_propagation.hpp"
#include "fdrelay/trajectory.hpp"

namespace fdrelay {

void RunningStats::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

McEstimate RunningStats::estimate() const {
  McEstimate e;
  e.samples = n_;
  e.mean = mean_;
  if (n_ > 1) {
    e.std_error = std::sqrt(m2_ / static_cast<double>(n_ - 1) /
                            static_cast<double>(n_));
  }
  return e;
}

McEstimate chain_trace_mc_oracle(std::span<const CMatrix> v_list, double sigma_sq,
                            long long n_samples, std::uint64_t seed) {
  if (v_list.size() < 2) {
    throw std::invalid_argument("chain_trace_mc_oracle: needs at least V_1, V_2");
  }
  const Eigen::Index n = v_list.front().rows();
  const std::size_t v = v_list.size();
  auto rng = SeededRng::substream(
      seed, {static_cast<std::uint64_t>(StreamTag::kOracle), 0x4c454d31ULL});
  RunningStats stats;
  for (long long s = 0; s < n_samples; ++s) {
    // V_v Delta_{v-1} V_{v-1} ... Delta_1 V_1
    CMatrix chain = v_list[v - 1];
    for (std::size_t j = v - 1; j >= 1; --j) {
      chain = chain * rng.complex_gaussian(n, n, sigma_sq) * v_list[j - 1];
    }
    stats.add(chain.squaredNorm());
  }
  return stats.estimate();
}

namespace {

CVector gaussian_vector(SeededRng& rng, Eigen::Index n, double variance) {
  return rng.complex_gaussian(n, 1, variance);
}

// Index maps for the memory-m signal model of slot t.
struct EffectiveIndex {
  int t;
  int m;  // 0 for an unbounded memory
  int relay(int s) const { return m > 0 ? std::max(s, t - m) : s; }
  int uplink(int s) const { return m > 0 ? std::max(s, t - 1 - m) : s; }
};

void check_chain_inputs(const SignalChainInputs& in) {
  if (in.slot < 1) throw std::invalid_argument("signal chain: slot >= 1");
  if (static_cast<int>(in.channels.size()) <= in.slot ||
      static_cast<int>(in.relay.size()) <= in.slot) {
    throw std::invalid_argument(
        "signal chain: need channels 0..t and beamformers 1..t");
  }
  if (in.memory.is_auto()) {
    throw std::invalid_argument("signal chain: memory must be resolved");
  }
}

SignalTrace draw_trace(const SignalChainInputs& in, const SystemConfig& cfg,
                       SeededRng& rng) {
  const int t = in.slot;
  const EffectiveIndex idx{t, in.memory.is_finite() ? in.memory.slots() : 0};
  const Eigen::Index ns = cfg.n_s;
  const Eigen::Index nr = cfg.n_r;

  SignalTrace tr;
  // Relay input of slot 0, then the loopback recursion up to slot t-1.
  CVector y;
  for (int s = 0; s <= t - 1; ++s) {
    const CVector x1 = gaussian_vector(rng, ns, cfg.p1);
    const CVector x2 = gaussian_vector(rng, ns, cfg.p2);
    const CVector nr_s = gaussian_vector(rng, nr, cfg.sigma_n_sq_r);
    const TimeSlotChannels& up = in.channels[idx.uplink(s)];
    const CVector fresh = up.h_1r * x1 + up.h_2r * x2 + nr_s;
    if (s == 0) {
      y = fresh;
      tr.residual_si = CVector::Zero(nr);
    } else {
      const CMatrix delta_rr =
          rng.complex_gaussian(nr, nr, cfg.sigma_e_sq_r);
      const CVector loop = delta_rr * in.relay[idx.relay(s)] * y;
      y = fresh + loop;
      tr.residual_si = loop;
    }
    if (s == t - 1) {
      tr.x1_prev = x1;
      tr.x2_prev = x2;
      tr.relay_noise_prev = nr_s;
    }
  }
  tr.y_r_prev = y;

  const TimeSlotChannels& prev = in.channels[t - 1];
  const TimeSlotChannels& now = in.channels[t];
  const CMatrix& f = in.relay[t];
  tr.x_r = f * y;
  tr.x1_now = gaussian_vector(rng, ns, cfg.p1);
  tr.x2_now = gaussian_vector(rng, ns, cfg.p2);
  const CMatrix d11 = rng.complex_gaussian(ns, ns, cfg.sigma_e_sq_1);
  const CMatrix d22 = rng.complex_gaussian(ns, ns, cfg.sigma_e_sq_2);
  tr.n1 = gaussian_vector(rng, ns, cfg.sigma_n_sq_1);
  tr.n2 = gaussian_vector(rng, ns, cfg.sigma_n_sq_2);

  // Each source removes its own symbol's round trip and its loopback estimate.
  tr.y1 = now.h_r1 * tr.x_r - now.h_r1 * f * prev.h_1r * tr.x1_prev +
          d11 * tr.x1_now + tr.n1;
  tr.y2 = now.h_r2 * tr.x_r - now.h_r2 * f * prev.h_2r * tr.x2_prev +
          d22 * tr.x2_now + tr.n2;
  return tr;
}

SeededRng draw_stream(std::uint64_t seed, long long draw) {
  return SeededRng::substream(
      seed, {static_cast<std::uint64_t>(StreamTag::kSignal),
             static_cast<std::uint64_t>(draw)});
}

}  // namespace

double trace_sum_mse(const SignalTrace& trace, const CMatrix& r1,
                     const CMatrix& r2, double alpha) {
  return (trace.x2_prev - r1.adjoint() * trace.y1 / alpha).squaredNorm() +
         (trace.x1_prev - r2.adjoint() * trace.y2 / alpha).squaredNorm();
}

std::vector<SignalTrace> simulate_signal_chain(const SignalChainInputs& in,
                                               const SystemConfig& cfg,
                                               long long n_samples,
                                               std::uint64_t seed) {
  check_chain_inputs(in);
  std::vector<SignalTrace> traces;
  traces.reserve(static_cast<std::size_t>(std::max(0LL, n_samples)));
  for (long long k = 0; k < n_samples; ++k) {
    auto rng = draw_stream(seed, k);
    traces.push_back(draw_trace(in, cfg, rng));
  }
  return traces;
}

SignalChainSummary signal_chain_statistics(const SignalChainInputs& in,
                                           const CMatrix& r1,
                                           const CMatrix& r2, double alpha,
                                           const SystemConfig& cfg,
                                           long long n_samples,
                                           std::uint64_t seed) {
  check_chain_inputs(in);
  RunningStats mse, power, residual;
  for (long long k = 0; k < n_samples; ++k) {
    auto rng = draw_stream(seed, k);
    const SignalTrace tr = draw_trace(in, cfg, rng);
    mse.add(trace_sum_mse(tr, r1, r2, alpha));
    power.add(tr.x_r.squaredNorm());
    residual.add(tr.residual_si.squaredNorm() / cfg.n_r);
  }
  return {mse.estimate(), power.estimate(), residual.estimate()};
}

BruteForceResult brute_force_relay_opt(const SlotOperators& ops,
                                       const SystemConfig& cfg,
                                       long long budget, std::uint64_t seed) {
  const Eigen::Index nr = ops.gr.rows();
  auto objective = [&](const CMatrix& f_bar, double& alpha) {
    alpha = power_scaling(f_bar, ops.gr, cfg);
    return evaluate_mse(ops, f_bar, alpha, cfg);
  };

  BruteForceResult best;
  best.best_f_bar = CMatrix::Identity(nr, nr) / std::sqrt(double(nr));
  best.best_j = objective(best.best_f_bar, best.best_alpha);
  if (budget <= 0) return best;

  auto rng = SeededRng::substream(
      seed, {static_cast<std::uint64_t>(StreamTag::kOracle), 0x42525554ULL});
  const long long random_phase = budget / 2;
  for (; best.evaluations < random_phase; ++best.evaluations) {
    CMatrix candidate = rng.complex_gaussian(nr, nr);
    candidate /= candidate.norm();
    double alpha = 0.0;
    const double j = objective(candidate, alpha);
    if (j < best.best_j) {
      best.best_j = j;
      best.best_f_bar = candidate;
      best.best_alpha = alpha;
    }
  }

  // Coordinate refinement over real and imaginary parts, halving the step
  // after a sweep without improvement.
  double step = 0.1;
  while (best.evaluations < budget && step > 1e-10) {
    bool improved = false;
    for (Eigen::Index c = 0; c < 2 * nr * nr && best.evaluations < budget;
         ++c) {
      const Complex unit = c % 2 == 0 ? Complex(1, 0) : Complex(0, 1);
      const Eigen::Index entry = c / 2;
      for (double sign : {1.0, -1.0}) {
        if (best.evaluations >= budget) break;
        CMatrix candidate = best.best_f_bar;
        candidate(entry % nr, entry / nr) += sign * step * unit;
        candidate /= candidate.norm();
        double alpha = 0.0;
        const double j = objective(candidate, alpha);
        ++best.evaluations;
        if (j < best.best_j) {
          best.best_j = j;
          best.best_f_bar = candidate;
          best.best_alpha = alpha;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

double alternate_index_residual_si_scalar(const RealizedPath& path, int t,
                                          const MemorySpec& memory,
                                          const SystemConfig& cfg) {
  const GammaFlags flags = gamma_flags(t, memory);
  const double sigma = cfg.sigma_e_sq_r;
  auto power = [&](int f_slot, int channel_slot) {
    const TimeSlotChannels& ch = path.channels.at(channel_slot);
    return forwarded_power(path.relay.at(f_slot), ch.h_1r, ch.h_2r, cfg);
  };
  auto gram_product = [&](int i) {
    double p = 1.0;
    for (int j = t + 1 - i; j <= t - 1; ++j) p *= trace_gram(path.relay.at(j));
    return p;
  };

  double c = 0.0;
  if (flags.one_step) c += sigma * power(t - 1, t - 2);
  if (flags.window) {
    const int upper = memory.is_infinite() ? t - 1
                                           : std::min(memory.slots(), t - 1);
    for (int i = 2; i <= upper; ++i) {
      c += std::pow(sigma, i) * gram_product(i) * power(t - i, t - i);
    }
  }
  if (flags.beyond_window) {
    for (int i = 2; i <= t - 1; ++i) {
      c += std::pow(sigma, i) * gram_product(i) * power(t - i, t - 1 - i);
    }
  }
  return c;
}

namespace {

OracleCheck make_check(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

std::string format_rel(double analytic, const McEstimate& mc) {
  std::ostringstream os;
  os << "analytic=" << analytic << " mc=" << mc.mean << " se=" << mc.std_error
     << " rel=" << mc.relative_error(analytic);
  return os.str();
}

}  // namespace

std::vector<OracleCheck> run_validation_suite(const ValidationOptions& opts) {
  std::vector<OracleCheck> checks;

  {
    auto rng = SeededRng::substream(opts.seed, {1});
    std::vector<CMatrix> v;
    for (int j = 0; j < 3; ++j) v.push_back(rng.complex_gaussian(3, 3));
    const double analytic = chain_trace_expectation(v, 0.2);
    const McEstimate mc = chain_trace_mc_oracle(v, 0.2, opts.samples, opts.seed);
    checks.push_back(make_check("trace expectation v=3 N=3 sigma^2=0.2",
                                mc.relative_error(analytic) <= 0.03,
                                format_rel(analytic, mc)));
  }

  const SystemConfig small = config_from_snr_inr(5.0, 0.0, 1, 2);
  for (int r = 0; r < opts.instances; ++r) {
    const TrajectoryResult traj =
        run_trajectory(small, Scheme::kProposed, opts.seed, r, 3);
    const int t = 3;
    const BeamformingSolution& sol = traj.solutions[t - 1];
    const SlotInputs in = SlotInputs::from_channels(
        traj.path.channels[t - 1], traj.path.channels[t],
        traj.design_gc[t - 1]);

    const SlotOperators ops =
        build_slot_operators(in, sol.f, sol.r1, sol.r2, small);
    const RelayUpdate relay = solve_relay_beamformer(ops, small);
    const double residual =
        relay_stationarity_residual(ops, relay.f_bar_raw, small);
    checks.push_back(make_check(
        "relay stationarity #" + std::to_string(r),
        residual <= 1e-8 * ops.w_f0.norm(),
        "residual=" + std::to_string(residual)));

    const SlotOperators init_ops = build_slot_operators(
        in, sol.f, CMatrix::Identity(1, 1), CMatrix::Identity(1, 1), small);
    const BruteForceResult brute =
        brute_force_relay_opt(init_ops, small, opts.brute_force_budget,
                              opts.seed + r);
    checks.push_back(make_check(
        "alternating J <= brute force J #" + std::to_string(r),
        sol.j_value <= brute.best_j + 1e-6,
        "alternating=" + std::to_string(sol.j_value) +
            " brute=" + std::to_string(brute.best_j)));

    const SignalChainInputs chain{traj.path.channels, traj.path.relay, t,
                                  MemorySpec::infinite()};
    const SignalChainSummary stats = signal_chain_statistics(
        chain, sol.r1, sol.r2, sol.alpha, small, opts.samples, opts.seed + r);
    checks.push_back(make_check(
        "signal-level sum-MSE #" + std::to_string(r),
        stats.sum_mse.relative_error(sol.j_value) <= 0.03,
        format_rel(sol.j_value, stats.sum_mse)));
    const double budget = small.n_r * small.pr;
    checks.push_back(make_check(
        "signal-level relay power #" + std::to_string(r),
        stats.relay_power.relative_error(budget) <= 0.03,
        format_rel(budget, stats.relay_power)));
    const double gc = traj.design_gc[t - 1].scalar_form;
    checks.push_back(make_check(
        "signal-level residual SI #" + std::to_string(r),
        stats.residual_si_power.relative_error(gc) <= 0.03,
        format_rel(gc, stats.residual_si_power)));
  }
  return checks;
}

}  // namespace fdrelay
