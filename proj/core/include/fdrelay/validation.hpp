// SPDX-License-Identifier: Apache-2.0
//
// Independent oracles: signal-level Monte Carlo of the relay recursion,
// random-search relay optimisation and a sampled chain-trace expectation.
// None of these reuse the closed forms they are meant to check.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fdrelay/beamforming.hpp"
#include "fdrelay/channel_model.hpp"
#include "fdrelay/metrics.hpp"

namespace fdrelay {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long long samples = 0;

  double relative_error(double reference) const {
    return std::abs(mean - reference) / std::abs(reference);
  }
  double z_score(double reference) const {
    return std_error > 0 ? (mean - reference) / std_error : 0.0;
  }
};

// Streaming mean / standard-error accumulator.
class RunningStats {
 public:
  void add(double x);
  McEstimate estimate() const;

 private:
  long long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Sample mean of tr{V_v prod(Delta V) prod(V^H Delta^H) V_v^H} over
// independent Delta chains with i.i.d. CN(0, sigma_sq) entries.
McEstimate chain_trace_mc_oracle(std::span<const CMatrix> v_list, double sigma_sq,
                            long long n_samples, std::uint64_t seed);

// One draw of the slot-t signals.
struct SignalTrace {
  CVector x1_prev, x2_prev;  // x_i^(t-1): what slot t delivers
  CVector x1_now, x2_now;    // x_i^(t): fresh symbols, loopback SI at sources
  CVector relay_noise_prev;  // n_r^(t-1)
  CVector y_r_prev;          // relay input after cancellation, slot t-1
  CVector residual_si;       // part of y_r_prev caused by earlier slots
  CVector x_r;               // relay output, slot t
  CVector n1, n2;            // source noises, slot t
  CVector y1, y2;            // source inputs after both SI subtractions
};

struct SignalChainInputs {
  // channels[s] for s = 0..t and relay[j] = F^(j) for j = 1..t.
  std::span<const TimeSlotChannels> channels;
  std::span<const CMatrix> relay;
  int slot = 1;
  // Relay memory the design assumed. Finite m replaces F^(s) by F^(t-m) for
  // s < t-m and uplink channels of slots s < t-1-m by those of slot t-1-m,
  // which is exactly the signal model behind the truncated G_c.
  MemorySpec memory = MemorySpec::infinite();
};

// Simulates n_samples independent draws of symbols, noises and every loopback
// error the slot-t signals depend on; channels and beamformers are fixed.
std::vector<SignalTrace> simulate_signal_chain(const SignalChainInputs& in,
                                               const SystemConfig& cfg,
                                               long long n_samples,
                                               std::uint64_t seed);

struct SignalChainSummary {
  McEstimate sum_mse;            // ||x_2 - R_1^H y_1 / alpha||^2 + ...
  McEstimate relay_power;        // ||x_r||^2
  McEstimate residual_si_power;  // ||residual_si||^2 / N_r  (G_c scalar)
};

// Streaming version of simulate_signal_chain + empirical statistics for the
// given receivers, without storing traces.
SignalChainSummary signal_chain_statistics(const SignalChainInputs& in,
                                           const CMatrix& r1,
                                           const CMatrix& r2, double alpha,
                                           const SystemConfig& cfg,
                                           long long n_samples,
                                           std::uint64_t seed);

double trace_sum_mse(const SignalTrace& trace, const CMatrix& r1,
                     const CMatrix& r2, double alpha);

struct BruteForceResult {
  double best_j = 0.0;
  CMatrix best_f_bar;
  double best_alpha = 0.0;
  long long evaluations = 0;
};

// Minimises the sum-MSE at fixed receivers over unit-norm F_bar (alpha from
// the power constraint) by random search followed by coordinate refinement.
// Half the budget goes to each phase; budget 0 returns the identity start.
BruteForceResult brute_force_relay_opt(const SlotOperators& ops,
                                       const SystemConfig& cfg,
                                       long long budget, std::uint64_t seed);

// G_c scalar under the other index convention: the window sum pairs F^(t-i)
// with uplink channels of slot t-i and the beyond-window sum runs over the
// whole history. The signal oracle can tell it apart from
// residual_si_covariance().
double alternate_index_residual_si_scalar(const RealizedPath& path, int t,
                                          const MemorySpec& memory,
                                          const SystemConfig& cfg);

struct OracleCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationOptions {
  long long samples = 100000;
  long long brute_force_budget = 100000;
  int instances = 5;
  std::uint64_t seed = 1;
};

// Runs the oracle suite at reduced scale and reports one line per check.
std::vector<OracleCheck> run_validation_suite(const ValidationOptions& opts);

}  // namespace fdrelay
