// SPDX-License-Identifier: Apache-2.0
//
// Per-slot MMSE relay and receive beamforming.
//
// The relay beamformer is split as F = alpha * F_bar. Given the receive
// matrices, the direction solves the generalized Sylvester equation
//
//   W_f1 F_bar G_1 + W_f2 F_bar G_2 + (N_r p_r)^-1 w_f F_bar G_r = W_f0
//
// in vectorized form, and alpha follows from the relay power constraint
// tr(F G_r F^H) = N_r p_r. Given F, each source's receive matrix is the
// Wiener solution. alternate_optimize() runs the two steps in turn.

#pragma once

#include <stdexcept>
#include <vector>

#include "fdrelay/channel_model.hpp"
#include "fdrelay/matrix_core.hpp"
#include "fdrelay/si_propagation.hpp"

namespace fdrelay {

// The desired signal vanishes (W_f0 == 0), so there is no direction to steer.
class DegenerateObjective : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything one slot's optimisation depends on: uplink channels of slot t-1,
// downlink channels of slot t, and the frozen residual-SI covariance.
struct SlotInputs {
  int slot = 1;
  CMatrix h_1r_prev;  // H_{1,r}^(t-1)
  CMatrix h_2r_prev;  // H_{2,r}^(t-1)
  CMatrix h_r1;       // H_{r,1}^(t)
  CMatrix h_r2;       // H_{r,2}^(t)
  SICovariance g_c;

  static SlotInputs from_channels(const TimeSlotChannels& previous,
                                  const TimeSlotChannels& current,
                                  SICovariance g_c);
};

struct SlotOperators {
  CMatrix g1, g2, gr;
  CMatrix w_f0, w_f1, w_f2;
  double w_f_scalar = 0.0;
  CMatrix w_r1, w_r2, w_r3, w_r4;
};

// Assembles the G, W_f (receive-dependent) and W_r (relay-dependent)
// operators for the given F and R_1, R_2.
SlotOperators build_slot_operators(const SlotInputs& in, const CMatrix& f,
                                   const CMatrix& r1, const CMatrix& r2,
                                   const SystemConfig& cfg);

struct RelayUpdate {
  CMatrix f_bar;      // unit Frobenius norm
  CMatrix f_bar_raw;  // solution of the vectorized system before scaling
  double alpha = 0.0;
  double lambda = 0.0;
  CMatrix f() const { return alpha * f_bar; }
};

// Throws SingularSystem or DegenerateObjective.
RelayUpdate solve_relay_beamformer(const SlotOperators& ops,
                                   const SystemConfig& cfg);

// ||W_f1 X G_1 + W_f2 X G_2 + (N_r p_r)^-1 w_f X G_r - W_f0||_F.
double relay_stationarity_residual(const SlotOperators& ops, const CMatrix& x,
                                   const SystemConfig& cfg);

struct ReceiveUpdate {
  CMatrix r1;
  CMatrix r2;
};

// R_l = alpha p_lbar {H_rl F G_l F^H H_rl^H + (N_s p_l sigma_e,l^2 +
// sigma_n,l^2) I}^-1 H_rl F H_lbar,r with F = alpha * f_bar.
ReceiveUpdate solve_receive_beamformers(const SlotInputs& in,
                                        const CMatrix& f_bar, double alpha,
                                        const SystemConfig& cfg);

// Analytic sum-MSE from the receive-dependent operators:
//   N_s(p1+p2) - 2 Re tr(W_f0^H F_bar) + tr(W_f1 F_bar G_1 F_bar^H)
//   + tr(W_f2 F_bar G_2 F_bar^H) + alpha^-2 w_f.
double evaluate_mse(const SlotOperators& ops, const CMatrix& f_bar,
                    double alpha, const SystemConfig& cfg);

// Same quantity from the relay-dependent operators (ops built with F):
//   N_s(p1+p2) - 2 alpha^-1 Re{p2 tr(W_r1^H R_1) + p1 tr(W_r2^H R_2)}
//   + alpha^-2 {tr(W_r3 R_1 R_1^H) + tr(W_r4 R_2 R_2^H)}.
double evaluate_mse_receive_form(const SlotOperators& ops, double alpha,
                                 const CMatrix& r1, const CMatrix& r2,
                                 const SystemConfig& cfg);

struct BeamformingSolution {
  CMatrix f_bar;
  double alpha = 0.0;
  CMatrix f;
  double lambda = 0.0;
  CMatrix r1;
  CMatrix r2;
  double j_value = 0.0;
  int iterations_used = 0;
  // j_trace[0] is the identity-initialised objective, j_trace[k] the value
  // after iteration k.
  std::vector<double> j_trace;
};

struct AlternateOptions {
  // false pins the receivers to (a scaled) identity: relay-only design.
  bool update_receivers = true;
};

// Identity start: F_bar = I / sqrt(N_r), alpha from the power constraint,
// R_1 = R_2 = I.
BeamformingSolution identity_start(const SlotInputs& in,
                                   const SystemConfig& cfg);

BeamformingSolution alternate_optimize(const SlotInputs& in,
                                       const SystemConfig& cfg,
                                       const AlternateOptions& opts = {});

// Sum-MSE of an arbitrary (F_bar, alpha, R_1, R_2) under the given inputs.
double evaluate_mse(const SlotInputs& in, const CMatrix& f_bar, double alpha,
                    const CMatrix& r1, const CMatrix& r2,
                    const SystemConfig& cfg);

// alpha from the power constraint: sqrt(N_r p_r / tr(F_bar G_r F_bar^H)).
double power_scaling(const CMatrix& f_bar, const CMatrix& gr,
                     const SystemConfig& cfg);

}  // namespace fdrelay
