// SPDX-License-Identifier: Apache-2.0
//
// Achievable sum rate, the half-duplex reference and duplex-mode selection.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fdrelay/beamforming.hpp"
#include "fdrelay/channel_model.hpp"

namespace fdrelay {

enum class Scheme { kProposed, kConventional, kRelayOnly, kHalfDuplex };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view text);

struct SlotMetrics {
  int slot_index = 0;
  Scheme scheme = Scheme::kProposed;
  // Sum-MSE of the deployed beamformers, averaged over every loopback error
  // the signal actually went through (full history, not the design window).
  double sum_mse = 0.0;
  // Objective the design itself minimised (equals sum_mse for m = inf).
  double design_mse = 0.0;
  double sum_rate = 0.0;
  double rate_at_source1 = 0.0;  // decoding x_2
  double rate_at_source2 = 0.0;  // decoding x_1
};

// Realised past of one trajectory: channels[s] for s = 0..t and relay[j] =
// F^(j) for j = 1..t-1 (relay[0] is unused).
struct RealizedPath {
  std::vector<TimeSlotChannels> channels;
  std::vector<CMatrix> relay;
};

// Covariance of the residual SI reaching the relay receiver by slot t-1 for
// the realised loopback errors, i.e. E[G_0^(t) | Delta_rr]: zero for t = 1,
// otherwise Delta^(t-1) F^(t-1) Z^(t-2) F^(t-1)^H Delta^(t-1)^H with
// Z^(s) = Q^(s) + Delta^(s) F^(s) Z^(s-1) F^(s)^H Delta^(s)^H, Z^(0) = Q^(0).
CMatrix realized_relay_interference(const RealizedPath& path, int t,
                                    const SystemConfig& cfg);

struct SourceRates {
  double at_source1 = 0.0;
  double at_source2 = 0.0;
  double sum() const { return at_source1 + at_source2; }
};

// log2 det{I + p_lbar R^H H_rl F_bar H_lbar,r H^H F_bar^H H_rl^H R
// (R^H A_l R)^-1} per source, with A_l built from the realised source
// loopback errors delta_11/delta_22 and relay interference g0.
SourceRates achievable_rates(const SlotInputs& in,
                             const BeamformingSolution& solution,
                             const CMatrix& delta_11, const CMatrix& delta_22,
                             const CMatrix& g0, const SystemConfig& cfg);

// Sum rate of slot t of a realised path; the path must contain slots 0..t and
// beamformers 1..t-1.
SlotMetrics achievable_sum_rate(const RealizedPath& path, int t,
                                const BeamformingSolution& solution,
                                const SystemConfig& cfg);

// Two-phase (MAC then BC) half-duplex AF exchange over the uplink of
// `previous` and the downlink of `current`: same alternating MMSE design, no
// loopback error of any kind, and a 1/2 prelog on the sum rate.
SlotMetrics half_duplex_reference(const TimeSlotChannels& previous,
                                  const TimeSlotChannels& current,
                                  const SystemConfig& cfg);

enum class DuplexMode { kFullDuplex, kHalfDuplex };
std::string_view to_string(DuplexMode mode);

// Full duplex only when it strictly beats half duplex.
DuplexMode duplex_mode_select(double fd_rate, double hd_rate);

}  // namespace fdrelay
