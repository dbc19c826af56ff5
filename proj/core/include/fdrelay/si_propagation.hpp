// SPDX-License-Identifier: Apache-2.0
//
// Cross-slot relay history and the residual loopback-SI covariance G_c.
//
// A residual-SI term that has passed through k relay loopbacks contributes
//
//   sigma_e,r^(2k) * tr(F^(t-k) Q^(t-1-k) F^(t-k)^H) * prod_{j=t-k+1}^{t-1} tr(F^(j) F^(j)^H)
//
// to the scalar c in G_c = c I, where Q^(s) = p1 H_1r H_1r^H + p2 H_2r H_2r^H +
// sigma_n,r^2 I uses the uplink channels of slot s. With a finite memory m
// the relay only remembers F^(t-m)..F^(t-1); older hops reuse F^(t-m) and the
// oldest remembered uplink channels Q^(t-1-m).

#pragma once

#include <deque>
#include <optional>
#include <stdexcept>
#include <string>

#include "fdrelay/channel_model.hpp"
#include "fdrelay/matrix_core.hpp"

namespace fdrelay {

class MissingHistory : public std::runtime_error {
 public:
  MissingHistory(const std::string& what, int slot)
      : std::runtime_error(what), slot_(slot) {}
  int slot() const noexcept { return slot_; }

 private:
  int slot_;
};

struct GammaFlags {
  bool one_step = false;     // Gamma_1
  bool window = false;       // Gamma_2
  bool beyond_window = false;  // Gamma_3
  friend bool operator==(const GammaFlags&, const GammaFlags&) = default;
};

// Which of the three G_c terms are active in slot t (t >= 1) under memory m.
GammaFlags gamma_flags(int t, const MemorySpec& memory);

// One remembered relay slot: the beamformer F^(j) and the uplink channels of
// slot j-1, i.e. the signal F^(j) forwarded.
struct HistoryEntry {
  int slot = 0;
  CMatrix f;
  CMatrix h_1r;
  CMatrix h_2r;
};

class RelayHistory {
 public:
  // Memory must be finite or infinite; kAuto has to be resolved first.
  RelayHistory(const MemorySpec& memory, int n_r);

  // Records F^(t) for the slot after the newest stored one, together with the
  // uplink channels of slot t-1. Evicts the oldest entry at capacity.
  void push_slot(const CMatrix& f, const CMatrix& h_1r, const CMatrix& h_2r);

  // Slot whose G_c would be computed next (1 when empty).
  int current_slot() const { return next_slot_; }
  const MemorySpec& memory() const { return memory_; }
  int n_r() const { return n_r_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(int slot) const;
  // Throws MissingHistory when the slot is not stored.
  const HistoryEntry& at(int slot) const;
  const std::deque<HistoryEntry>& entries() const { return entries_; }

 private:
  MemorySpec memory_;
  int n_r_;
  int next_slot_ = 1;
  std::deque<HistoryEntry> entries_;
};

struct SICovariance {
  double scalar_form = 0.0;
  int n_r = 0;
  CMatrix g_c() const {
    return CMatrix::Identity(n_r, n_r) * Complex(scalar_form, 0.0);
  }
  static SICovariance zero(int n_r) { return {0.0, n_r}; }
};

// tr(F Q F^H) with Q = p1 H_1r H_1r^H + p2 H_2r H_2r^H + sigma_n,r^2 I.
double forwarded_power(const CMatrix& f, const CMatrix& h_1r,
                       const CMatrix& h_2r, const SystemConfig& cfg);

// G_c for slot history.current_slot(), assembled from the three Gamma-gated
// terms. Throws MissingHistory naming the first absent slot.
SICovariance residual_si_covariance(const RelayHistory& history,
                                    const SystemConfig& cfg);

}  // namespace fdrelay
