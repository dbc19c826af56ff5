// SPDX-License-Identifier: Apache-2.0
//
// System parameters and per-slot Rayleigh channel generation.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <string_view>

#include "fdrelay/matrix_core.hpp"

namespace fdrelay {

// Number of past slots the relay keeps for the residual-SI model.
// kAuto is resolved by select_memory() before a trajectory runs.
class MemorySpec {
 public:
  enum class Kind { kFinite, kInfinite, kAuto };

  static MemorySpec finite(int slots);
  static MemorySpec infinite() { return MemorySpec(Kind::kInfinite, 0); }
  static MemorySpec automatic() { return MemorySpec(Kind::kAuto, 0); }
  // Accepts a positive integer, "inf" or "auto".
  static MemorySpec parse(std::string_view text);

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::kFinite; }
  bool is_infinite() const { return kind_ == Kind::kInfinite; }
  bool is_auto() const { return kind_ == Kind::kAuto; }
  // Only meaningful for finite memories.
  int slots() const { return slots_; }
  // True when the window covers every past slot that exists at slot t.
  bool covers(int t) const { return is_infinite() || slots_ >= t - 1; }

  std::string to_string() const;
  friend bool operator==(const MemorySpec&, const MemorySpec&) = default;

 private:
  MemorySpec(Kind kind, int slots) : kind_(kind), slots_(slots) {}
  Kind kind_ = Kind::kInfinite;
  int slots_ = 0;
};

struct SystemConfig {
  int n_s = 2;  // antennas per source
  int n_r = 5;  // relay antennas
  double p1 = 1.0;
  double p2 = 1.0;
  double pr = 1.0;
  double sigma_n_sq_1 = 1.0;
  double sigma_n_sq_2 = 1.0;
  double sigma_n_sq_r = 1.0;
  double sigma_e_sq_1 = 0.0;
  double sigma_e_sq_2 = 0.0;
  double sigma_e_sq_r = 0.0;
  MemorySpec memory = MemorySpec::infinite();
  int max_iterations = 30;
  double convergence_tol = 1e-8;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  // Same config with every loopback-error variance set to zero.
  SystemConfig without_loopback_error() const;
};

// p = 1 at every node, sigma_n^2 = 10^(-snr/10), sigma_e^2 = sigma_n^2 *
// 10^(inr/10). An INR of -infinity gives sigma_e^2 = 0.
SystemConfig config_from_snr_inr(double snr_db, double inr_db, int n_s,
                                 int n_r,
                                 MemorySpec memory = MemorySpec::infinite(),
                                 int max_iterations = 30,
                                 double convergence_tol = 1e-8);

// JSON mirror of SystemConfig. Missing keys keep the values of `base`.
SystemConfig config_from_json(std::string_view json_text,
                              const SystemConfig& base = {});
std::string config_to_json(const SystemConfig& cfg);

// Channel realisations for one time slot. Estimated loopback channels are
// not stored; only their estimation errors survive the cancellation step.
struct TimeSlotChannels {
  CMatrix h_1r;      // N_r x N_s, source 1 -> relay
  CMatrix h_2r;      // N_r x N_s, source 2 -> relay
  CMatrix h_r1;      // N_s x N_r, relay -> source 1
  CMatrix h_r2;      // N_s x N_r, relay -> source 2
  CMatrix delta_11;  // N_s x N_s loopback error at source 1
  CMatrix delta_22;  // N_s x N_s loopback error at source 2
  CMatrix delta_rr;  // N_r x N_r loopback error at the relay
  int slot_index = 0;

  // h_{l,r}, h_{r,l} and delta_{l,l} by source index l in {1, 2}.
  const CMatrix& h_to_relay(int l) const { return l == 1 ? h_1r : h_2r; }
  const CMatrix& h_from_relay(int l) const { return l == 1 ? h_r1 : h_r2; }
  const CMatrix& delta_source(int l) const {
    return l == 1 ? delta_11 : delta_22;
  }
};

// Deterministic RNG with keyed sub-streams. A sub-stream is a pure function of
// (seed, keys...), so work split across threads reproduces serial results.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  static SeededRng substream(std::uint64_t seed,
                             std::initializer_list<std::uint64_t> keys);

  double normal() { return normal_(engine_); }
  // CN(0, variance): independent real/imag parts with variance/2 each.
  Complex complex_normal(double variance = 1.0);
  CMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols,
                           double variance = 1.0);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Stream tags keep channel draws, signal-level oracles and other consumers
// from ever sharing a sub-stream.
enum class StreamTag : std::uint64_t {
  kChannels = 0x43484e4cULL,
  kSignal = 0x5349474eULL,
  kOracle = 0x4f52434cULL,
};

std::uint64_t mix_seed(std::uint64_t seed,
                       std::initializer_list<std::uint64_t> keys);

// Inter-node entries ~ CN(0,1); loopback-error entries ~ CN(0, sigma_e,i^2).
// Draw order is fixed, and standard draws are scaled afterwards, so configs
// that differ only in variances see identical underlying randomness.
TimeSlotChannels draw_slot_channels(const SystemConfig& cfg, SeededRng& rng,
                                    int t);

// Channels for slot t of realization r under `seed`, from the keyed stream.
TimeSlotChannels draw_slot_channels(const SystemConfig& cfg,
                                    std::uint64_t seed, int realization,
                                    int t);

}  // namespace fdrelay
