// SPDX-License-Identifier: Apache-2.0

#include "fdrelay/si_propagation.hpp"

#include <algorithm>
#include <cmath>

namespace fdrelay {

GammaFlags gamma_flags(int t, const MemorySpec& memory) {
  if (t < 1) throw std::invalid_argument("gamma_flags: slot must be >= 1");
  if (memory.is_auto()) {
    throw std::invalid_argument("gamma_flags: memory must be resolved");
  }
  GammaFlags flags;
  if (t == 1) return flags;
  flags.one_step = true;
  if (t == 2) return flags;
  const bool infinite = memory.is_infinite();
  flags.window = infinite || memory.slots() >= 2;
  flags.beyond_window = !infinite && t >= memory.slots() + 2;
  return flags;
}

RelayHistory::RelayHistory(const MemorySpec& memory, int n_r)
    : memory_(memory), n_r_(n_r) {
  if (memory.is_auto()) {
    throw std::invalid_argument("RelayHistory: memory must be resolved");
  }
}

void RelayHistory::push_slot(const CMatrix& f, const CMatrix& h_1r,
                             const CMatrix& h_2r) {
  if (f.rows() != n_r_ || f.cols() != n_r_) {
    throw DimensionMismatch("push_slot: beamformer must be N_r x N_r");
  }
  if (h_1r.rows() != n_r_ || h_2r.rows() != n_r_ ||
      h_1r.cols() != h_2r.cols()) {
    throw DimensionMismatch("push_slot: uplink channels must be N_r x N_s");
  }
  entries_.push_back({next_slot_, f, h_1r, h_2r});
  ++next_slot_;
  if (memory_.is_finite() &&
      entries_.size() > static_cast<std::size_t>(memory_.slots())) {
    entries_.pop_front();
  }
}

bool RelayHistory::contains(int slot) const {
  return !entries_.empty() && slot >= entries_.front().slot &&
         slot <= entries_.back().slot;
}

const HistoryEntry& RelayHistory::at(int slot) const {
  if (!contains(slot)) {
    throw MissingHistory(
        "relay history has no entry for slot " + std::to_string(slot), slot);
  }
  return entries_[static_cast<std::size_t>(slot - entries_.front().slot)];
}

double forwarded_power(const CMatrix& f, const CMatrix& h_1r,
                       const CMatrix& h_2r, const SystemConfig& cfg) {
  return cfg.p1 * (f * h_1r).squaredNorm() +
         cfg.p2 * (f * h_2r).squaredNorm() +
         cfg.sigma_n_sq_r * f.squaredNorm();
}

SICovariance residual_si_covariance(const RelayHistory& history,
                                    const SystemConfig& cfg) {
  const int t = history.current_slot();
  const MemorySpec& memory = history.memory();
  const GammaFlags flags = gamma_flags(t, memory);
  SICovariance out = SICovariance::zero(history.n_r());
  const double sigma = cfg.sigma_e_sq_r;
  if (!flags.one_step || sigma == 0.0) return out;

  // Hops covered exactly: k = 1..window_end. Anything older is folded onto the
  // oldest remembered slot t-m.
  const int window_end =
      memory.is_infinite() ? t - 1 : std::min(memory.slots(), t - 1);

  auto power_of = [&](int slot) {
    const HistoryEntry& e = history.at(slot);
    return forwarded_power(e.f, e.h_1r, e.h_2r, cfg);
  };
  auto gram_of = [&](int slot) { return trace_gram(history.at(slot).f); };

  // prod_{j=t-k+1}^{t-1} tr(F^(j) F^(j)^H), grown one hop at a time.
  double gram_product = 1.0;
  double c = sigma * power_of(t - 1);
  double sigma_pow = sigma;

  if (flags.window) {
    for (int k = 2; k <= window_end; ++k) {
      gram_product *= gram_of(t - k + 1);
      sigma_pow *= sigma;
      c += sigma_pow * gram_product * power_of(t - k);
    }
  }

  if (flags.beyond_window) {
    const int m = memory.slots();
    // gram_product now spans slots t-m+1..t-1.
    const int oldest = t - m;
    const double oldest_power = power_of(oldest);
    const double oldest_gram = gram_of(oldest);
    double repeated = 1.0;
    for (int k = m + 1; k <= t - 1; ++k) {
      repeated *= oldest_gram;
      sigma_pow *= sigma;
      c += sigma_pow * gram_product * repeated * oldest_power;
    }
  }

  out.scalar_form = c;
  return out;
}

}  // namespace fdrelay
