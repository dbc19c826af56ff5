// SPDX-License-Identifier: Apache-2.0
//
// Stability-driven choice of the relay memory m.
//
// Candidate m = i is accepted once the averaged sum-MSE still grows from slot
// i+1 to slot i+2 (J_{m=i}^{(i+1)} <= J_{m=i}^{(i+2)}). Both slots are taken
// from the same realisations, so the comparison is paired.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fdrelay/channel_model.hpp"

namespace fdrelay {

class NoStableMemory : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MemoryProbe {
  int m = 1;
  double j_at_m_plus_1 = 0.0;
  double j_at_m_plus_2 = 0.0;
  // Standard error of the paired difference j_at_m_plus_1 - j_at_m_plus_2.
  double difference_se = 0.0;
  bool stable = false;
};

struct MemorySelectOptions {
  int realizations = 100;
  int max_candidate = 32;
  // Monte Carlo allowance: a probe is stable when
  //   j_at_m_plus_1 <= j_at_m_plus_2 + noise_z * difference_se.
  // 0 gives the bare comparison.
  double noise_z = 2.0;
  // Compare the objective the design minimised (all a memory-limited relay
  // can evaluate). false compares the sum-MSE over the full residual-SI
  // history instead.
  bool use_design_objective = true;
  int jobs = 1;
};

struct MemorySelection {
  int m_hat = 1;
  std::vector<MemoryProbe> probes;
};

// Runs the proposed design with memory i up to slot i + 2 for i = 1, 2, ...
// and returns the smallest stable i. Throws NoStableMemory past
// options.max_candidate.
MemorySelection select_memory(const SystemConfig& cfg, std::uint64_t seed,
                              const MemorySelectOptions& options = {});

// One probe on its own (used by select_memory and exposed for tests).
MemoryProbe probe_memory(const SystemConfig& cfg, std::uint64_t seed, int m,
                         const MemorySelectOptions& options = {});

}  // namespace fdrelay
