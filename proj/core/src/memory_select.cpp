// SPDX-License-Identifier: Apache-2.0

#include "fdrelay/memory_select.hpp"

#include <cmath>
#include <string>

#include "fdrelay/trajectory.hpp"
#include "parallel.hpp"

namespace fdrelay {

MemoryProbe probe_memory(const SystemConfig& cfg, std::uint64_t seed, int m,
                         const MemorySelectOptions& options) {
  if (options.realizations < 1) {
    throw std::invalid_argument("select_memory needs realizations >= 1");
  }
  SystemConfig probe_cfg = cfg;
  probe_cfg.memory = MemorySpec::finite(m);
  const auto n = static_cast<std::size_t>(options.realizations);

  std::vector<double> j1(n), j2(n);
  detail::parallel_for(n, options.jobs, [&](std::size_t r) {
    const TrajectoryResult traj = run_trajectory(
        probe_cfg, Scheme::kProposed, seed, static_cast<int>(r), m + 2);
    const SlotMetrics& a = traj.metrics[m];      // slot m + 1
    const SlotMetrics& b = traj.metrics[m + 1];  // slot m + 2
    j1[r] = options.use_design_objective ? a.design_mse : a.sum_mse;
    j2[r] = options.use_design_objective ? b.design_mse : b.sum_mse;
  });

  MemoryProbe probe;
  probe.m = m;
  double sum1 = 0.0, sum2 = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    sum1 += j1[r];
    sum2 += j2[r];
  }
  probe.j_at_m_plus_1 = sum1 / n;
  probe.j_at_m_plus_2 = sum2 / n;
  const double mean_diff = probe.j_at_m_plus_1 - probe.j_at_m_plus_2;
  if (n > 1) {
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double d = (j1[r] - j2[r]) - mean_diff;
      ss += d * d;
    }
    probe.difference_se = std::sqrt(ss / (n - 1) / n);
  }
  probe.stable = mean_diff <= options.noise_z * probe.difference_se;
  return probe;
}

MemorySelection select_memory(const SystemConfig& cfg, std::uint64_t seed,
                              const MemorySelectOptions& options) {
  MemorySelection out;
  for (int i = 1; i <= options.max_candidate; ++i) {
    out.probes.push_back(probe_memory(cfg, seed, i, options));
    if (out.probes.back().stable) {
      out.m_hat = i;
      return out;
    }
  }
  throw NoStableMemory("no stable memory up to m = " +
                       std::to_string(options.max_candidate));
}

}  // namespace fdrelay
