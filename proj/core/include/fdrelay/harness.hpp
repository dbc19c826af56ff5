// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo sweeps over (SNR, INR) grids and their CSV / JSON export.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdrelay/channel_model.hpp"
#include "fdrelay/memory_select.hpp"
#include "fdrelay/metrics.hpp"

namespace fdrelay {

// "a,b,c" or "start:stop:step" (inclusive of stop). Throws on junk.
std::vector<double> parse_grid(std::string_view text);
std::vector<Scheme> parse_scheme_list(std::string_view text);

struct SweepSpec {
  std::vector<double> snr_db{0.0};
  std::vector<double> inr_db{0.0};
  std::vector<Scheme> schemes{Scheme::kProposed};
  int n_s = 2;
  int n_r = 5;
  int slots = 10;
  MemorySpec memory = MemorySpec::infinite();
  int realizations = 100;
  int iterations = 30;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  int jobs = 1;
  // Only emit the last slot instead of every slot 1..slots.
  bool last_slot_only = false;
  // Used when memory is auto; its realizations/jobs follow the sweep's.
  MemorySelectOptions selection;

  void validate() const;
};

// Keys mirror the CLI flags with underscores (snr_db, inr_db, schemes, ns,
// nr, slots, memory, realizations, iterations, tol, seed, jobs); grids and
// schemes may be strings in flag syntax or JSON arrays. Missing keys keep
// the values of `base`.
SweepSpec sweep_spec_from_json(std::string_view json_text,
                               const SweepSpec& base = {});

struct SweepRecord {
  double snr_db = 0.0;
  double inr_db = 0.0;
  Scheme scheme = Scheme::kProposed;
  int slot = 0;
  std::string m;  // memory used: integer or "inf"
  double mean_sum_mse = 0.0;
  double se_sum_mse = 0.0;
  double mean_sum_rate = 0.0;
  double se_sum_rate = 0.0;
  int n_realizations = 0;
  std::optional<int> m_hat;  // only when memory was auto
  std::uint64_t seed = 0;
  std::string config_hash;

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

struct SweepFailure {
  double snr_db = 0.0;
  double inr_db = 0.0;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  std::vector<SweepFailure> failures;
  bool ok() const { return failures.empty(); }
};

// The per-point config the sweep runs with (before memory auto-selection).
SystemConfig sweep_point_config(const SweepSpec& spec, double snr_db,
                                double inr_db);

// 64-bit FNV-1a of config_to_json(cfg), as 16 hex digits.
std::string config_hash(const SystemConfig& cfg);

// Records come out ordered by (snr, inr) in grid order, then scheme order,
// then slot. The result does not depend on spec.jobs.
SweepResult run_sweep(const SweepSpec& spec);

enum class OutputFormat { kCsv, kJson };
OutputFormat parse_output_format(std::string_view text);

std::string format_results(const SweepResult& result, OutputFormat format);
// Throws std::runtime_error naming the path on I/O failure.
void emit_results(const SweepResult& result, OutputFormat format,
                  const std::filesystem::path& path);

std::vector<SweepRecord> parse_results(std::string_view text,
                                       OutputFormat format);

inline constexpr std::string_view kCsvHeader =
    "snr_db,inr_db,scheme,slot,m,mean_sum_mse,se_sum_mse,mean_sum_rate,"
    "se_sum_rate,n_realizations,m_hat,seed,config_hash";

}  // namespace fdrelay
