// SPDX-License-Identifier: Apache-2.0
//
// fdrelay: sweeps, single trajectories, memory selection and oracle checks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fdrelay/harness.hpp"
#include "fdrelay/memory_select.hpp"
#include "fdrelay/trajectory.hpp"
#include "fdrelay/validation.hpp"

namespace {

struct CommonFlags {
  std::string snr = "0";
  std::string inr = "0";
  std::string schemes = "proposed";
  std::string memory = "inf";
  std::string format = "csv";
  std::string out;
  std::string config;
  fdrelay::SweepSpec spec;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--snr-db", f.snr, "SNR grid: list a,b,c or start:stop:step");
  app->add_option("--inr-db", f.inr, "INR grid: list or range");
  app->add_option("--ns", f.spec.n_s, "antennas per source");
  app->add_option("--nr", f.spec.n_r, "relay antennas");
  app->add_option("--slots", f.spec.slots, "time slots per realization");
  app->add_option("--memory", f.memory, "relay memory: <int>|inf|auto");
  app->add_option("--realizations", f.spec.realizations);
  app->add_option("--iterations", f.spec.iterations, "alternating iterations");
  app->add_option("--tol", f.spec.tol, "relative convergence tolerance");
  app->add_option("--scheme", f.schemes,
                  "proposed,conventional,relay_only,half_duplex");
  app->add_option("--seed", f.spec.seed)->envname("FDRELAY_SEED");
  app->add_option("--out", f.out, "output file (stdout when omitted)");
  app->add_option("--format", f.format)->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--jobs", f.spec.jobs, "worker threads (0 = all cores)");
  app->add_option("--config", f.config, "JSON file; its keys override flags")
      ->check(CLI::ExistingFile);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fdrelay::SweepSpec resolve(CommonFlags& f) {
  fdrelay::SweepSpec spec = f.spec;
  spec.snr_db = fdrelay::parse_grid(f.snr);
  spec.inr_db = fdrelay::parse_grid(f.inr);
  spec.schemes = fdrelay::parse_scheme_list(f.schemes);
  spec.memory = fdrelay::MemorySpec::parse(f.memory);
  if (!f.config.empty()) {
    spec = fdrelay::sweep_spec_from_json(read_file(f.config), spec);
  }
  spec.validate();
  return spec;
}

void write_text(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out, std::ios::binary | std::ios::trunc);
  if (!file || !(file << text)) {
    throw std::runtime_error("cannot write " + out);
  }
}

int run_sweep_cmd(CommonFlags& f) {
  const fdrelay::SweepSpec spec = resolve(f);
  const fdrelay::SweepResult result = fdrelay::run_sweep(spec);
  const auto format = fdrelay::parse_output_format(f.format);
  if (f.out.empty()) {
    std::cout << fdrelay::format_results(result, format);
  } else {
    fdrelay::emit_results(result, format, f.out);
  }
  for (const auto& fail : result.failures) {
    std::cerr << "failed: snr_db=" << fail.snr_db << " inr_db=" << fail.inr_db
              << ": " << fail.message << '\n';
  }
  return result.ok() ? 0 : 1;
}

int run_trajectory_cmd(CommonFlags& f, int realization) {
  const fdrelay::SweepSpec spec = resolve(f);
  if (spec.memory.is_auto()) {
    throw std::invalid_argument("trajectory: pass an explicit --memory");
  }
  const auto cfg =
      fdrelay::sweep_point_config(spec, spec.snr_db.front(), spec.inr_db.front());
  std::ostringstream os;
  os << "scheme,slot,sum_mse,design_mse,sum_rate,rate_at_source1,"
        "rate_at_source2,iterations\n";
  char buf[512];
  for (auto scheme : spec.schemes) {
    const auto traj =
        fdrelay::run_trajectory(cfg, scheme, spec.seed, realization, spec.slots);
    for (std::size_t k = 0; k < traj.metrics.size(); ++k) {
      const auto& m = traj.metrics[k];
      const int iters =
          traj.solutions.empty() ? 0 : traj.solutions[k].iterations_used;
      std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                    std::string(fdrelay::to_string(scheme)).c_str(),
                    m.slot_index, m.sum_mse, m.design_mse, m.sum_rate,
                    m.rate_at_source1, m.rate_at_source2, iters);
      os << buf;
    }
  }
  write_text(f.out, os.str());
  return 0;
}

int run_select_cmd(CommonFlags& f, fdrelay::MemorySelectOptions opts) {
  const fdrelay::SweepSpec spec = resolve(f);
  opts.realizations = spec.realizations;
  opts.jobs = spec.jobs;
  std::ostringstream os;
  os << "snr_db,inr_db,m_hat\n";
  bool ok = true;
  for (double snr : spec.snr_db) {
    for (double inr : spec.inr_db) {
      auto cfg = fdrelay::sweep_point_config(spec, snr, inr);
      try {
        const auto sel = fdrelay::select_memory(cfg, spec.seed, opts);
        for (const auto& p : sel.probes) {
          std::cerr << "snr_db=" << snr << " inr_db=" << inr << " m=" << p.m
                    << " J(m+1)=" << p.j_at_m_plus_1
                    << " J(m+2)=" << p.j_at_m_plus_2
                    << " se=" << p.difference_se
                    << (p.stable ? " stable" : "") << '\n';
        }
        os << snr << ',' << inr << ',' << sel.m_hat << '\n';
      } catch (const fdrelay::NoStableMemory& e) {
        std::cerr << "snr_db=" << snr << " inr_db=" << inr << ": " << e.what()
                  << '\n';
        ok = false;
      }
    }
  }
  write_text(f.out, os.str());
  return ok ? 0 : 1;
}

int run_validate_cmd(const fdrelay::ValidationOptions& opts) {
  int failed = 0;
  for (const auto& check : fdrelay::run_validation_suite(opts)) {
    std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << "  "
              << check.detail << '\n';
    if (!check.passed) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full-duplex two-way MIMO relay beamforming simulator"};
  app.require_subcommand(1);

  CommonFlags sweep_flags, traj_flags, select_flags;
  sweep_flags.spec.last_slot_only = false;

  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over SNR x INR");
  add_common(sweep, sweep_flags);
  sweep->add_flag("--last-slot-only", sweep_flags.spec.last_slot_only,
                  "emit only the final slot");

  auto* traj = app.add_subcommand("trajectory", "one realization, every slot");
  add_common(traj, traj_flags);
  int realization = 0;
  traj->add_option("--realization", realization, "realization index");

  auto* select =
      app.add_subcommand("select-memory", "stability-based memory selection");
  add_common(select, select_flags);
  fdrelay::MemorySelectOptions select_opts;
  select->add_option("--max-memory", select_opts.max_candidate);
  select->add_option("--noise-z", select_opts.noise_z,
                     "allowed J increase in standard errors");
  select->add_flag("!--full-history-objective",
                   select_opts.use_design_objective,
                   "compare the sum-MSE over the full residual-SI history");

  auto* validate = app.add_subcommand("validate", "run the oracle checks");
  fdrelay::ValidationOptions vopts;
  validate->add_option("--samples", vopts.samples);
  validate->add_option("--budget", vopts.brute_force_budget);
  validate->add_option("--instances", vopts.instances);
  validate->add_option("--seed", vopts.seed)->envname("FDRELAY_SEED");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) return run_sweep_cmd(sweep_flags);
    if (*traj) return run_trajectory_cmd(traj_flags, realization);
    if (*select) return run_select_cmd(select_flags, select_opts);
    if (*validate) return run_validate_cmd(vopts);
  } catch (const std::exception& e) {
    std::cerr << "fdrelay: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
