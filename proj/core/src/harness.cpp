// SPDX-License-Identifier: Apache-2.0

#include "fdrelay/harness.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "fdrelay/trajectory.hpp"
#include "fdrelay/validation.hpp"
#include "parallel.hpp"

namespace fdrelay {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view text) {
  const std::string s(trim(text));
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  return v;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<double> parse_grid(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw std::invalid_argument("empty grid");
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) {
      throw std::invalid_argument("range must be start:stop:step: " +
                                  std::string(text));
    }
    const double start = parse_number(parts[0]);
    const double stop = parse_number(parts[1]);
    const double step = parse_number(parts[2]);
    if (step == 0.0 || (stop - start) / step < 0 || !std::isfinite(start) ||
        !std::isfinite(stop)) {
      throw std::invalid_argument("range step does not reach stop: " +
                                  std::string(text));
    }
    const auto n = static_cast<long long>(
        std::floor((stop - start) / step + 1e-9));
    std::vector<double> out;
    for (long long k = 0; k <= n; ++k) out.push_back(start + k * step);
    return out;
  }
  std::vector<double> out;
  for (auto part : split(text, ',')) out.push_back(parse_number(part));
  return out;
}

std::vector<Scheme> parse_scheme_list(std::string_view text) {
  std::vector<Scheme> out;
  for (auto part : split(trim(text), ',')) {
    out.push_back(parse_scheme(trim(part)));
  }
  return out;
}

void SweepSpec::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("SweepSpec: ") + what);
  };
  require(!snr_db.empty() && !inr_db.empty(), "grids must be non-empty");
  require(!schemes.empty(), "at least one scheme");
  require(realizations >= 1, "realizations must be >= 1");
  require(slots >= 1, "slots must be >= 1");
  require(n_s >= 1 && n_r >= 1, "antenna counts must be >= 1");
  require(iterations >= 1, "iterations must be >= 1");
  require(tol >= 0, "tol must be >= 0");
}

SweepSpec sweep_spec_from_json(std::string_view json_text,
                               const SweepSpec& base) {
  const auto doc = nlohmann::json::parse(json_text);
  if (!doc.is_object()) {
    throw std::invalid_argument("sweep config must be a JSON object");
  }
  SweepSpec spec = base;
  auto grid = [&](const char* key, std::vector<double>& field) {
    if (!doc.contains(key)) return;
    const auto& v = doc.at(key);
    if (v.is_string()) {
      field = parse_grid(v.get<std::string>());
    } else if (v.is_array()) {
      field = v.get<std::vector<double>>();
    } else {
      field = {v.get<double>()};
    }
  };
  grid("snr_db", spec.snr_db);
  grid("inr_db", spec.inr_db);
  const char* scheme_key = doc.contains("schemes") ? "schemes" : "scheme";
  if (doc.contains(scheme_key)) {
    const auto& v = doc.at(scheme_key);
    if (v.is_array()) {
      spec.schemes.clear();
      for (const auto& s : v) {
        spec.schemes.push_back(parse_scheme(s.get<std::string>()));
      }
    } else {
      spec.schemes = parse_scheme_list(v.get<std::string>());
    }
  }
  auto read = [&](const char* key, auto& field) {
    if (doc.contains(key)) doc.at(key).get_to(field);
  };
  read("ns", spec.n_s);
  read("n_s", spec.n_s);
  read("nr", spec.n_r);
  read("n_r", spec.n_r);
  read("slots", spec.slots);
  read("realizations", spec.realizations);
  read("iterations", spec.iterations);
  read("max_iterations", spec.iterations);
  read("tol", spec.tol);
  read("convergence_tol", spec.tol);
  read("seed", spec.seed);
  read("jobs", spec.jobs);
  if (doc.contains("memory")) {
    const auto& m = doc.at("memory");
    spec.memory = m.is_number_integer()
                      ? MemorySpec::finite(m.get<int>())
                      : MemorySpec::parse(m.get<std::string>());
  }
  spec.validate();
  return spec;
}

SystemConfig sweep_point_config(const SweepSpec& spec, double snr_db,
                                double inr_db) {
  return config_from_snr_inr(snr_db, inr_db, spec.n_s, spec.n_r, spec.memory,
                             spec.iterations, spec.tol);
}

std::string config_hash(const SystemConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config_to_json(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();

  struct Point {
    double snr = 0.0;
    double inr = 0.0;
    SystemConfig cfg;
    std::optional<int> m_hat;
    std::string failure;
  };
  std::vector<Point> points;
  for (double snr : spec.snr_db) {
    for (double inr : spec.inr_db) {
      Point p;
      p.snr = snr;
      p.inr = inr;
      try {
        p.cfg = sweep_point_config(spec, snr, inr);
        p.cfg.validate();
        if (p.cfg.memory.is_auto()) {
          MemorySelectOptions opts = spec.selection;
          opts.realizations = spec.realizations;
          opts.jobs = spec.jobs;
          const MemorySelection sel = select_memory(p.cfg, spec.seed, opts);
          p.m_hat = sel.m_hat;
          p.cfg.memory = MemorySpec::finite(sel.m_hat);
        }
      } catch (const std::exception& e) {
        p.failure = e.what();
      }
      points.push_back(std::move(p));
    }
  }

  // One task per (point, realization); each owns its output slot.
  struct Task {
    std::size_t point = 0;
    int realization = 0;
    std::vector<std::vector<SlotMetrics>> per_scheme;
    std::string error;
  };
  std::vector<Task> tasks;
  for (std::size_t g = 0; g < points.size(); ++g) {
    if (!points[g].failure.empty()) continue;
    for (int r = 0; r < spec.realizations; ++r) {
      tasks.push_back({g, r, {}, {}});
    }
  }

  detail::parallel_for(tasks.size(), spec.jobs, [&](std::size_t i) {
    Task& task = tasks[i];
    const Point& p = points[task.point];
    try {
      for (Scheme scheme : spec.schemes) {
        TrajectoryResult traj = run_trajectory(p.cfg, scheme, spec.seed,
                                               task.realization, spec.slots);
        for (const SlotMetrics& m : traj.metrics) {
          if (!std::isfinite(m.sum_mse) || !std::isfinite(m.sum_rate)) {
            throw std::runtime_error(
                std::string("non-finite metric for ") +
                std::string(to_string(scheme)) + " at slot " +
                std::to_string(m.slot_index));
          }
        }
        task.per_scheme.push_back(std::move(traj.metrics));
      }
    } catch (const std::exception& e) {
      task.error = "realization " + std::to_string(task.realization) + ": " +
                   e.what();
    }
  });

  SweepResult result;
  std::size_t next_task = 0;
  for (std::size_t g = 0; g < points.size(); ++g) {
    Point& p = points[g];
    if (p.failure.empty()) {
      const std::size_t first = next_task;
      next_task += static_cast<std::size_t>(spec.realizations);
      for (std::size_t i = first; i < next_task; ++i) {
        if (!tasks[i].error.empty()) {
          p.failure = tasks[i].error;
          break;
        }
      }
      if (p.failure.empty()) {
        const std::string hash = config_hash(p.cfg);
        const int first_slot = spec.last_slot_only ? spec.slots : 1;
        for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
          for (int slot = first_slot; slot <= spec.slots; ++slot) {
            RunningStats mse, rate;
            for (std::size_t i = first; i < next_task; ++i) {
              const SlotMetrics& m = tasks[i].per_scheme[s][slot - 1];
              mse.add(m.sum_mse);
              rate.add(m.sum_rate);
            }
            const McEstimate mse_est = mse.estimate();
            const McEstimate rate_est = rate.estimate();
            SweepRecord rec;
            rec.snr_db = p.snr;
            rec.inr_db = p.inr;
            rec.scheme = spec.schemes[s];
            rec.slot = slot;
            rec.m = p.cfg.memory.to_string();
            rec.mean_sum_mse = mse_est.mean;
            rec.se_sum_mse = mse_est.std_error;
            rec.mean_sum_rate = rate_est.mean;
            rec.se_sum_rate = rate_est.std_error;
            rec.n_realizations = static_cast<int>(mse_est.samples);
            rec.m_hat = p.m_hat;
            rec.seed = spec.seed;
            rec.config_hash = hash;
            result.records.push_back(std::move(rec));
          }
        }
      }
    }
    if (!p.failure.empty()) {
      result.failures.push_back({p.snr, p.inr, p.failure});
    }
  }
  return result;
}

OutputFormat parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::kCsv;
  if (text == "json") return OutputFormat::kJson;
  throw std::invalid_argument("format must be csv or json: " +
                              std::string(text));
}

std::string format_results(const SweepResult& result, OutputFormat format) {
  if (format == OutputFormat::kCsv) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const SweepRecord& r : result.records) {
      out += fmt_double(r.snr_db) + ',' + fmt_double(r.inr_db) + ',' +
             std::string(to_string(r.scheme)) + ',' + std::to_string(r.slot) +
             ',' + r.m + ',' + fmt_double(r.mean_sum_mse) + ',' +
             fmt_double(r.se_sum_mse) + ',' + fmt_double(r.mean_sum_rate) +
             ',' + fmt_double(r.se_sum_rate) + ',' +
             std::to_string(r.n_realizations) + ',' +
             (r.m_hat ? std::to_string(*r.m_hat) : std::string()) + ',' +
             std::to_string(r.seed) + ',' + r.config_hash + '\n';
    }
    return out;
  }
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const SweepRecord& r : result.records) {
    nlohmann::ordered_json o;
    o["snr_db"] = r.snr_db;
    o["inr_db"] = r.inr_db;
    o["scheme"] = std::string(to_string(r.scheme));
    o["slot"] = r.slot;
    o["m"] = r.m;
    o["mean_sum_mse"] = r.mean_sum_mse;
    o["se_sum_mse"] = r.se_sum_mse;
    o["mean_sum_rate"] = r.mean_sum_rate;
    o["se_sum_rate"] = r.se_sum_rate;
    o["n_realizations"] = r.n_realizations;
    o["m_hat"] = r.m_hat ? nlohmann::ordered_json(*r.m_hat)
                         : nlohmann::ordered_json(nullptr);
    o["seed"] = r.seed;
    o["config_hash"] = r.config_hash;
    doc.push_back(std::move(o));
  }
  return doc.dump(2) + '\n';
}

void emit_results(const SweepResult& result, OutputFormat format,
                  const std::filesystem::path& path) {
  const std::string text = format_results(result, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<SweepRecord> parse_results(std::string_view text,
                                       OutputFormat format) {
  std::vector<SweepRecord> out;
  if (format == OutputFormat::kJson) {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& o : doc) {
      SweepRecord r;
      r.snr_db = o.at("snr_db").get<double>();
      r.inr_db = o.at("inr_db").get<double>();
      r.scheme = parse_scheme(o.at("scheme").get<std::string>());
      r.slot = o.at("slot").get<int>();
      r.m = o.at("m").get<std::string>();
      r.mean_sum_mse = o.at("mean_sum_mse").get<double>();
      r.se_sum_mse = o.at("se_sum_mse").get<double>();
      r.mean_sum_rate = o.at("mean_sum_rate").get<double>();
      r.se_sum_rate = o.at("se_sum_rate").get<double>();
      r.n_realizations = o.at("n_realizations").get<int>();
      if (!o.at("m_hat").is_null()) r.m_hat = o.at("m_hat").get<int>();
      r.seed = o.at("seed").get<std::uint64_t>();
      r.config_hash = o.at("config_hash").get<std::string>();
      out.push_back(std::move(r));
    }
    return out;
  }

  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::invalid_argument("CSV header does not match");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 13) {
      throw std::invalid_argument("CSV row has " + std::to_string(f.size()) +
                                  " fields: " + line);
    }
    SweepRecord r;
    r.snr_db = parse_number(f[0]);
    r.inr_db = parse_number(f[1]);
    r.scheme = parse_scheme(f[2]);
    r.slot = static_cast<int>(parse_number(f[3]));
    r.m = std::string(f[4]);
    r.mean_sum_mse = parse_number(f[5]);
    r.se_sum_mse = parse_number(f[6]);
    r.mean_sum_rate = parse_number(f[7]);
    r.se_sum_rate = parse_number(f[8]);
    r.n_realizations = static_cast<int>(parse_number(f[9]));
    if (!f[10].empty()) r.m_hat = static_cast<int>(parse_number(f[10]));
    std::uint64_t seed = 0;
    const auto [ptr, ec] =
        std::from_chars(f[11].data(), f[11].data() + f[11].size(), seed);
    if (ec != std::errc() || ptr != f[11].data() + f[11].size()) {
      throw std::invalid_argument("bad seed field: " + std::string(f[11]));
    }
    r.seed = seed;
    r.config_hash = std::string(f[12]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace fdrelay
