// SPDX-License-Identifier: Apache-2.0

#include "fdrelay/channel_model.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fdrelay {

MemorySpec MemorySpec::finite(int slots) {
  if (slots < 1) {
    throw std::invalid_argument("memory must be a positive slot count");
  }
  return MemorySpec(Kind::kFinite, slots);
}

MemorySpec MemorySpec::parse(std::string_view text) {
  if (text == "inf" || text == "infinite" || text == "infinity") {
    return infinite();
  }
  if (text == "auto") return automatic();
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument("memory must be an integer, 'inf' or 'auto': " +
                                std::string(text));
  }
  return finite(value);
}

std::string MemorySpec::to_string() const {
  switch (kind_) {
    case Kind::kFinite:
      return std::to_string(slots_);
    case Kind::kInfinite:
      return "inf";
    case Kind::kAuto:
      return "auto";
  }
  return "?";
}

void SystemConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("SystemConfig: ") + what);
  };
  require(n_s >= 1, "n_s must be >= 1");
  require(n_r >= 1, "n_r must be >= 1");
  require(p1 >= 0 && p2 >= 0, "source powers must be >= 0");
  require(pr > 0, "relay power must be > 0");
  require(sigma_n_sq_1 >= 0 && sigma_n_sq_2 >= 0 && sigma_n_sq_r >= 0,
          "noise variances must be >= 0");
  require(sigma_e_sq_1 >= 0 && sigma_e_sq_2 >= 0 && sigma_e_sq_r >= 0,
          "loopback-error variances must be >= 0");
  require(max_iterations >= 1, "max_iterations must be >= 1");
  require(convergence_tol >= 0, "convergence_tol must be >= 0");
}

SystemConfig SystemConfig::without_loopback_error() const {
  SystemConfig out = *this;
  out.sigma_e_sq_1 = out.sigma_e_sq_2 = out.sigma_e_sq_r = 0.0;
  return out;
}

SystemConfig config_from_snr_inr(double snr_db, double inr_db, int n_s,
                                 int n_r, MemorySpec memory,
                                 int max_iterations, double convergence_tol) {
  SystemConfig cfg;
  cfg.n_s = n_s;
  cfg.n_r = n_r;
  cfg.p1 = cfg.p2 = cfg.pr = 1.0;
  const double noise = std::pow(10.0, -snr_db / 10.0);
  const double error =
      std::isinf(inr_db) && inr_db < 0 ? 0.0
                                       : noise * std::pow(10.0, inr_db / 10.0);
  cfg.sigma_n_sq_1 = cfg.sigma_n_sq_2 = cfg.sigma_n_sq_r = noise;
  cfg.sigma_e_sq_1 = cfg.sigma_e_sq_2 = cfg.sigma_e_sq_r = error;
  cfg.memory = memory;
  cfg.max_iterations = max_iterations;
  cfg.convergence_tol = convergence_tol;
  return cfg;
}

SystemConfig config_from_json(std::string_view json_text,
                              const SystemConfig& base) {
  const auto doc = nlohmann::json::parse(json_text);
  if (!doc.is_object()) {
    throw std::invalid_argument("config JSON must be an object");
  }
  SystemConfig cfg = base;
  auto read = [&](const char* key, auto& field) {
    if (doc.contains(key)) doc.at(key).get_to(field);
  };
  read("n_s", cfg.n_s);
  read("n_r", cfg.n_r);
  read("p1", cfg.p1);
  read("p2", cfg.p2);
  read("pr", cfg.pr);
  read("sigma_n_sq_1", cfg.sigma_n_sq_1);
  read("sigma_n_sq_2", cfg.sigma_n_sq_2);
  read("sigma_n_sq_r", cfg.sigma_n_sq_r);
  read("sigma_e_sq_1", cfg.sigma_e_sq_1);
  read("sigma_e_sq_2", cfg.sigma_e_sq_2);
  read("sigma_e_sq_r", cfg.sigma_e_sq_r);
  read("max_iterations", cfg.max_iterations);
  read("convergence_tol", cfg.convergence_tol);
  if (doc.contains("memory")) {
    const auto& m = doc.at("memory");
    cfg.memory = m.is_number_integer()
                     ? MemorySpec::finite(m.get<int>())
                     : MemorySpec::parse(m.get<std::string>());
  }
  cfg.validate();
  return cfg;
}

std::string config_to_json(const SystemConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["n_s"] = cfg.n_s;
  doc["n_r"] = cfg.n_r;
  doc["p1"] = cfg.p1;
  doc["p2"] = cfg.p2;
  doc["pr"] = cfg.pr;
  doc["sigma_n_sq_1"] = cfg.sigma_n_sq_1;
  doc["sigma_n_sq_2"] = cfg.sigma_n_sq_2;
  doc["sigma_n_sq_r"] = cfg.sigma_n_sq_r;
  doc["sigma_e_sq_1"] = cfg.sigma_e_sq_1;
  doc["sigma_e_sq_2"] = cfg.sigma_e_sq_2;
  doc["sigma_e_sq_r"] = cfg.sigma_e_sq_r;
  doc["memory"] = cfg.memory.to_string();
  doc["max_iterations"] = cfg.max_iterations;
  doc["convergence_tol"] = cfg.convergence_tol;
  return doc.dump();
}

// splitmix64 finalizer.
static std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed,
                       std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix(seed);
  for (std::uint64_t k : keys) h = splitmix(h ^ splitmix(k));
  return h;
}

SeededRng SeededRng::substream(std::uint64_t seed,
                               std::initializer_list<std::uint64_t> keys) {
  return SeededRng(mix_seed(seed, keys));
}

Complex SeededRng::complex_normal(double variance) {
  const double scale = std::sqrt(variance / 2.0);
  const double re = normal();
  const double im = normal();
  return {scale * re, scale * im};
}

CMatrix SeededRng::complex_gaussian(Eigen::Index rows, Eigen::Index cols,
                                    double variance) {
  CMatrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      out(i, j) = complex_normal(variance);
    }
  }
  return out;
}

namespace {

CMatrix scaled_error(SeededRng& rng, Eigen::Index n, double variance) {
  CMatrix draw = rng.complex_gaussian(n, n, 1.0);
  if (variance == 0.0) return CMatrix::Zero(n, n);
  return draw * std::sqrt(variance);
}

}  // namespace

TimeSlotChannels draw_slot_channels(const SystemConfig& cfg, SeededRng& rng,
                                    int t) {
  TimeSlotChannels ch;
  ch.slot_index = t;
  ch.h_1r = rng.complex_gaussian(cfg.n_r, cfg.n_s);
  ch.h_2r = rng.complex_gaussian(cfg.n_r, cfg.n_s);
  ch.h_r1 = rng.complex_gaussian(cfg.n_s, cfg.n_r);
  ch.h_r2 = rng.complex_gaussian(cfg.n_s, cfg.n_r);
  ch.delta_11 = scaled_error(rng, cfg.n_s, cfg.sigma_e_sq_1);
  ch.delta_22 = scaled_error(rng, cfg.n_s, cfg.sigma_e_sq_2);
  ch.delta_rr = scaled_error(rng, cfg.n_r, cfg.sigma_e_sq_r);
  return ch;
}

TimeSlotChannels draw_slot_channels(const SystemConfig& cfg,
                                    std::uint64_t seed, int realization,
                                    int t) {
  auto rng = SeededRng::substream(
      seed, {static_cast<std::uint64_t>(StreamTag::kChannels),
             static_cast<std::uint64_t>(realization),
             static_cast<std::uint64_t>(t)});
  return draw_slot_channels(cfg, rng, t);
}

}  // namespace fdrelay
