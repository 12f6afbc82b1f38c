#pragma once

// JSON schemas shared by the command-line tool: gap-width / density specs
// and experiment configurations.

#include <complex>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cygan/error.hpp"
#include "cygan/gapwidth.hpp"
#include "cygan/spectra.hpp"
#include "cygan/stats.hpp"

namespace cygan {

using Json = nlohmann::json;

// {"kind", "polys", "lambdas", "independent", "lambda_den", "A", "strict",
//  "quad_points"}; only "kind" is required for the slowly varying families.
struct OmegaSpec {
  std::string kind = "inv_log";
  std::vector<std::vector<std::complex<double>>> polys;
  std::vector<double> lambdas;
  bool independent = true;
  long long lambda_den = 1;
  int A = 2;
  bool strict = true;
  int quad_points = 64;

  bool almost_periodic() const { return kind == "product" || kind == "sum"; }

  friend bool operator==(const OmegaSpec&, const OmegaSpec&) = default;
};

inline Json to_json(const OmegaSpec& s) {
  Json j;
  j["kind"] = s.kind;
  if (s.almost_periodic()) {
    Json polys = Json::array();
    for (const auto& p : s.polys) {
      Json coeffs = Json::array();
      for (const auto& c : p) coeffs.push_back(Json::array({c.real(), c.imag()}));
      polys.push_back(coeffs);
    }
    j["polys"] = polys;
    j["lambdas"] = s.lambdas;
    j["independent"] = s.independent;
    j["lambda_den"] = s.lambda_den;
    j["A"] = s.A;
    j["strict"] = s.strict;
    j["quad_points"] = s.quad_points;
  }
  return j;
}

namespace detail {

template <class T>
T json_get(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline OmegaSpec omega_spec_from_json(const Json& j) {
  if (j.is_string()) return omega_spec_from_json(Json{{"kind", j.get<std::string>()}});
  if (!j.is_object()) throw PreconditionError("gap-width spec must be a JSON object or a kind name");
  OmegaSpec s;
  s.kind = detail::json_get<std::string>(j, "kind", "");
  if (!s.almost_periodic() && !parse_slowly_varying(s.kind))
    throw PreconditionError("unknown gap-width kind '" + s.kind + "'");
  if (!s.almost_periodic()) return s;
  if (!j.contains("polys") || !j["polys"].is_array()) throw PreconditionError("spec needs a 'polys' array");
  for (const auto& p : j["polys"]) {
    std::vector<std::complex<double>> coeffs;
    for (const auto& c : p) {
      if (c.is_number()) {
        coeffs.emplace_back(c.get<double>(), 0.0);
      } else if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number()) {
        coeffs.emplace_back(c[0].get<double>(), c[1].get<double>());
      } else {
        throw PreconditionError("polynomial coefficients must be numbers or [re, im] pairs");
      }
    }
    s.polys.push_back(std::move(coeffs));
  }
  s.lambdas = detail::json_get<std::vector<double>>(j, "lambdas", std::vector<double>(s.polys.size(), 1.0));
  s.independent = detail::json_get<bool>(j, "independent", true);
  s.lambda_den = detail::json_get<long long>(j, "lambda_den", 1);
  s.A = detail::json_get<int>(j, "A", 2);
  s.strict = detail::json_get<bool>(j, "strict", true);
  s.quad_points = detail::json_get<int>(j, "quad_points", 64);
  if (s.lambda_den < 1) throw PreconditionError("'lambda_den' must be positive");
  return s;
}

inline CombineMode combine_mode(const OmegaSpec& s) {
  if (s.kind == "product") return CombineMode::product;
  if (s.kind == "sum") return CombineMode::sum;
  throw PreconditionError("spec kind '" + s.kind + "' is not an almost periodic construction");
}

inline AlmostPeriodicGap almost_periodic_gap(const OmegaSpec& s) {
  AlmostPeriodicGap g;
  g.polys = s.polys;
  g.lambdas = s.lambdas;
  g.independent = s.independent;
  g.lambda_denominator = s.lambda_den;
  g.A = s.A;
  g.mode = combine_mode(s);
  g.strict = s.strict;
  return g;
}

inline GapWidth make_gap_width(const OmegaSpec& s) {
  if (s.almost_periodic()) return make_almost_periodic(almost_periodic_gap(s));
  return make_slowly_varying(*parse_slowly_varying(s.kind));
}

inline DensitySpec make_density_spec(const OmegaSpec& s) {
  return DensitySpec(combine_mode(s), s.polys, s.quad_points);
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw PreconditionError("malformed JSON in '" + path + "': " + e.what());
  }
}

// Accepts a kind name, inline JSON, or a path to a JSON file.
inline OmegaSpec parse_omega_argument(const std::string& arg) {
  if (parse_slowly_varying(arg) || arg == "product" || arg == "sum") return omega_spec_from_json(Json(arg));
  if (!arg.empty() && arg.front() == '{') {
    try {
      return omega_spec_from_json(Json::parse(arg));
    } catch (const nlohmann::json::parse_error& e) {
      throw PreconditionError(std::string("malformed inline gap-width JSON: ") + e.what());
    }
  }
  return omega_spec_from_json(read_json_file(arg));
}

struct ExperimentConfig {
  OmegaSpec omega;
  double X = 100.0;
  std::size_t samples = 100;
  std::uint64_t Q = 64;
  SampleMode mode = SampleMode::exact;
  int j_max = 8;
  double offset = 0.5;
  std::string out_dir = ".";
  unsigned threads = 0;  // 0: machine parallelism

  void validate() const {
    if (!(X >= 10.0)) throw PreconditionError("config: X must be >= 10");
    if (samples < 10) throw PreconditionError("config: samples must be >= 10");
    if (Q < 1) throw PreconditionError("config: Q must be >= 1");
    if (j_max < 2 || j_max > 8 || j_max % 2) throw PreconditionError("config: j_max must be even and in [2, 8]");
    if (!(offset > 0.0 && offset < 1.0)) throw PreconditionError("config: offset must lie in (0, 1)");
  }

  unsigned thread_count() const { return threads == 0 ? default_thread_count() : threads; }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline Json to_json(const ExperimentConfig& c) {
  return Json{{"omega", to_json(c.omega)}, {"X", c.X},         {"samples", c.samples},
              {"Q", c.Q},                  {"mode", to_string(c.mode)}, {"j_max", c.j_max},
              {"offset", c.offset},        {"out", c.out_dir}, {"threads", c.threads}};
}

inline ExperimentConfig experiment_config_from_json(const Json& j) {
  if (!j.is_object()) throw PreconditionError("experiment config must be a JSON object");
  ExperimentConfig c;
  if (j.contains("omega")) c.omega = omega_spec_from_json(j["omega"]);
  c.X = detail::json_get<double>(j, "X", c.X);
  c.samples = detail::json_get<std::size_t>(j, "samples", c.samples);
  c.Q = detail::json_get<std::uint64_t>(j, "Q", c.Q);
  const std::string mode = detail::json_get<std::string>(j, "mode", "exact");
  if (mode != "exact" && mode != "fast") throw PreconditionError("config: mode must be 'exact' or 'fast'");
  c.mode = mode == "exact" ? SampleMode::exact : SampleMode::fast;
  c.j_max = detail::json_get<int>(j, "j_max", c.j_max);
  c.offset = detail::json_get<double>(j, "offset", c.offset);
  c.out_dir = detail::json_get<std::string>(j, "out", c.out_dir);
  c.threads = detail::json_get<unsigned>(j, "threads", c.threads);
  c.validate();
  return c;
}

}  // namespace cygan
