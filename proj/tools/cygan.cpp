// cygan: command-line driver for lattice counts in the Cygan-Koranyi ball,
// shell-error sampling, expansion residuals, limiting densities and gap-width
// diagnostics.

#include <cstdio>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cygan/config.hpp"
#include "cygan/stats.hpp"
#include "cygan/voronoi.hpp"

namespace {

using namespace cygan;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitTestFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

// Flags shared by sample / moments / expand. Explicit flags override --config.
struct ExperimentFlags {
  std::string config_path;
  std::string omega = "inv_log";
  double X = 100.0;
  std::size_t samples = 100;
  std::uint64_t Q = 64;
  std::string mode = "exact";
  int j_max = 8;
  double offset = 0.5;
  std::string out = ".";
  unsigned threads = 0;
  std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> overrides;
};

void add_experiment_options(CLI::App* cmd, ExperimentFlags& f, bool with_mode, bool with_j_max) {
  cmd->add_option("--config", f.config_path, "ExperimentConfig JSON file");
  auto add = [&](CLI::Option* opt, std::function<void(ExperimentConfig&)> apply) {
    f.overrides.emplace_back(opt, std::move(apply));
  };
  add(cmd->add_option("--omega", f.omega, "gap width: kind name, inline JSON, or JSON file"),
      [&f](ExperimentConfig& c) { c.omega = parse_omega_argument(f.omega); });
  add(cmd->add_option("--X", f.X, "segment start X (samples lie in (X, 2X))"),
      [&f](ExperimentConfig& c) { c.X = f.X; });
  add(cmd->add_option("--samples", f.samples, "number of sample radii S"),
      [&f](ExperimentConfig& c) { c.samples = f.samples; });
  add(cmd->add_option("--Q", f.Q, "radius denominator"), [&f](ExperimentConfig& c) { c.Q = f.Q; });
  add(cmd->add_option("--offset", f.offset, "grid phase offset in (0, 1)"),
      [&f](ExperimentConfig& c) { c.offset = f.offset; });
  add(cmd->add_option("--threads", f.threads, "worker threads (0: machine parallelism)"),
      [&f](ExperimentConfig& c) { c.threads = f.threads; });
  add(cmd->add_option("--out", f.out, "artifact directory"), [&f](ExperimentConfig& c) { c.out_dir = f.out; });
  if (with_mode) {
    add(cmd->add_option("--mode", f.mode, "exact counting or the truncated expansion")
            ->check(CLI::IsMember({"exact", "fast"})),
        [&f](ExperimentConfig& c) { c.mode = f.mode == "fast" ? SampleMode::fast : SampleMode::exact; });
  }
  if (with_j_max) {
    add(cmd->add_option("--j-max", f.j_max, "largest empirical moment (even, <= 8)"),
        [&f](ExperimentConfig& c) { c.j_max = f.j_max; });
  }
}

ExperimentConfig resolve(const ExperimentFlags& f) {
  ExperimentConfig c = f.config_path.empty() ? ExperimentConfig{} : experiment_config_from_json(read_json_file(f.config_path));
  for (const auto& [opt, apply] : f.overrides)
    if (opt->count() > 0) apply(c);
  c.validate();
  return c;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvFile {
 public:
  explicit CsvFile(const fs::path& path) : f_(std::fopen(path.string().c_str(), "w")) {
    if (!f_) throw ResourceError("cannot write '" + path.string() + "'");
  }
  ~CsvFile() { std::fclose(f_); }
  CsvFile(const CsvFile&) = delete;
  CsvFile& operator=(const CsvFile&) = delete;

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) std::fprintf(f_, i ? ",%s" : "%s", cells[i].c_str());
    std::fputc('\n', f_);
  }

 private:
  std::FILE* f_;
};

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ResourceError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ResourceError("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

R2Table table_for(const ExperimentConfig& c, const SampleGrid& grid) {
  return build_r2(c.mode == SampleMode::exact ? grid.r2_limit_exact() : fast_cutoff(c.X));
}

Json experiment_header(const ExperimentConfig& c) {
  return Json{{"X", c.X},
              {"S", c.samples},
              {"Q", c.Q},
              {"mode", to_string(c.mode)},
              {"offset", c.offset},
              {"omega", to_json(c.omega)}};
}

// --- count -----------------------------------------------------------------

int cmd_count(const std::string& x_arg, const std::string& method, bool both) {
  const RadiusPoint x = RadiusPoint::parse(x_arg);
  std::optional<std::uint64_t> fast, brute;
  if (both || method == "fast") fast = count_ball_fast(x, build_r2(x.floor_square()));
  if (both || method == "brute") brute = count_ball_brute(x);
  if (both && *fast != *brute) {
    std::cerr << "count mismatch at x = " << x.to_string() << ": fast " << *fast << ", brute " << *brute << '\n';
    return kExitTestFailure;
  }
  std::cout << (fast ? *fast : *brute) << '\n';
  if (both) std::cerr << "fast and brute counts agree\n";
  return kExitOk;
}

// --- sample / moments --------------------------------------------------------

int cmd_sample(const ExperimentConfig& c) {
  const auto out = prepare_out(c.out_dir);
  const GapWidth omega = make_gap_width(c.omega);
  const SampleGrid grid(c.X, c.samples, c.Q, c.offset);
  const R2Table r2 = table_for(c, grid);
  std::vector<double> normalized;
  CsvFile csv(out / "samples.csv");
  csv.row({"x", "omega_x", "shell_count", "error", "normalized"});
  if (c.mode == SampleMode::exact) {
    for (const auto& s : sample_shells(omega, grid, r2, c.thread_count())) {
      csv.row({fmt(s.x), fmt(s.omega_x), std::to_string(s.shell_count), fmt(s.error), fmt(s.normalized)});
      normalized.push_back(s.normalized);
    }
  } else {
    normalized = sample_errors(omega, grid, r2, SampleMode::fast, c.thread_count());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.points()[i].value();
      csv.row({fmt(x), fmt(omega(x)), "", fmt(normalized[i] * x * x), fmt(normalized[i])});
    }
  }
  Json summary = experiment_header(c);
  summary["sigma2"] = variance_sigma2(normalized);
  summary["mean"] = compensated_mean(normalized);
  write_json(out / "sample_summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_moments(const ExperimentConfig& c) {
  const auto out = prepare_out(c.out_dir);
  const GapWidth omega = make_gap_width(c.omega);
  const SampleGrid grid(c.X, c.samples, c.Q, c.offset);
  const R2Table r2 = table_for(c, grid);
  const auto dist = make_empirical(sample_errors(omega, grid, r2, c.mode, c.thread_count()), c.j_max);

  CsvFile values(out / "distribution.csv");
  values.row({"normalized"});
  for (double v : dist.normalized) values.row({fmt(v)});
  CsvFile hist(out / "histogram.csv");
  hist.row({"lo", "hi", "count"});
  for (std::size_t b = 0; b < dist.counts.size(); ++b)
    hist.row({fmt(dist.bin_edges[b]), fmt(dist.bin_edges[b + 1]), std::to_string(dist.counts[b])});

  Json summary = experiment_header(c);
  const double sigma2 = dist.sigma * dist.sigma;
  summary["sigma2"] = sigma2;
  summary["mean"] = dist.mean;
  Json moments = Json::object(), predicted = Json::object();
  for (const auto& [j, v] : dist.moments) moments[std::to_string(j)] = v;
  summary["moments"] = moments;
  summary["ks_normal"] = ks_distance(dist, normal_cdf);
  if (c.omega.almost_periodic()) {
    const DensitySpec spec = make_density_spec(c.omega);
    summary["ks_mixture"] = ks_distance(dist, [&spec](double a) { return mixture_cdf(spec, a); });
    for (int j = 2; j <= c.j_max; j += 2) predicted[std::to_string(j)] = predicted_moment(spec, j);
  } else {
    for (int j = 2; j <= c.j_max; j += 2) predicted[std::to_string(j)] = predicted_moment(j);
    const double m2 = m_j(omega, c.X, std::max<std::size_t>(c.samples, 1000), 2);
    summary["m2"] = m2;
    summary["sigma2_over_32m2"] = sigma2 / (32.0 * m2);
  }
  summary["predicted_moments"] = predicted;
  write_json(out / "summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  return kExitOk;
}

// --- expand ------------------------------------------------------------------

int cmd_expand(const ExperimentConfig& c) {
  const auto out = prepare_out(c.out_dir);
  const GapWidth omega = make_gap_width(c.omega);
  const SampleGrid grid(c.X, c.samples, c.Q, c.offset);
  const R2Table r2 = build_r2(grid.r2_limit_exact());
  const std::size_t S = grid.size();
  std::vector<double> exact(S), rhs(S);
  parallel_for(S, c.thread_count(), [&](std::size_t i) {
    exact[i] = shell_sample(grid.points()[i], omega, r2).normalized;
    rhs[i] = expansion_rhs(grid.points()[i], c.X, omega, r2);
  });
  CsvFile csv(out / "expand.csv");
  csv.row({"x", "omega_x", "exact", "rhs", "residual"});
  std::vector<double> residual(S);
  std::size_t inside = 0;
  const double envelope = residual_envelope(c.X);
  for (std::size_t i = 0; i < S; ++i) {
    const double x = grid.points()[i].value();
    residual[i] = exact[i] - rhs[i];
    if (std::abs(residual[i]) <= envelope) ++inside;
    csv.row({fmt(x), fmt(omega(x)), fmt(exact[i]), fmt(rhs[i]), fmt(residual[i])});
  }
  std::vector<double> mag(S);
  for (std::size_t i = 0; i < S; ++i) mag[i] = std::abs(residual[i]);
  std::sort(mag.begin(), mag.end());
  const auto p95 = mag[static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(S))) - 1];
  Json summary = experiment_header(c);
  summary["median_residual"] = median(mag);
  summary["p95_residual"] = p95;
  summary["max_residual"] = mag.back();
  summary["envelope"] = envelope;
  summary["within_envelope"] = inside;
  write_json(out / "expand_summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  return kExitOk;
}

// --- density -----------------------------------------------------------------

int cmd_density(const std::string& spec_arg, const std::vector<double>& alphas, bool json, const std::string& out) {
  const OmegaSpec s = parse_omega_argument(spec_arg);
  const DensitySpec spec = make_density_spec(s);
  std::vector<double> dens;
  for (double a : alphas) dens.push_back(density_eval(spec, a));
  if (!json && out.empty()) {
    for (double d : dens) std::cout << fmt(d) << '\n';
    return kExitOk;
  }
  Json j{{"spec", to_json(s)}, {"alpha", alphas}, {"density", dens}};
  std::vector<double> cdf;
  for (double a : alphas) cdf.push_back(mixture_cdf(spec, a));
  j["cdf"] = cdf;
  j["mass"] = density_mass(spec);
  j["l4"] = l_j(spec, 4);
  j["predicted_fourth_moment"] = predicted_moment(spec, 4);
  if (!out.empty()) write_json(prepare_out(out) / "density.json", j);
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

// --- diagnose ----------------------------------------------------------------

int cmd_diagnose(const std::string& omega_arg, double X, int scan_points, const std::string& out) {
  const OmegaSpec s = parse_omega_argument(omega_arg);
  const GapWidth omega = make_gap_width(s);
  const OmegaDiagnostics d = omega_diagnostics(omega, X, scan_points);
  const RegularityReport reg = check_regularity(omega, X, 2.0 * X, 200);
  Json lj = Json::object();
  for (const auto& [j, v] : d.lj_estimates) lj[std::to_string(j)] = v;
  Json j{{"omega", to_json(s)},
         {"X", d.X},
         {"u_count", d.u_count},
         {"v_count", d.v_count},
         {"max_omega", d.max_omega},
         {"cond3a_ratio", d.cond3a_ratio},
         {"m2", d.m2},
         {"tau_estimate", d.tau_estimate},
         {"lj_estimates", lj},
         {"carleman_partial_sums", d.carleman_partial_sums},
         {"regularity",
          {{"positive", reg.positive},
           {"slope_below_half", reg.slope_below_half},
           {"worst_d1_rel_error", reg.worst_d1_rel_error},
           {"worst_d2_rel_error", reg.worst_d2_rel_error}}}};
  if (!out.empty()) write_json(prepare_out(out) / "diagnose.json", j);
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

// --- selftest ----------------------------------------------------------------

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

int cmd_selftest() {
  using Poly = std::vector<std::complex<double>>;
  const R2Table r2 = build_r2(2000);
  const DensitySpec one_plus_z(CombineMode::product, {Poly{1.0, 1.0}});
  const DensitySpec flat(CombineMode::product, {Poly{1.0}});
  const std::vector<std::pair<std::string, std::function<bool()>>> fixtures{
      {"count_brute_1", [] { return count_ball_brute(RadiusPoint(1, 1)) == 7; }},
      {"count_fast_1/2", [&] { return count_ball_fast(RadiusPoint(1, 2), r2) == 1; }},
      {"count_both_2", [&] { return count_ball_fast(RadiusPoint(2, 1), r2) == 69 && count_ball_brute(RadiusPoint(2, 1)) == 69; }},
      {"count_sevenths",
       [&] {
         for (std::uint64_t k = 1; k <= 40; ++k)
           if (count_ball_fast(RadiusPoint(k, 7), r2) != count_ball_brute(RadiusPoint(k, 7))) return false;
         return true;
       }},
      {"r2_25", [&] { return r2[25] == 12; }},
      {"sawtooth_ball_1", [&] { return sawtooth_ball_sum(RadiusPoint(1, 1), r2) == -2.5; }},
      {"ball_volume", [] { return near(ball_volume(), std::numbers::pi * std::numbers::pi / 2.0, 1e-15); }},
      {"sum_sqrt_2_8_18",
       [] {
         const std::vector<int> e{1, 1, -1};
         const std::vector<std::uint64_t> m{2, 8, 18};
         return sum_sqrt_is_zero(e, m);
       }},
      {"sum_sqrt_2_3",
       [] {
         const std::vector<int> e{1, -1};
         const std::vector<std::uint64_t> m{2, 3};
         return !sum_sqrt_is_zero(e, m);
       }},
      {"r2_squared_10", [&] { return near(r2_squared_partial_sum_check(10, r2) * 40.0 * std::log(10.0), 208.0, 1e-9); }},
      {"gaussian_ladder", [] { return gaussian_moment(2) == 1 && gaussian_moment(4) == 3 && gaussian_moment(6) == 15; }},
      {"binomial_moments_1plusz",
       [&] {
         const double expect[] = {2, 6, 20, 70};
         for (int j = 1; j <= 4; ++j)
           if (!near(construction_moment(one_plus_z, j), expect[j - 1], 1e-9)) return false;
         return true;
       }},
      {"density_mass_1plusz", [&] { return near(density_mass(one_plus_z), 1.0, 1e-6); }},
      {"mixture_cdf_flat_1.96", [&] { return near(mixture_cdf(flat, 1.96), 0.975, 1e-5); }},
      {"mixture_cdf_symmetric", [&] { return near(mixture_cdf(one_plus_z, 0.0), 0.5, 1e-12); }},
      {"segment_moment_0",
       [] { return near(segment_moment(make_slowly_varying(SlowlyVaryingKind::inv_log), 1e3, 100, 0), 1.0, 1e-15); }},
      {"main_series_empty", [&] { return main_series(150.0, 0.2, r2, 0) == 0.0; }},
  };
  int failed = 0;
  for (const auto& [name, check] : fixtures) {
    bool ok = false;
    try {
      ok = check();
    } catch (const std::exception& e) {
      std::cout << "FAIL " << name << ": " << e.what() << '\n';
      ++failed;
      continue;
    }
    std::cout << (ok ? "PASS " : "FAIL ") << name << '\n';
    if (!ok) ++failed;
  }
  std::cout << "selftest: " << fixtures.size() - failed << " passed, " << failed << " failed\n";
  return failed ? kExitTestFailure : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice points in Cygan-Koranyi ball shells: counts, samples, moments and limit laws"};
  app.require_subcommand(1);

  std::string x_arg, method = "fast";
  bool both = false;
  auto* count = app.add_subcommand("count", "lattice points N(x) in the ball of radius x = k/Q");
  count->add_option("--x", x_arg, "radius as k/Q or k")->required();
  count->add_option("--method", method, "fast (r2 sum) or brute (enumeration)")
      ->check(CLI::IsMember({"fast", "brute"}));
  count->add_flag("--both", both, "run both methods and require agreement");

  ExperimentFlags sample_flags, moments_flags, expand_flags;
  auto* sample = app.add_subcommand("sample", "normalized shell errors on the sample grid (CSV + JSON)");
  add_experiment_options(sample, sample_flags, true, false);
  auto* moments = app.add_subcommand("moments", "empirical moments, histogram and KS distances");
  add_experiment_options(moments, moments_flags, true, true);
  auto* expand = app.add_subcommand("expand", "residuals of the trigonometric expansion");
  add_experiment_options(expand, expand_flags, false, false);

  std::string spec_arg, density_out;
  std::vector<double> alphas{0.0};
  bool density_json = false;
  auto* density = app.add_subcommand("density", "limiting density of a product or sum construction");
  density->add_option("--spec", spec_arg, "spec: inline JSON or JSON file")->required();
  density->add_option("--alpha", alphas, "evaluation points");
  density->add_flag("--json", density_json, "print a JSON summary with CDF, mass and L4");
  density->add_option("--out", density_out, "write density.json into this directory");

  std::string diag_omega = "inv_log", diag_out;
  double diag_X = 1000.0;
  int scan_points = 10000;
  auto* diagnose = app.add_subcommand("diagnose", "gap-width conditions, moments and Carleman sums");
  diagnose->add_option("--omega", diag_omega, "gap width: kind name, inline JSON, or JSON file");
  diagnose->add_option("--X", diag_X, "segment start X");
  diagnose->add_option("--scan-points", scan_points, "derivative sign-change scan resolution");
  diagnose->add_option("--out", diag_out, "write diagnose.json into this directory");

  auto* selftest = app.add_subcommand("selftest", "run the built-in fixture suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*count) return cmd_count(x_arg, method, both);
    if (*sample) return cmd_sample(resolve(sample_flags));
    if (*moments) return cmd_moments(resolve(moments_flags));
    if (*expand) return cmd_expand(resolve(expand_flags));
    if (*density) return cmd_density(spec_arg, alphas, density_json, density_out);
    if (*diagnose) return cmd_diagnose(diag_omega, diag_X, scan_points, diag_out);
    if (*selftest) return cmd_selftest();
  } catch (const ResourceError& e) {
    std::cerr << "cygan: resource error: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::bad_alloc&) {
    std::cerr << "cygan: out of memory\n";
    return kExitResource;
  } catch (const DiagnosticError& e) {
    std::cerr << "cygan: diagnostic failure: " << e.what() << '\n';
    return kExitResource;
  } catch (const Error& e) {
    std::cerr << "cygan: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
