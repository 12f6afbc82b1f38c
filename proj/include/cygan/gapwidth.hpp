#pragma once

// Gap-width functions omega(x) with first and second derivatives: the slowly
// varying built-ins, the almost periodic product/sum constructions, and
// sampled diagnostics for the regularity conditions.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cygan/error.hpp"
#include "cygan/parallel.hpp"
#include "cygan/spectra.hpp"

namespace cygan {

// (omega, omega', omega'') evaluated through the Fourier representation;
// imaginary parts are round-off only.
using FourierJet = std::array<std::complex<double>, 3>;

class AlmostPeriodicModel;

class GapWidth {
 public:
  using Fn = std::function<double(double)>;

  GapWidth(std::string name, Fn eval, Fn d1, Fn d2, double x_min = 3.0)
      : name_(std::move(name)), eval_(std::move(eval)), d1_(std::move(d1)), d2_(std::move(d2)), x_min_(x_min) {}

  const std::string& name() const { return name_; }
  double x_min() const { return x_min_; }
  double operator()(double x) const { return eval_(x); }
  double eval(double x) const { return eval_(x); }
  double d1(double x) const { return d1_(x); }
  double d2(double x) const { return d2_(x); }

  // Non-null for the almost periodic constructions.
  const AlmostPeriodicModel* almost_periodic() const { return model_.get(); }

 private:
  friend GapWidth make_almost_periodic(const struct AlmostPeriodicGap&);

  std::string name_;
  Fn eval_, d1_, d2_;
  double x_min_;
  std::shared_ptr<const AlmostPeriodicModel> model_;
};

enum class SlowlyVaryingKind { inv_loglog, inv_log, exp_neg_sqrt_log };

inline std::string to_string(SlowlyVaryingKind k) {
  switch (k) {
    case SlowlyVaryingKind::inv_loglog: return "inv_loglog";
    case SlowlyVaryingKind::inv_log: return "inv_log";
    case SlowlyVaryingKind::exp_neg_sqrt_log: return "exp_neg_sqrt_log";
  }
  return "?";
}

inline std::optional<SlowlyVaryingKind> parse_slowly_varying(const std::string& s) {
  if (s == "inv_loglog") return SlowlyVaryingKind::inv_loglog;
  if (s == "inv_log") return SlowlyVaryingKind::inv_log;
  if (s == "exp_neg_sqrt_log") return SlowlyVaryingKind::exp_neg_sqrt_log;
  return std::nullopt;
}

inline GapWidth make_slowly_varying(SlowlyVaryingKind kind) {
  switch (kind) {
    case SlowlyVaryingKind::inv_loglog:
      return GapWidth(
          "inv_loglog", [](double x) { return 1.0 / std::log(std::log(x)); },
          [](double x) {
            const double L = std::log(x), LL = std::log(L);
            return -1.0 / (x * L * LL * LL);
          },
          [](double x) {
            const double L = std::log(x), LL = std::log(L);
            const double den = x * L * LL * LL;
            return (L * LL * LL + LL * LL + 2.0 * LL) / (den * den);
          });
    case SlowlyVaryingKind::inv_log:
      return GapWidth(
          "inv_log", [](double x) { return 1.0 / std::log(x); },
          [](double x) {
            const double L = std::log(x);
            return -1.0 / (x * L * L);
          },
          [](double x) {
            const double L = std::log(x);
            return (L + 2.0) / (x * x * L * L * L);
          });
    case SlowlyVaryingKind::exp_neg_sqrt_log:
      return GapWidth(
          "exp_neg_sqrt_log", [](double x) { return std::exp(-std::sqrt(std::log(x))); },
          [](double x) {
            const double s = std::sqrt(std::log(x));
            return -std::exp(-s) / (2.0 * x * s);
          },
          [](double x) {
            const double s = std::sqrt(std::log(x));
            return std::exp(-s) * (1.0 + 2.0 * s + 1.0 / s) / (4.0 * x * x * s * s);
          });
  }
  throw DomainError("unknown slowly varying kind");
}

// Constant gap; c = 0 is accepted for degenerate test inputs only.
inline GapWidth make_constant(double c) {
  if (!(c >= 0.0)) throw DomainError("constant gap width must be nonnegative");
  return GapWidth(
      "constant", [c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; });
}

// Parameters of omega_x (product) / omega_+ (sum):
//   omega(x) = F(lambda_1 s, ..., lambda_n s) (log x)^{-A},  s = (log x)^A.
struct AlmostPeriodicGap {
  std::vector<std::vector<std::complex<double>>> polys;
  std::vector<double> lambdas;
  // Linear independence over Z of the lambdas. When false, lambda_l *
  // lambda_denominator must be integral (rational representation).
  bool independent = true;
  long long lambda_denominator = 1;
  int A = 2;
  CombineMode mode = CombineMode::product;
  // Reject polynomials whose |p|^2 grid minimum is <= 1e-9.
  bool strict = true;

  FrequencyRelation relation() const {
    if (independent) return FrequencyRelation::independent_lambdas();
    std::vector<long long> w;
    for (double l : lambdas) {
      const double scaled = l * static_cast<double>(lambda_denominator);
      if (std::abs(scaled - std::round(scaled)) > 1e-12)
        throw UnsupportedError("dependent lambdas without a rational representation");
      w.push_back(static_cast<long long>(std::llround(scaled)));
    }
    return FrequencyRelation::rational(std::move(w));
  }
};

class AlmostPeriodicModel {
 public:
  explicit AlmostPeriodicModel(AlmostPeriodicGap spec) : spec_(std::move(spec)) {
    if (spec_.A < 2) throw ConstructionError("almost periodic gap needs integer A > 1");
    if (spec_.polys.empty()) throw ConstructionError("almost periodic gap needs at least one polynomial");
    if (spec_.lambdas.size() != spec_.polys.size())
      throw ConstructionError("almost periodic gap needs one lambda per polynomial");
    for (const auto& p : spec_.polys) {
      phis_.push_back(phi_from_poly<std::complex<double>>(p));
      if (spec_.strict && !(min_on_circle(phis_.back()) > 1e-9))
        throw ConstructionError("polynomial has a root on (or too near) the unit circle");
    }
    terms_ = fourier_terms(phis_, spec_.mode);
    for (const auto& t : terms_) frequencies_.push_back(t.frequency.value(spec_.lambdas));
  }

  const AlmostPeriodicGap& spec() const { return spec_; }
  const std::vector<FloatTrigPoly>& phis() const { return phis_; }
  const std::vector<FourierTerm<std::complex<double>>>& terms() const { return terms_; }

  // F(lambda s) evaluated directly from the phi_l.
  double carrier(double s) const {
    double acc = spec_.mode == CombineMode::product ? 1.0 : 0.0;
    for (std::size_t l = 0; l < phis_.size(); ++l) {
      const double v = phis_[l].eval(spec_.lambdas[l] * s);
      acc = spec_.mode == CombineMode::product ? acc * v : acc + v;
    }
    return acc;
  }

  double eval(double x) const {
    const double L = std::log(x);
    return carrier(std::pow(L, spec_.A)) * std::pow(L, -spec_.A);
  }

  // Term-wise differentiation of sum_f a_f e(f (log x)^A) (log x)^{-A}.
  FourierJet fourier(double x) const {
    using cd = std::complex<double>;
    const double A = spec_.A;
    const double L = std::log(x);
    const double s = std::pow(L, spec_.A);
    const double two_pi = 2.0 * std::numbers::pi;
    cd sum0{}, sum1{}, sum2{};
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      const double f = frequencies_[i];
      const cd a = terms_[i].coefficient;
      const cd e = std::polar(1.0, std::fmod(two_pi * f * s, two_pi));
      const cd inner = cd(0.0, two_pi * f * s) - 1.0;
      sum0 += a * e;
      sum1 += inner * a * e;
      sum2 += ((A + 1.0 + L) * inner + A * (two_pi * f) * (two_pi * f) * s * s) * a * e;
    }
    return {sum0 / s, A / (x * std::pow(L, A + 1.0)) * sum1,
            -A / (x * x * std::pow(L, A + 2.0)) * sum2};
  }

 private:
  AlmostPeriodicGap spec_;
  std::vector<FloatTrigPoly> phis_;
  std::vector<FourierTerm<std::complex<double>>> terms_;
  std::vector<double> frequencies_;
};

inline GapWidth make_almost_periodic(const AlmostPeriodicGap& spec) {
  auto model = std::make_shared<const AlmostPeriodicModel>(spec);
  const std::string name = spec.mode == CombineMode::product ? "product" : "sum";
  GapWidth w(
      name, [model](double x) { return model->eval(x); },
      [model](double x) { return model->fourier(x)[1].real(); },
      [model](double x) { return model->fourier(x)[2].real(); });
  w.model_ = model;
  return w;
}

// M_j(X; omega) = (1/X) int_X^{2X} (omega log omega)^j dx by the midpoint
// rule on `samples` cells.
inline double segment_moment(const GapWidth& omega, double X, std::size_t samples, int j) {
  if (samples == 0) throw PreconditionError("segment_moment needs samples > 0");
  if (j < 0) throw DomainError("segment_moment: j must be nonnegative");
  CompensatedSum acc;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = X * (1.0 + (i + 0.5) / static_cast<double>(samples));
    const double w = omega(x);
    if (!(w > 0.0 && w < 1.0))
      throw DomainError("omega(x) outside (0, 1) at x = " + std::to_string(x));
    acc += std::pow(w * std::log(w), j);
  }
  return acc.value() / static_cast<double>(samples);
}

struct OmegaDiagnostics {
  double X = 0.0;
  int u_count = 0;
  int v_count = 0;
  double max_omega = 0.0;
  double cond3a_ratio = 0.0;
  double m2 = 0.0;
  double tau_estimate = 0.0;
  std::map<int, double> lj_estimates;
  // Partial sums sum_{2 <= j <= J, j even} m_j^{-1/j}, J = 2, 4, ..., 40.
  std::vector<double> carleman_partial_sums;
};

namespace detail {

inline int count_sign_changes(const std::vector<double>& v) {
  int changes = 0;
  int last = 0;
  for (double d : v) {
    const int s = (d > 0.0) - (d < 0.0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace detail

inline OmegaDiagnostics omega_diagnostics(const GapWidth& omega, double X, int scan_points = 10000) {
  if (X < omega.x_min()) throw PreconditionError("omega_diagnostics: X below omega.x_min");
  if (scan_points < 1000) throw PreconditionError("omega_diagnostics: scan_points must be >= 1000");
  OmegaDiagnostics out;
  out.X = X;
  std::vector<double> d1(scan_points), d2(scan_points);
  for (int i = 0; i < scan_points; ++i) {
    const double x = X + X * i / static_cast<double>(scan_points - 1);
    const double w = omega(x);
    d1[i] = omega.d1(x);
    d2[i] = omega.d2(x);
    if (!std::isfinite(w) || !std::isfinite(d1[i]) || !std::isfinite(d2[i]))
      throw DiagnosticError("non-finite omega evaluation", x);
    out.max_omega = std::max(out.max_omega, w);
  }
  out.u_count = detail::count_sign_changes(d1);
  out.v_count = detail::count_sign_changes(d2);
  out.cond3a_ratio = out.u_count * out.max_omega / std::sqrt(X);

  const auto samples = static_cast<std::size_t>(scan_points);
  out.m2 = segment_moment(omega, X, samples, 2);

  // log M2 against log X over X, 2X, 4X, 8X; M2 ~ X^{-tau}.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < 4; ++k) {
    const double Xk = X * std::ldexp(1.0, k);
    const double lx = std::log(Xk);
    const double ly = std::log(k == 0 ? out.m2 : segment_moment(omega, Xk, samples, 2));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  out.tau_estimate = -(4 * sxy - sx * sy) / (4 * sxx - sx * sx);

  double partial = 0.0;
  for (int j = 2; j <= 40; j += 2) {
    const double ratio = segment_moment(omega, X, samples, j) / std::pow(out.m2, j / 2);
    if (j <= 8) out.lj_estimates[j] = ratio;
    const double mj = static_cast<double>(gaussian_moment(j)) * ratio;
    partial += std::pow(mj, -1.0 / j);
    out.carleman_partial_sums.push_back(partial);
  }
  return out;
}

// Sampled checks of conditions (1) and (2) and of derivative consistency on
// log-uniform points of [lo, hi].
struct RegularityReport {
  bool positive = true;
  bool slope_below_half = true;
  double worst_d1_rel_error = 0.0;
  double worst_d2_rel_error = 0.0;
};

inline RegularityReport check_regularity(const GapWidth& omega, double lo, double hi, int points) {
  RegularityReport r;
  for (int i = 0; i < points; ++i) {
    const double x = lo * std::pow(hi / lo, i / static_cast<double>(points - 1));
    const double w = omega(x);
    if (!(w > 0.0)) r.positive = false;
    if (!(std::abs(omega.d1(x)) < 0.5)) r.slope_below_half = false;
    const double h = 1e-4 * x;
    const double fd1 = (omega(x + h) - omega(x - h)) / (2 * h);
    const double fd2 = (omega.d1(x + h) - omega.d1(x - h)) / (2 * h);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
    r.worst_d1_rel_error = std::max(r.worst_d1_rel_error, rel(fd1, omega.d1(x)));
    r.worst_d2_rel_error = std::max(r.worst_d2_rel_error, rel(fd2, omega.d2(x)));
  }
  return r;
}

}  // namespace cygan
