#pragma once

// Fourier algebra of phi(t) = |p(e^{2 pi i t})|^2 and of the torus functions
// Phi(t) = prod_l phi_l(t_l) (product mode) and Theta(t) = sum_l phi_l(t_l)
// (sum mode): coefficients, moments, the frequency-constrained sum over
// tuples, and the Gaussian-mixture density built from them.
//
// Every algorithm here is a template over the coefficient ring C. Two rings
// are instantiated: GaussianInteger (exact, used whenever the polynomial
// coefficients are Gaussian integers) and std::complex<double>.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "cygan/error.hpp"
#include "cygan/quadrature.hpp"

namespace cygan {

using BigInt = boost::multiprecision::cpp_int;

struct GaussianInteger {
  BigInt re = 0;
  BigInt im = 0;

  GaussianInteger() = default;
  GaussianInteger(BigInt r, BigInt i = 0) : re(std::move(r)), im(std::move(i)) {}
  GaussianInteger(long long r) : re(r), im(0) {}

  GaussianInteger& operator+=(const GaussianInteger& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  friend GaussianInteger operator+(GaussianInteger a, const GaussianInteger& b) { return a += b; }
  friend GaussianInteger operator*(const GaussianInteger& a, const GaussianInteger& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const GaussianInteger&, const GaussianInteger&) = default;
};

inline GaussianInteger conj(const GaussianInteger& z) { return {z.re, -z.im}; }
inline std::complex<double> to_complex(const GaussianInteger& z) {
  return {z.re.convert_to<double>(), z.im.convert_to<double>()};
}
inline std::complex<double> to_complex(const std::complex<double>& z) { return z; }
inline bool is_zero(const GaussianInteger& z) { return z.re == 0 && z.im == 0; }
inline bool is_zero(const std::complex<double>& z) { return z == std::complex<double>{}; }

template <class C>
C ring_from(const BigInt& v) {
  if constexpr (std::is_same_v<C, GaussianInteger>) {
    return GaussianInteger(v, 0);
  } else {
    return C(v.convert_to<double>());
  }
}

// Real part as double; for GaussianInteger the exact integer is converted last.
inline double real_value(const GaussianInteger& z) { return z.re.convert_to<double>(); }
inline double real_value(const std::complex<double>& z) { return z.real(); }

// Returns the Gaussian integers when every input is integral, else nullopt.
inline std::optional<std::vector<GaussianInteger>> as_gaussian_integers(
    std::span<const std::complex<double>> coeffs) {
  std::vector<GaussianInteger> out;
  out.reserve(coeffs.size());
  for (const auto& c : coeffs) {
    const double r = c.real(), i = c.imag();
    if (r != std::round(r) || i != std::round(i) || std::abs(r) > 9.0e15 || std::abs(i) > 9.0e15)
      return std::nullopt;
    out.emplace_back(BigInt(static_cast<long long>(r)), BigInt(static_cast<long long>(i)));
  }
  return out;
}

// phi(t) = sum_{|m| <= d} a_m e(m t), stored as a_{-d}..a_{d}.
template <class C>
class TrigPolyModulus {
 public:
  TrigPolyModulus() = default;
  TrigPolyModulus(int degree, std::vector<C> coeffs) : degree_(degree), coeffs_(std::move(coeffs)) {}

  int degree() const { return degree_; }
  const std::vector<C>& coefficients() const { return coeffs_; }
  C coefficient(int m) const {
    if (m < -degree_ || m > degree_) return C{};
    return coeffs_[static_cast<std::size_t>(m + degree_)];
  }

  double eval(double t) const {
    const std::complex<double> a0 = to_complex(coefficient(0));
    double s = a0.real();
    for (int m = 1; m <= degree_; ++m) {
      // a_{-m} = conj(a_m), so the pair contributes 2 Re(a_m e(mt)).
      const std::complex<double> am = to_complex(coefficient(m));
      const double th = 2.0 * std::numbers::pi * m * t;
      s += 2.0 * (am.real() * std::cos(th) - am.imag() * std::sin(th));
    }
    return s;
  }

 private:
  int degree_ = 0;
  std::vector<C> coeffs_;
};

using ExactTrigPoly = TrigPolyModulus<GaussianInteger>;
using FloatTrigPoly = TrigPolyModulus<std::complex<double>>;

// a_m = sum_k c_{k+m} conj(c_k). Leading/trailing zero coefficients are
// dropped first: a factor z^j has modulus one on the circle.
template <class C>
TrigPolyModulus<C> phi_from_poly(std::span<const C> coeffs) {
  std::size_t lo = 0, hi = coeffs.size();
  while (lo < hi && is_zero(coeffs[lo])) ++lo;
  while (hi > lo && is_zero(coeffs[hi - 1])) --hi;
  if (lo == hi) throw ConstructionError("phi_from_poly: polynomial is identically zero");
  const std::vector<C> c(coeffs.begin() + lo, coeffs.begin() + hi);
  const int d = static_cast<int>(c.size()) - 1;
  std::vector<C> a(2 * d + 1);
  for (int m = -d; m <= d; ++m) {
    C acc{};
    for (int k = 0; k <= d; ++k) {
      const int km = k + m;
      if (km < 0 || km > d) continue;
      using cygan::conj;
      using std::conj;
      acc += c[km] * conj(c[k]);
    }
    a[m + d] = acc;
  }
  TrigPolyModulus<C> phi(d, std::move(a));
  if (!(real_value(phi.coefficient(0)) > 0.0))
    throw ConstructionError("phi_from_poly: a_0 must be positive");
  constexpr int grid = 4096;
  for (int i = 0; i < grid; ++i) {
    if (phi.eval(static_cast<double>(i) / grid) < -1e-9)
      throw ConstructionError("phi_from_poly: reconstructed phi is negative");
  }
  return phi;
}

template <class C>
TrigPolyModulus<C> phi_from_poly(const std::vector<C>& coeffs) {
  return phi_from_poly<C>(std::span<const C>(coeffs));
}

// Minimum of |p(e^{2 pi i t})|^2 over an equispaced grid; the library's
// stand-in for "p has no roots on the unit circle".
template <class C>
double min_on_circle(const TrigPolyModulus<C>& phi, int grid = 4096) {
  double mn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) mn = std::min(mn, phi.eval(static_cast<double>(i) / grid));
  return mn;
}

namespace detail {

// Laurent polynomials as (offset, coefficients); multiplication is plain
// convolution.
template <class C>
std::vector<C> convolve(const std::vector<C>& a, const std::vector<C>& b) {
  std::vector<C> out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (is_zero(a[i])) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

}  // namespace detail

inline constexpr int kMaxCoefficientSpan = 10000;

// int_0^1 phi(t)^j dt: the constant coefficient of the j-fold
// self-convolution of (a_m). Exact in the GaussianInteger ring.
template <class C>
C phi_moment(const TrigPolyModulus<C>& phi, int j) {
  if (j < 0) throw DomainError("phi_moment: j must be nonnegative");
  if (j == 0) return C{1};
  if (static_cast<long long>(j) * phi.degree() > kMaxCoefficientSpan)
    throw LimitError("phi_moment: j*d exceeds coefficient span limit");
  const int d = phi.degree();
  // Only the constant term of P^j is needed: split j = h + (j - h) and pair
  // coefficients m of P^h with -m of P^(j-h).
  const int h = j / 2;
  std::vector<C> ph{C{1}}, pk{C{1}};
  for (int i = 0; i < h; ++i) ph = detail::convolve(ph, phi.coefficients());
  for (int i = 0; i < j - h; ++i) pk = detail::convolve(pk, phi.coefficients());
  const int dh = h * d, dk = (j - h) * d;
  C acc{};
  for (int m = -std::min(dh, dk); m <= std::min(dh, dk); ++m) acc += ph[m + dh] * pk[-m + dk];
  return acc;
}

enum class CombineMode { product, sum };

inline std::string to_string(CombineMode mode) {
  return mode == CombineMode::product ? "product" : "sum";
}

// E[F(t)^j] for t uniform on [0,1)^n, F = prod or sum of the phi_l.
template <class C>
C combined_moment(const std::vector<TrigPolyModulus<C>>& phis, CombineMode mode, int j) {
  if (j < 0) throw DomainError("combined_moment: j must be nonnegative");
  if (mode == CombineMode::product) {
    C acc{1};
    for (const auto& phi : phis) acc = acc * phi_moment(phi, j);
    return acc;
  }
  // Sum of independent coordinates: binomial convolution of moment sequences.
  std::vector<C> total(j + 1, C{});
  total[0] = C{1};
  for (const auto& phi : phis) {
    std::vector<C> own(j + 1);
    for (int k = 0; k <= j; ++k) own[k] = phi_moment(phi, k);
    std::vector<C> next(j + 1, C{});
    for (int n = 0; n <= j; ++n) {
      BigInt binom = 1;
      for (int k = 0; k <= n; ++k) {
        if (k > 0) binom = binom * (n - k + 1) / k;
        next[n] += ring_from<C>(binom) * total[n - k] * own[k];
      }
    }
    total = std::move(next);
  }
  return total[j];
}

// Integer vector (m_1..m_n) standing for the frequency sum_l m_l lambda_l.
struct FrequencyVector {
  std::vector<int> m;

  double value(std::span<const double> lambdas) const {
    double f = 0.0;
    for (std::size_t l = 0; l < m.size(); ++l) f += m[l] * lambdas[l];
    return f;
  }
  friend bool operator==(const FrequencyVector&, const FrequencyVector&) = default;
  friend auto operator<=>(const FrequencyVector&, const FrequencyVector&) = default;
};

template <class C>
struct FourierTerm {
  FrequencyVector frequency;
  C coefficient;
};

// Fourier expansion of t -> F(lambda_1 t, ..., lambda_n t) over integer
// frequency vectors. Product mode: every vector in prod_l [-d_l, d_l] with
// coefficient prod_l a_{m_l,l}. Sum mode: vectors with one nonzero entry,
// plus the zero vector carrying sum_l a_{0,l}.
template <class C>
std::vector<FourierTerm<C>> fourier_terms(const std::vector<TrigPolyModulus<C>>& phis,
                                          CombineMode mode) {
  const std::size_t n = phis.size();
  std::vector<FourierTerm<C>> terms;
  if (mode == CombineMode::sum) {
    C zero_coeff{};
    for (const auto& phi : phis) zero_coeff += phi.coefficient(0);
    terms.push_back({FrequencyVector{std::vector<int>(n, 0)}, zero_coeff});
    for (std::size_t l = 0; l < n; ++l) {
      for (int m = -phis[l].degree(); m <= phis[l].degree(); ++m) {
        if (m == 0) continue;
        FrequencyVector f{std::vector<int>(n, 0)};
        f.m[l] = m;
        terms.push_back({std::move(f), phis[l].coefficient(m)});
      }
    }
    return terms;
  }
  std::vector<int> idx(n);
  for (std::size_t l = 0; l < n; ++l) idx[l] = -phis[l].degree();
  while (true) {
    C coeff{1};
    for (std::size_t l = 0; l < n; ++l) coeff = coeff * phis[l].coefficient(idx[l]);
    terms.push_back({FrequencyVector{idx}, coeff});
    std::size_t l = 0;
    while (l < n && idx[l] == phis[l].degree()) {
      idx[l] = -phis[l].degree();
      ++l;
    }
    if (l == n) break;
    ++idx[l];
  }
  return terms;
}

// How "sum of frequencies = 0" is decided for integer frequency vectors.
// Independent lambdas: the vector sum must vanish. Rationally dependent
// lambdas given as integer numerators w over a common denominator: the
// scalar sum_l w_l m_l must vanish.
struct FrequencyRelation {
  bool independent = true;
  std::vector<long long> numerators;

  static FrequencyRelation independent_lambdas() { return {}; }
  static FrequencyRelation rational(std::vector<long long> w) { return {false, std::move(w)}; }
};

inline constexpr long long kMaxFrequencyWork = 400'000'000LL;

// sum over j-tuples (f_1..f_j) of Fourier terms with f_1 + ... + f_j = 0 of
// prod a_{f_i}. Evaluated by dynamic programming over partial frequency
// sums, which visits every zero-sum tuple exactly once in aggregate.
template <class C>
C constrained_frequency_sum(const std::vector<FourierTerm<C>>& terms, int j,
                            const FrequencyRelation& relation) {
  if (j < 0) throw DomainError("constrained_frequency_sum: j must be nonnegative");
  if (j == 0) return C{1};
  if (!relation.independent && relation.numerators.empty())
    throw UnsupportedError("dependent frequencies need a rational representation");
  auto key_of = [&](const FrequencyVector& f) {
    if (relation.independent) return f.m;
    long long s = 0;
    for (std::size_t l = 0; l < f.m.size(); ++l) s += relation.numerators.at(l) * f.m[l];
    return std::vector<int>{static_cast<int>(s)};
  };
  std::vector<std::pair<std::vector<int>, C>> keyed;
  keyed.reserve(terms.size());
  for (const auto& t : terms) {
    if (!is_zero(t.coefficient)) keyed.emplace_back(key_of(t.frequency), t.coefficient);
  }
  if (keyed.empty()) return C{};
  const std::size_t dims = keyed.front().first.size();
  std::map<std::vector<int>, C> state{{std::vector<int>(dims, 0), C{1}}};
  long long work = 0;
  for (int step = 0; step < j; ++step) {
    work += static_cast<long long>(state.size()) * static_cast<long long>(keyed.size());
    if (work > kMaxFrequencyWork)
      throw LimitError("constrained_frequency_sum: tuple enumeration too large");
    std::map<std::vector<int>, C> next;
    for (const auto& [partial, weight] : state) {
      for (const auto& [key, coeff] : keyed) {
        std::vector<int> s = partial;
        for (std::size_t i = 0; i < dims; ++i) s[i] += key[i];
        next[std::move(s)] += weight * coeff;
      }
    }
    state = std::move(next);
  }
  auto it = state.find(std::vector<int>(dims, 0));
  return it == state.end() ? C{} : it->second;
}

// Limiting density specification: mode, the phi_l, quadrature points per
// torus axis. Holds exact phis when the polynomials have Gaussian-integer
// coefficients.
class DensitySpec {
 public:
  static constexpr int kMaxAxes = 4;
  static constexpr std::size_t kMaxComponents = std::size_t{1} << 22;

  DensitySpec(CombineMode mode, const std::vector<std::vector<std::complex<double>>>& polys,
              int quad_points = 64)
      : mode_(mode), polys_(polys), quad_points_(quad_points) {
    if (polys.empty() || polys.size() > kMaxAxes)
      throw ConstructionError("DensitySpec needs between 1 and 4 polynomials");
    if (quad_points < 16) throw ConstructionError("DensitySpec needs quad_points >= 16");
    bool all_exact = true;
    std::vector<ExactTrigPoly> exact;
    for (const auto& p : polys) {
      phis_.push_back(phi_from_poly<std::complex<double>>(p));
      if (auto g = as_gaussian_integers(p)) {
        exact.push_back(phi_from_poly<GaussianInteger>(*g));
      } else {
        all_exact = false;
      }
    }
    if (all_exact) exact_phis_ = std::move(exact);
    norm2_ = std::sqrt(moment(2));
  }

  CombineMode mode() const { return mode_; }
  int quad_points() const { return quad_points_; }
  std::size_t axes() const { return phis_.size(); }
  const std::vector<std::vector<std::complex<double>>>& polys() const { return polys_; }
  const std::vector<FloatTrigPoly>& phis() const { return phis_; }
  const std::optional<std::vector<ExactTrigPoly>>& exact_phis() const { return exact_phis_; }
  bool exact() const { return exact_phis_.has_value(); }

  // ||F||_2 where F is Phi (product) or Theta (sum).
  double norm2() const { return norm2_; }

  // int_{[0,1)^n} F^j, exact route when available.
  double moment(int j) const {
    if (exact_phis_) return real_value(combined_moment(*exact_phis_, mode_, j));
    return real_value(combined_moment(phis_, mode_, j));
  }

  std::optional<BigInt> exact_moment(int j) const {
    if (!exact_phis_) return std::nullopt;
    GaussianInteger g = combined_moment(*exact_phis_, mode_, j);
    if (g.im != 0) throw ConstructionError("moment has nonzero imaginary part");
    return g.re;
  }

  double eval(std::span<const double> t) const {
    double acc = mode_ == CombineMode::product ? 1.0 : 0.0;
    for (std::size_t l = 0; l < phis_.size(); ++l) {
      const double v = phis_[l].eval(t[l]);
      acc = mode_ == CombineMode::product ? acc * v : acc + v;
    }
    return acc;
  }

  // The density is the mixture sum_i w_i N(0, sigma_i^2) over tensor
  // Gauss-Legendre nodes t_i, sigma_i = F(t_i) / ||F||_2.
  struct Mixture {
    std::vector<double> sigma;
    std::vector<double> weight;
    double sigma_max = 0.0;
  };

  const Mixture& mixture() const {
    if (!mixture_) mixture_ = build_mixture();
    return *mixture_;
  }

 private:
  Mixture build_mixture() const {
    const QuadratureRule rule = gauss_legendre_unit(quad_points_);
    const std::size_t n = phis_.size();
    std::size_t count = 1;
    for (std::size_t l = 0; l < n; ++l) {
      count *= static_cast<std::size_t>(quad_points_);
      if (count > kMaxComponents)
        throw LimitError("DensitySpec: quad_points^n exceeds the tensor grid limit");
    }
    // Per-axis values first; the tensor grid only combines them.
    std::vector<std::vector<double>> axis(n, std::vector<double>(quad_points_));
    for (std::size_t l = 0; l < n; ++l)
      for (int q = 0; q < quad_points_; ++q) axis[l][q] = phis_[l].eval(rule.nodes[q]);
    Mixture mix;
    mix.sigma.resize(count);
    mix.weight.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t rest = i;
      double f = mode_ == CombineMode::product ? 1.0 : 0.0;
      double w = 1.0;
      for (std::size_t l = 0; l < n; ++l) {
        const std::size_t q = rest % quad_points_;
        rest /= quad_points_;
        f = mode_ == CombineMode::product ? f * axis[l][q] : f + axis[l][q];
        w *= rule.weights[q];
      }
      if (f < 1e-9)
        throw DomainError("singular mixture: F(t) below 1e-9 at a quadrature node");
      mix.sigma[i] = f / norm2_;
      mix.weight[i] = w;
      mix.sigma_max = std::max(mix.sigma_max, mix.sigma[i]);
    }
    return mix;
  }

  CombineMode mode_;
  std::vector<std::vector<std::complex<double>>> polys_;
  int quad_points_;
  std::vector<FloatTrigPoly> phis_;
  std::optional<std::vector<ExactTrigPoly>> exact_phis_;
  double norm2_ = 0.0;
  mutable std::optional<Mixture> mixture_;
};

// int F^j over the torus, i.e. ||F||_j^j.
inline double construction_moment(const DensitySpec& spec, int j) { return spec.moment(j); }

inline std::vector<FourierTerm<GaussianInteger>> exact_fourier_terms(const DensitySpec& spec) {
  if (!spec.exact()) throw UnsupportedError("spec has non-integral coefficients");
  return fourier_terms(*spec.exact_phis(), spec.mode());
}

// Frequency-constrained sum for a product spec; exact when the spec is.
inline double constrained_frequency_sum(
    const DensitySpec& spec, int j,
    const FrequencyRelation& relation = FrequencyRelation::independent_lambdas()) {
  if (spec.mode() != CombineMode::product)
    throw PreconditionError("constrained_frequency_sum: product mode only");
  if (spec.exact()) {
    auto terms = fourier_terms(*spec.exact_phis(), spec.mode());
    return real_value(constrained_frequency_sum(terms, j, relation));
  }
  auto terms = fourier_terms(spec.phis(), spec.mode());
  return real_value(constrained_frequency_sum(terms, j, relation));
}

inline std::optional<BigInt> constrained_frequency_sum_exact(
    const DensitySpec& spec, int j,
    const FrequencyRelation& relation = FrequencyRelation::independent_lambdas()) {
  if (spec.mode() != CombineMode::product)
    throw PreconditionError("constrained_frequency_sum: product mode only");
  if (!spec.exact()) return std::nullopt;
  GaussianInteger g = constrained_frequency_sum(exact_fourier_terms(spec), j, relation);
  if (g.im != 0) throw ConstructionError("constrained sum has nonzero imaginary part");
  return g.re;
}

// (||F||_j / ||F||_2)^j.
inline double l_j(const DensitySpec& spec, int j) {
  if (j < 2 || j % 2) throw DomainError("l_j: j must be even and >= 2");
  if (spec.exact()) {
    const BigInt num = *spec.exact_moment(j);
    const BigInt den2 = *spec.exact_moment(2);
    BigInt den = 1;
    for (int i = 0; i < j / 2; ++i) den *= den2;
    return boost::multiprecision::cpp_rational(num, den).convert_to<double>();
  }
  return spec.moment(j) / std::pow(spec.moment(2), j / 2);
}

// j! / (2^{j/2} (j/2)!) = (j-1)!! for even j, 0 for odd j.
inline std::uint64_t gaussian_moment(int j) {
  if (j < 0) throw DomainError("gaussian_moment: j must be nonnegative");
  if (j % 2) return 0;
  if (j > 40) throw RangeError("gaussian_moment: j too large for 64-bit result");
  std::uint64_t r = 1;
  for (int k = j - 1; k > 1; k -= 2) r *= static_cast<std::uint64_t>(k);
  return r;
}

// Limit moment for a slowly varying gap width (all L_j = 1).
inline double predicted_moment(int j) { return static_cast<double>(gaussian_moment(j)); }

inline double predicted_moment(const DensitySpec& spec, int j) {
  if (j % 2) return 0.0;
  if (j == 0) return 1.0;
  return static_cast<double>(gaussian_moment(j)) * l_j(spec, j);
}

inline double density_eval(const DensitySpec& spec, double alpha) {
  const auto& mix = spec.mixture();
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double acc = 0.0;
  for (std::size_t i = 0; i < mix.sigma.size(); ++i) {
    const double s = mix.sigma[i];
    const double z = alpha / s;
    acc += mix.weight[i] * inv_sqrt_2pi / s * std::exp(-0.5 * z * z);
  }
  return acc;
}

namespace detail {

template <class F>
double integrate_adaptive(F&& f, double a, double b) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 30, 1e-13, &err);
}

}  // namespace detail

// Tail cut for density integrals, in units of the widest mixture component.
inline constexpr double kDensityTailSigmas = 12.0;

// int_a^b P(alpha) d alpha by adaptive Gauss-Kronrod, splitting at 0 where
// the narrowest components concentrate.
inline double density_mass(const DensitySpec& spec, double a, double b) {
  auto f = [&](double x) { return density_eval(spec, x); };
  if (a < 0.0 && b > 0.0) return detail::integrate_adaptive(f, a, 0.0) + detail::integrate_adaptive(f, 0.0, b);
  return detail::integrate_adaptive(f, a, b);
}

inline double density_mass(const DensitySpec& spec) {
  const double cut = kDensityTailSigmas * spec.mixture().sigma_max;
  return density_mass(spec, -cut, cut);
}

// int alpha^j P(alpha) d alpha over the tail-cut range.
inline double density_moment(const DensitySpec& spec, int j) {
  if (j < 0) throw DomainError("density_moment: j must be nonnegative");
  const double cut = kDensityTailSigmas * spec.mixture().sigma_max;
  auto f = [&](double x) { return std::pow(x, j) * density_eval(spec, x); };
  return detail::integrate_adaptive(f, -cut, 0.0) + detail::integrate_adaptive(f, 0.0, cut);
}

}  // namespace cygan
