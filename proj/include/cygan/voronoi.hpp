#pragma once

// Trigonometric expansion of the normalized shell error, exact detection of
// vanishing sums of square roots, and the diagonal (zero-relation) sums of
// products of expansion terms.

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <vector>

#include "cygan/arith.hpp"
#include "cygan/counting.hpp"
#include "cygan/error.hpp"
#include "cygan/gapwidth.hpp"
#include "cygan/parallel.hpp"

namespace cygan {

// sin(pi y) with the reduction done on y, before the multiplication by pi.
inline double sin_pi(double y) {
  const double r = std::fmod(y, 2.0);
  return std::sin(std::numbers::pi * r);
}

// r2(m)/m sin(pi sqrt(m) gap) sin(pi sqrt(m) center), with gap = omega(x) and
// center = 2x + omega(x).
struct ExpansionTerm {
  std::uint64_t m = 1;
  double amplitude = 0.0;
  double root = 1.0;
  double gap = 0.0;
  double center = 0.0;

  double value() const { return amplitude * sin_pi(root * gap) * sin_pi(root * center); }
};

inline ExpansionTerm expansion_term(std::uint64_t m, double x, double omega_x, const R2Table& r2) {
  if (m == 0) throw DomainError("expansion terms start at m = 1");
  return {m, static_cast<double>(r2.at(m)) / static_cast<double>(m), std::sqrt(static_cast<double>(m)),
          omega_x, 2.0 * x + omega_x};
}

inline const double kExpansionScale = 2.0 * std::numbers::sqrt2 / std::numbers::pi;

// (2^{3/2}/pi) sum_{1 <= m <= cutoff} r2(m)/m sin(pi sqrt(m) w) sin(pi sqrt(m) (2x + w)).
inline double main_series(double x, double omega_x, const R2Table& r2, std::uint64_t cutoff) {
  if (!r2.covers(cutoff))
    throw PreconditionError("main_series cutoff " + std::to_string(cutoff) + " exceeds r2 table limit " +
                            std::to_string(r2.limit()));
  const double center = 2.0 * x + omega_x;
  CompensatedSum acc;
  for (const std::uint32_t m : r2.support()) {
    if (m == 0) continue;
    if (m > cutoff) break;
    const double root = std::sqrt(static_cast<double>(m));
    acc += static_cast<double>(r2[m]) / m * sin_pi(root * omega_x) * sin_pi(root * center);
  }
  return kExpansionScale * acc.value();
}

inline double main_series(double x, double X, const GapWidth& omega, const R2Table& r2, std::uint64_t cutoff) {
  if (!(X < x && x < 2.0 * X)) throw PreconditionError("main_series needs X < x < 2X");
  return main_series(x, omega(x), r2, cutoff);
}

inline std::uint64_t full_cutoff(double X) { return static_cast<std::uint64_t>(std::floor(X * X)); }

// Truncation used by the opt-in fast sampling mode.
inline std::uint64_t fast_cutoff(double X) {
  return static_cast<std::uint64_t>(std::max(1e4, std::floor(X)));
}

// main_series up to floor(X^2) minus 2 x^{-2} Xi_psi, evaluated at the same
// rounded outer radius that shell_sample counts with.
inline double expansion_rhs(const RadiusPoint& x, double X, const GapWidth& omega, const R2Table& r2) {
  const double xv = x.value();
  if (!(X < xv && xv < 2.0 * X)) throw PreconditionError("expansion_rhs needs X < x < 2X");
  const RadiusPoint y = outer_radius(x, omega(xv));
  const double xi = sawtooth_ball_sum(y, r2) - sawtooth_ball_sum(x, r2);
  return main_series(xv, effective_gap(x, y), r2, full_cutoff(X)) - 2.0 * xi / (xv * xv);
}

// Residual envelope C X^{-0.9} for |E-hat - expansion_rhs| (epsilon = 0.1).
// C is calibrated: 95th percentile of the first run at X = 100, omega = 1/log,
// S = 100, Q = 64, rounded up to the next 0.5.
inline constexpr double kResidualEnvelopeConstant = 3.5;

inline double residual_envelope(double X) { return kResidualEnvelopeConstant * std::pow(X, -0.9); }

// A candidate relation sum_i e_i sqrt(m_i) = 0, grouped by square-free core:
// grouped[c] = sum of e_i k_i over the i with m_i = c k_i^2.
struct ZeroRelation {
  std::vector<int> signs;
  std::vector<std::uint64_t> ms;
  std::map<std::uint64_t, long long> grouped;

  bool holds() const {
    for (const auto& [core, s] : grouped)
      if (s != 0) return false;
    return true;
  }
};

inline ZeroRelation zero_relation(std::span<const int> signs, std::span<const std::uint64_t> ms) {
  if (signs.size() != ms.size()) throw PreconditionError("zero_relation: sign and m vectors differ in length");
  ZeroRelation z{{signs.begin(), signs.end()}, {ms.begin(), ms.end()}, {}};
  for (std::size_t i = 0; i < ms.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) throw PreconditionError("zero_relation: signs must be +1 or -1");
    const CoreDecomposition d = squarefree_core(ms[i]);
    z.grouped[d.core] += signs[i] * static_cast<long long>(d.k);
  }
  return z;
}

// Square roots of distinct square-free integers are linearly independent over
// Q, so the relation holds iff it holds within every core.
inline bool sum_sqrt_is_zero(std::span<const int> signs, std::span<const std::uint64_t> ms) {
  return zero_relation(signs, ms).holds();
}

namespace detail {

// Constant coefficient of P^n for P(u) = sum_{k=1}^{K} w_k (u^k - u^{-k}), for
// n = 0..n_max. Laurent polynomials stored with offset n_max * K.
inline std::vector<double> zero_coefficients(std::span<const double> w, int n_max) {
  const int K = static_cast<int>(w.size());
  const int off = n_max * K;
  std::vector<double> out(n_max + 1, 0.0);
  std::vector<double> power(2 * off + 1, 0.0), next(2 * off + 1, 0.0);
  power[off] = 1.0;
  out[0] = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    std::fill(next.begin(), next.end(), 0.0);
    const int span = (n - 1) * K;
    for (int e = -span; e <= span; ++e) {
      const double p = power[off + e];
      if (p == 0.0) continue;
      for (int k = 1; k <= K; ++k) {
        next[off + e + k] += p * w[k - 1];
        next[off + e - k] -= p * w[k - 1];
      }
    }
    power.swap(next);
    out[n] = power[off];
  }
  return out;
}

}  // namespace detail

inline constexpr std::uint64_t kMaxDiagonalY = 400;

// sum over ordered j-tuples (e_i, m_i), m_i <= Y, with sum e_i sqrt(m_i) = 0 of
// prod e_i r2(m_i)/m_i sin(pi sqrt(m_i) w), at a single gap value w.
//
// Tuples split by core; positions sharing a core c contribute
// [u^0] P_c(u)^n with P_c(u) = sum_k r2(ck^2)/(ck^2) sin(pi k sqrt(c) w) (u^k - u^{-k}),
// and the cores combine through exponential generating functions.
inline double zero_relation_tuple_sum(double w, int j, std::uint64_t Y, const R2Table& r2) {
  if (j < 0) throw DomainError("tuple length must be nonnegative");
  if (!r2.covers(Y)) throw PreconditionError("r2 table does not cover Y");
  // egf[n] = (coefficient of t^n) in prod_c sum_n S_c(n) t^n / n!.
  std::vector<double> egf(j + 1, 0.0);
  egf[0] = 1.0;
  std::vector<double> w_k;
  for (std::uint64_t c = 1; c <= Y; ++c) {
    if (mobius(c) == 0) continue;
    w_k.clear();
    for (std::uint64_t k = 1; c * k * k <= Y; ++k) {
      const std::uint64_t m = c * k * k;
      w_k.push_back(static_cast<double>(r2[m]) / static_cast<double>(m) *
                    sin_pi(std::sqrt(static_cast<double>(m)) * w));
    }
    const std::vector<double> S = detail::zero_coefficients(w_k, j);
    std::vector<double> next(j + 1, 0.0);
    double fact = 1.0;
    for (int n = 0; n <= j; ++n) {
      if (n > 0) fact *= n;
      if (S[n] == 0.0) continue;
      for (int a = 0; a + n <= j; ++a) next[a + n] += egf[a] * S[n] / fact;
    }
    egf.swap(next);
  }
  double jfact = 1.0;
  for (int n = 2; n <= j; ++n) jfact *= n;
  return jfact * egf[j];
}

struct DiagonalSumResult {
  double value = 0.0;
  // (2^{2j} j! / (j/2)!) M_j(X; omega).
  double target = 0.0;
  double mj = 0.0;
  // C (target / |log max omega| + log(2Y) / Y).
  double envelope = 0.0;
  bool within_envelope() const { return std::abs(value - target) <= envelope; }
};

inline constexpr double kDiagonalEnvelopeConstant = 4.0;

// (-1)^{j/2} (sqrt2/pi)^j times the midpoint-grid average over [X, 2X] of
// zero_relation_tuple_sum(omega(x), j, Y).
inline DiagonalSumResult diagonal_sum(const GapWidth& omega, double X, int j, std::uint64_t Y, std::size_t samples,
                                      const R2Table& r2) {
  if (j != 2 && j != 4) throw LimitError("diagonal_sum supports j in {2, 4}");
  if (Y > kMaxDiagonalY) throw LimitError("diagonal_sum supports Y <= 400");
  if (samples == 0) throw PreconditionError("diagonal_sum needs samples > 0");
  CompensatedSum acc;
  double max_omega = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = X * (1.0 + (i + 0.5) / static_cast<double>(samples));
    const double w = omega(x);
    max_omega = std::max(max_omega, w);
    acc += zero_relation_tuple_sum(w, j, Y, r2);
  }
  const double sign = (j / 2) % 2 == 0 ? 1.0 : -1.0;
  DiagonalSumResult r;
  r.value = sign * std::pow(std::numbers::sqrt2 / std::numbers::pi, j) * acc.value() / static_cast<double>(samples);
  if (max_omega == 0.0) return r;
  r.mj = segment_moment(omega, X, samples, j);
  double constant = std::ldexp(1.0, 2 * j);
  for (int n = 2; n <= j; ++n) constant *= n;
  for (int n = 2; n <= j / 2; ++n) constant /= n;
  r.target = constant * r.mj;
  r.envelope = kDiagonalEnvelopeConstant *
               (r.target / std::abs(std::log(max_omega)) + std::log(2.0 * static_cast<double>(Y)) / static_cast<double>(Y));
  return r;
}

// Pair sum over square-free m of the k-tuples with k_1 = k_2 <= sqrt(Y/m):
// sum_{m square-free} sum_{e_1 k_1 + e_2 k_2 = 0} e_1 e_2 prod r2(mk^2)/(mk^2) sin(pi k sqrt(m) w).
inline double regrouped_pair_sum(double w, std::uint64_t Y, const R2Table& r2) {
  if (!r2.covers(Y)) throw PreconditionError("r2 table does not cover Y");
  CompensatedSum acc;
  for (std::uint64_t c = 1; c <= Y; ++c) {
    if (mobius(c) == 0) continue;
    const double rc = std::sqrt(static_cast<double>(c));
    const auto K = static_cast<long long>(isqrt(Y / c));
    for (int e1 : {1, -1}) {
      for (int e2 : {1, -1}) {
        for (long long k1 = 1; k1 <= K; ++k1) {
          for (long long k2 = 1; k2 <= K; ++k2) {
            if (e1 * k1 + e2 * k2 != 0) continue;
            const auto m1 = c * static_cast<std::uint64_t>(k1 * k1);
            const auto m2 = c * static_cast<std::uint64_t>(k2 * k2);
            acc += e1 * e2 * (static_cast<double>(r2[m1]) / m1 * sin_pi(k1 * rc * w)) *
                   (static_cast<double>(r2[m2]) / m2 * sin_pi(k2 * rc * w));
          }
        }
      }
    }
  }
  return acc.value();
}

// -2 sum_{n <= Y} r2(n)^2 / n^2 sin^2(pi sqrt(n) w).
inline double direct_pair_sum(double w, std::uint64_t Y, const R2Table& r2) {
  if (!r2.covers(Y)) throw PreconditionError("r2 table does not cover Y");
  CompensatedSum acc;
  for (std::uint64_t n = 1; n <= Y; ++n) {
    if (r2[n] == 0) continue;
    const double s = sin_pi(std::sqrt(static_cast<double>(n)) * w);
    const double a = static_cast<double>(r2[n]) / static_cast<double>(n);
    acc += a * a * s * s;
  }
  return -2.0 * acc.value();
}

// sum_{n <= y} r2(n)^2 / (4 y log y).
inline double r2_squared_partial_sum_check(std::uint64_t y, const R2Table& r2) {
  if (y < 2) throw DomainError("r2_squared_partial_sum_check needs y >= 2");
  if (!r2.covers(y)) throw PreconditionError("r2 table does not cover y");
  std::uint64_t total = 0;
  for (std::uint64_t n = 1; n <= y; ++n) total += std::uint64_t{r2[n]} * r2[n];
  const double yd = static_cast<double>(y);
  return static_cast<double>(total) / (4.0 * yd * std::log(yd));
}

}  // namespace cygan
