#pragma once

// Sampling of the normalized shell error over [X, 2X], second moments,
// empirical distributions and Kolmogorov-Smirnov distances against the
// Gaussian and Gaussian-mixture limits.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "cygan/arith.hpp"
#include "cygan/counting.hpp"
#include "cygan/error.hpp"
#include "cygan/gapwidth.hpp"
#include "cygan/parallel.hpp"
#include "cygan/spectra.hpp"
#include "cygan/voronoi.hpp"

namespace cygan {

// One radius per stratum [X + i h, X + (i + 1) h), h = X / S:
// x_i = X (1 + (i + u_i) / S) with u_i = frac(offset + i g), g = (sqrt5 - 1)/2,
// snapped to the nearest multiple of 1/Q inside (X, 2X).
//
// An equispaced grid is not used: E-hat carries a component of period 1 in x
// (the square m = n^2 terms), and a rational step h samples only finitely
// many of its phases. With u_i equidistributed on [0, 1), x_i mod 1 is
// equidistributed for every step h.
class SampleGrid {
 public:
  SampleGrid(double X, std::size_t S, std::uint64_t Q, double offset = 0.5) : X_(X), S_(S), Q_(Q), offset_(offset) {
    if (!(X > 0.0)) throw PreconditionError("SampleGrid needs X > 0");
    if (S == 0) throw PreconditionError("SampleGrid needs S > 0");
    if (Q == 0) throw PreconditionError("SampleGrid needs Q >= 1");
    if (!(offset > 0.0 && offset < 1.0)) throw PreconditionError("SampleGrid offset must lie in (0, 1)");
    points_.reserve(S);
    for (std::size_t i = 0; i < S; ++i) {
      const double x = X * (1.0 + (static_cast<double>(i) + stratum_phase(i)) / static_cast<double>(S));
      const double qd = static_cast<double>(Q);
      const auto lo = static_cast<std::uint64_t>(std::floor(X * qd)) + 1;
      const auto hi = static_cast<std::uint64_t>(std::ceil(2.0 * X * qd)) - 1;
      const auto k = std::clamp(static_cast<std::uint64_t>(std::llround(x * qd)), lo, hi);
      RadiusPoint p(k, Q);
      if (!(p.value() > X && p.value() < 2.0 * X))
        throw PreconditionError("SampleGrid: snapped radius " + p.to_string() + " leaves (X, 2X)");
      if (!points_.empty() && points_.back().num() >= k)
        throw PreconditionError("SampleGrid: radii collide after snapping; increase Q or reduce S");
      points_.push_back(p);
    }
  }

  // Position of the i-th radius inside its stratum, in [0, 1).
  double stratum_phase(std::size_t i) const {
    const double u = offset_ + std::fmod(static_cast<double>(i) * (std::numbers::phi - 1.0), 1.0);
    return u - std::floor(u);
  }

  double X() const { return X_; }
  std::size_t size() const { return S_; }
  std::uint64_t denominator() const { return Q_; }
  double offset() const { return offset_; }
  const std::vector<RadiusPoint>& points() const { return points_; }

  // Largest m any exact sample touches: floor((2X + 1)^2).
  std::uint64_t r2_limit_exact() const {
    const double hi = 2.0 * X_ + 1.0;
    return static_cast<std::uint64_t>(std::floor(hi * hi));
  }

 private:
  double X_;
  std::size_t S_;
  std::uint64_t Q_;
  double offset_;
  std::vector<RadiusPoint> points_;
};

enum class SampleMode { exact, fast };

inline std::string to_string(SampleMode m) { return m == SampleMode::exact ? "exact" : "fast"; }

inline std::vector<ShellSample> sample_shells(const GapWidth& omega, const SampleGrid& grid, const R2Table& r2,
                                              unsigned threads = default_thread_count()) {
  std::vector<ShellSample> out(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) { out[i] = shell_sample(grid.points()[i], omega, r2); });
  return out;
}

// E-hat(x_i; omega) on the grid. Fast mode replaces exact counting with the
// expansion main term truncated at fast_cutoff(X) and drops Xi_psi.
inline std::vector<double> sample_errors(const GapWidth& omega, const SampleGrid& grid, const R2Table& r2,
                                         SampleMode mode, unsigned threads = default_thread_count()) {
  std::vector<double> out(grid.size());
  if (mode == SampleMode::exact) {
    parallel_for(grid.size(), threads,
                 [&](std::size_t i) { out[i] = shell_sample(grid.points()[i], omega, r2).normalized; });
  } else {
    const std::uint64_t cutoff = fast_cutoff(grid.X());
    if (!r2.covers(cutoff)) throw PreconditionError("r2 table does not cover the fast-mode cutoff");
    parallel_for(grid.size(), threads, [&](std::size_t i) {
      const double x = grid.points()[i].value();
      out[i] = main_series(x, grid.X(), omega, r2, cutoff);
    });
  }
  return out;
}

// Uncentered mean of squares.
inline double variance_sigma2(std::span<const double> samples) {
  if (samples.empty()) throw PreconditionError("variance_sigma2 needs a nonempty sample");
  CompensatedSum acc;
  for (double v : samples) acc += v * v;
  return acc.value() / static_cast<double>(samples.size());
}

inline double m_j(const GapWidth& omega, double X, std::size_t S, int j) { return segment_moment(omega, X, S, j); }

inline constexpr int kHistogramBins = 61;
inline constexpr double kHistogramHalfWidth = 6.0;

struct EmpiricalDistribution {
  std::vector<double> raw;
  double sigma = 0.0;
  // Mean of raw / sigma; reported, never subtracted.
  double mean = 0.0;
  std::vector<double> normalized;  // sorted
  std::map<int, double> moments;
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
};

inline std::map<int, double> empirical_moments(const EmpiricalDistribution& dist, int j_max) {
  std::map<int, double> out;
  const auto n = static_cast<double>(dist.normalized.size());
  for (int j = 1; j <= j_max; ++j) {
    CompensatedSum acc;
    for (double v : dist.normalized) acc += std::pow(v, j);
    out[j] = acc.value() / n;
  }
  return out;
}

// Normalizes by the uncentered RMS, sorts, and bins on [-6, 6] (values
// outside fall into the end bins).
inline EmpiricalDistribution make_empirical(std::vector<double> raw, int j_max = 8) {
  if (raw.empty()) throw PreconditionError("empirical distribution needs samples");
  EmpiricalDistribution d;
  d.raw = std::move(raw);
  d.sigma = std::sqrt(variance_sigma2(d.raw));
  if (!(d.sigma > 0.0)) throw DomainError("empirical distribution has zero variance");
  d.normalized.reserve(d.raw.size());
  for (double v : d.raw) d.normalized.push_back(v / d.sigma);
  d.mean = compensated_mean(d.normalized);
  std::sort(d.normalized.begin(), d.normalized.end());
  d.moments = empirical_moments(d, j_max);
  d.bin_edges.resize(kHistogramBins + 1);
  for (int b = 0; b <= kHistogramBins; ++b)
    d.bin_edges[b] = -kHistogramHalfWidth + 2.0 * kHistogramHalfWidth * b / kHistogramBins;
  d.counts.assign(kHistogramBins, 0);
  for (double v : d.normalized) {
    auto b = static_cast<long>(std::floor((v + kHistogramHalfWidth) / (2.0 * kHistogramHalfWidth) * kHistogramBins));
    d.counts[std::clamp<long>(b, 0, kHistogramBins - 1)]++;
  }
  return d;
}

using Cdf = std::function<double(double)>;

// One-sample Kolmogorov-Smirnov statistic of the sorted normalized values.
inline double ks_distance(const EmpiricalDistribution& dist, const Cdf& cdf) {
  const auto& v = dist.normalized;
  const auto n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

inline double normal_cdf(double alpha) { return 0.5 * std::erfc(-alpha / std::numbers::sqrt2); }

// Quadrature-weighted average of the component normal CDFs.
inline double mixture_cdf(const DensitySpec& spec, double alpha) {
  const auto& mix = spec.mixture();
  CompensatedSum acc;
  for (std::size_t i = 0; i < mix.sigma.size(); ++i) acc += mix.weight[i] * normal_cdf(alpha / mix.sigma[i]);
  return acc.value();
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw PreconditionError("median of an empty vector");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace cygan
