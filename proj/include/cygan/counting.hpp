#pragma once

// Lattice points in Cygan-Koranyi balls delta_x B = {(a, b, c) :
// (a^2 + b^2)^2 + c^2 <= x^4}, shell counts N(x + omega) - N(x) and the
// sawtooth remainder sum Xi_psi.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "cygan/arith.hpp"
#include "cygan/error.hpp"
#include "cygan/gapwidth.hpp"
#include "cygan/parallel.hpp"

namespace cygan {

// Counting kernels work on F = floor(x^4) in 64 bits; keeping F below 2^60
// also keeps every ball count below 2^63.
inline constexpr std::uint64_t kMaxFloorFourth = std::uint64_t{1} << 60;

// Extra binary digits of the denominator used for the outer radius x + omega.
inline constexpr int kOuterRefinementBits = 16;

// Radius x = num / den held exactly.
class RadiusPoint {
 public:
  RadiusPoint(std::uint64_t num, std::uint64_t den) : num_(num), den_(den) {
    if (num == 0 || den == 0) throw DomainError("radius needs positive numerator and denominator");
    using boost::multiprecision::cpp_int;
    const cpp_int n4 = cpp_int(num) * num * num * num;
    const cpp_int d4 = cpp_int(den) * den * den * den;
    const cpp_int q = n4 / d4;
    if (q >= kMaxFloorFourth)
      throw RangeError("radius " + std::to_string(num) + "/" + std::to_string(den) +
                       " too large: floor(x^4) must stay below 2^60");
    floor_fourth_ = q.convert_to<std::uint64_t>();
    const cpp_int rem = n4 - q * d4;
    frac_fourth_ = boost::multiprecision::cpp_rational(rem, d4).convert_to<double>();
  }

  // Parses "k/Q" or "k".
  static RadiusPoint parse(std::string_view text) {
    auto parse_u64 = [&](std::string_view s) {
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw PreconditionError("malformed radius '" + std::string(text) + "', expected k/Q");
      return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return RadiusPoint(parse_u64(text), 1);
    return RadiusPoint(parse_u64(text.substr(0, slash)), parse_u64(text.substr(slash + 1)));
  }

  std::uint64_t num() const { return num_; }
  std::uint64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  // floor(x^4) and x^4 - floor(x^4).
  std::uint64_t floor_fourth() const { return floor_fourth_; }
  double frac_fourth() const { return frac_fourth_; }
  // floor(x^2) = isqrt(floor(x^4)).
  std::uint64_t floor_square() const { return isqrt(floor_fourth_); }

  std::string to_string() const { return std::to_string(num_) + "/" + std::to_string(den_); }

 private:
  std::uint64_t num_, den_;
  std::uint64_t floor_fourth_ = 0;
  double frac_fourth_ = 0.0;
};

// vol(B) = pi^2 / 2.
inline constexpr double ball_volume() { return std::numbers::pi * std::numbers::pi / 2.0; }

inline constexpr double kBruteForceMaxRadius = 60.0;

// Exhaustive enumeration with the denominators cleared:
// Q^4 ((a^2 + b^2)^2 + c^2) <= k^4.
inline std::uint64_t count_ball_brute(const RadiusPoint& x) {
  if (x.value() > kBruteForceMaxRadius)
    throw LimitError("brute-force counting is limited to x <= 60");
  if (x.den() > (std::uint64_t{1} << 16))
    throw LimitError("brute-force counting is limited to denominators <= 2^16");
  const u128 k = x.num(), q = x.den();
  const u128 k4 = k * k * k * k;
  const u128 q4 = q * q * q * q;
  const auto ab_max = static_cast<std::int64_t>(std::ceil(x.value()));
  const auto c_max = static_cast<std::int64_t>(std::ceil(x.value() * x.value()));
  std::uint64_t count = 0;
  for (std::int64_t a = -ab_max; a <= ab_max; ++a) {
    for (std::int64_t b = -ab_max; b <= ab_max; ++b) {
      const auto s = static_cast<u128>(a * a + b * b);
      for (std::int64_t c = -c_max; c <= c_max; ++c) {
        const u128 norm4 = s * s + static_cast<u128>(c * c);
        if (q4 * norm4 <= k4) ++count;
      }
    }
  }
  return count;
}

// sum_{m <= x^2} r2(m) (2 floor(sqrt(x^4 - m^2)) + 1). For integer m,
// floor(sqrt(x^4 - m^2)) = floor(sqrt(floor(x^4) - m^2)), so the kernel never
// leaves 64-bit integers.
inline std::uint64_t count_ball_fast(const RadiusPoint& x, const R2Table& r2) {
  const std::uint64_t F = x.floor_fourth();
  const std::uint64_t m_max = isqrt(F);
  if (!r2.covers(m_max))
    throw PreconditionError("r2 table limit " + std::to_string(r2.limit()) + " below floor(x^2) = " +
                            std::to_string(m_max));
  std::uint64_t count = 0;
  for (const std::uint32_t m : r2.support()) {
    if (m > m_max) break;
    const std::uint64_t m2 = std::uint64_t{m} * m;
    count += r2[m] * (2 * isqrt(F - m2) + 1);
  }
  return count;
}

// sum_{m <= x^2} r2(m) psi(sqrt(x^4 - m^2)) with psi(t) = t - floor(t) - 1/2.
// With t^2 = D + phi (D = floor(x^4) - m^2, phi = frac(x^4)) and r = floor(t),
// the fractional part is (D + phi - r^2) / (t + r), which avoids cancellation.
inline double sawtooth_ball_sum(const RadiusPoint& x, const R2Table& r2) {
  const std::uint64_t F = x.floor_fourth();
  const double phi = x.frac_fourth();
  const std::uint64_t m_max = isqrt(F);
  if (!r2.covers(m_max))
    throw PreconditionError("r2 table limit " + std::to_string(r2.limit()) + " below floor(x^2) = " +
                            std::to_string(m_max));
  CompensatedSum acc;
  for (const std::uint32_t m : r2.support()) {
    if (m > m_max) break;
    const std::uint64_t D = F - std::uint64_t{m} * m;
    const std::uint64_t r = isqrt(D);
    const double num = static_cast<double>(D - r * r) + phi;
    double frac = 0.0;
    if (num > 0.0) {
      const double t = std::sqrt(static_cast<double>(D) + phi);
      frac = num / (t + static_cast<double>(r));
    }
    acc += r2[m] * (frac - 0.5);
  }
  return acc.value();
}

// x + omega rounded to the nearest multiple of 1 / (Q 2^16).
inline RadiusPoint outer_radius(const RadiusPoint& x, double omega_x) {
  if (!(omega_x > 0.0)) throw DomainError("gap width must be positive at x = " + x.to_string());
  const std::uint64_t scale = std::uint64_t{1} << kOuterRefinementBits;
  if (x.den() > (std::numeric_limits<std::uint64_t>::max() >> kOuterRefinementBits))
    throw RangeError("radius denominator too large for outer-radius refinement");
  const double steps = std::round(omega_x * static_cast<double>(x.den()) * static_cast<double>(scale));
  if (steps < 1.0) throw DomainError("gap width below the outer-radius resolution at x = " + x.to_string());
  return RadiusPoint(x.num() * scale + static_cast<std::uint64_t>(steps), x.den() * scale);
}

// y - x for an outer radius y = outer_radius(x, .); exact because the
// numerator difference stays far below 2^53.
inline double effective_gap(const RadiusPoint& x, const RadiusPoint& y) {
  return static_cast<double>(y.num() - x.num() * (y.den() / x.den())) / static_cast<double>(y.den());
}

struct ShellSample {
  double x = 0.0;
  // Effective (rounded) gap width used for both counting and volume.
  double omega_x = 0.0;
  std::uint64_t n_inner = 0;
  std::uint64_t n_outer = 0;
  std::int64_t shell_count = 0;
  double error = 0.0;
  double normalized = 0.0;
};

// vol(B) ((x + w)^4 - x^4).
inline double shell_volume(double x, double w) {
  return ball_volume() * (4.0 * x * x * x * w + 6.0 * x * x * w * w + 4.0 * x * w * w * w + w * w * w * w);
}

inline ShellSample shell_sample(const RadiusPoint& x, const GapWidth& omega, const R2Table& r2) {
  const RadiusPoint y = outer_radius(x, omega(x.value()));
  ShellSample s;
  s.x = x.value();
  s.omega_x = effective_gap(x, y);
  s.n_inner = count_ball_fast(x, r2);
  s.n_outer = count_ball_fast(y, r2);
  s.shell_count = static_cast<std::int64_t>(s.n_outer - s.n_inner);
  s.error = static_cast<double>(s.shell_count) - shell_volume(s.x, s.omega_x);
  s.normalized = s.error / (s.x * s.x);
  return s;
}

// Xi_psi(x; omega) using the same rounded outer radius as shell_sample.
inline double sawtooth_shell_sum(const RadiusPoint& x, const GapWidth& omega, const R2Table& r2) {
  const double w = omega(x.value());
  if (w == 0.0) return 0.0;
  const RadiusPoint y = outer_radius(x, w);
  return sawtooth_ball_sum(y, r2) - sawtooth_ball_sum(x, r2);
}

}  // namespace cygan
