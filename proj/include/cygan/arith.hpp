#pragma once

// Exact integer substrate: representation counts r2(m), Moebius function,
// square-free cores and integer square roots.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include "cygan/error.hpp"

namespace cygan {

using u128 = unsigned __int128;

// floor(sqrt(n)). The floating estimate is only a starting point; the two
// correction loops make the result exact for every input.
inline std::uint64_t isqrt(std::uint64_t n) {
  if (n < 2) return n;
  std::uint64_t r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  r = std::min<std::uint64_t>(r, 0xFFFFFFFFull);
  while (r * r > n) --r;
  while (r < 0xFFFFFFFFull && (r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline u128 isqrt(u128 n) {
  if (n <= std::numeric_limits<std::uint64_t>::max())
    return isqrt(static_cast<std::uint64_t>(n));
  constexpr u128 root_max = 0xFFFFFFFFFFFFFFFFull;  // floor(sqrt(2^128 - 1))
  u128 r = static_cast<u128>(std::sqrt(static_cast<long double>(n)));
  if (r > root_max) r = root_max;
  // r * r cannot overflow once r <= 2^64 - 1.
  while (r * r > n) --r;
  while (r < root_max && (r + 1) * (r + 1) <= n) ++r;
  return r;
}

// r2(m) = #{(a, b) in Z^2 : a^2 + b^2 = m} for every 0 <= m <= limit, with
// r2(0) = 1. `support` lists the m with r2(m) > 0 in increasing order; the
// counting kernels iterate it instead of the dense array.
class R2Table {
 public:
  R2Table() = default;

  std::uint64_t limit() const { return limit_; }
  std::uint32_t operator[](std::uint64_t m) const { return values_[m]; }
  std::uint32_t at(std::uint64_t m) const {
    if (m > limit_)
      throw PreconditionError("r2 table limit " + std::to_string(limit_) +
                              " does not cover m = " + std::to_string(m));
    return values_[m];
  }
  const std::vector<std::uint32_t>& values() const { return values_; }
  const std::vector<std::uint32_t>& support() const { return support_; }

  // Covers [0, m] iff limit() >= m.
  bool covers(std::uint64_t m) const { return m <= limit_; }

  friend R2Table build_r2(std::uint64_t limit);

 private:
  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> values_;
  std::vector<std::uint32_t> support_;
};

// Double-loop sieve over a^2 + b^2 <= limit with a, b >= 0; signs are
// restored by the weights 1, 2 or 4.
inline R2Table build_r2(std::uint64_t limit) {
  if (limit >= (std::uint64_t{1} << 32))
    throw RangeError("r2 table limit must stay below 2^32");
  R2Table t;
  t.limit_ = limit;
  try {
    t.values_.assign(limit + 1, 0);
    const std::uint64_t amax = isqrt(limit);
    for (std::uint64_t a = 0; a <= amax; ++a) {
      const std::uint64_t a2 = a * a;
      const std::uint64_t bmax = isqrt(limit - a2);
      for (std::uint64_t b = 0; b <= bmax; ++b) {
        const std::uint32_t w = (a == 0 ? 1u : 2u) * (b == 0 ? 1u : 2u);
        t.values_[a2 + b * b] += w;
      }
    }
    std::uint64_t nonzero = 0;
    for (auto v : t.values_) nonzero += (v != 0);
    t.support_.reserve(nonzero);
    for (std::uint64_t m = 0; m <= limit; ++m)
      if (t.values_[m] != 0) t.support_.push_back(static_cast<std::uint32_t>(m));
  } catch (const std::bad_alloc&) {
    throw ResourceError("cannot allocate r2 table with limit " + std::to_string(limit));
  }
  return t;
}

// m = core * k^2 with core square-free.
struct CoreDecomposition {
  std::uint64_t m = 1;
  std::uint64_t core = 1;
  std::uint64_t k = 1;

  friend bool operator==(const CoreDecomposition&, const CoreDecomposition&) = default;
};

namespace detail {

// Calls on_prime(p, e) for each prime power p^e || m, by trial division.
template <class OnPrime>
void factor_trial(std::uint64_t m, OnPrime&& on_prime) {
  for (std::uint64_t p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
    if (m % p != 0) continue;
    unsigned e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    on_prime(p, e);
  }
  if (m > 1) on_prime(m, 1u);
}

inline std::uint64_t ipow(std::uint64_t b, unsigned e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

}  // namespace detail

inline int mobius(std::uint64_t m) {
  if (m == 0) throw DomainError("mobius(0) is undefined");
  int sign = 1;
  bool square = false;
  detail::factor_trial(m, [&](std::uint64_t, unsigned e) {
    if (e > 1) square = true;
    sign = -sign;
  });
  return square ? 0 : sign;
}

inline CoreDecomposition squarefree_core(std::uint64_t m) {
  if (m == 0) throw DomainError("squarefree_core(0) is undefined");
  CoreDecomposition d{m, 1, 1};
  detail::factor_trial(m, [&](std::uint64_t p, unsigned e) {
    if (e % 2) d.core *= p;
    d.k *= detail::ipow(p, e / 2);
  });
  return d;
}

// Smallest-prime-factor table; answers mobius / squarefree_core in
// O(log m) up to its limit and falls back to trial division above.
class SmallestPrimeFactorSieve {
 public:
  explicit SmallestPrimeFactorSieve(std::uint32_t limit) : spf_(std::size_t{limit} + 1, 0) {
    for (std::uint64_t i = 2; i <= limit; ++i) {
      if (spf_[i] != 0) continue;
      for (std::uint64_t j = i; j <= limit; j += i)
        if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
    }
  }

  std::uint64_t limit() const { return spf_.size() - 1; }

  int mobius(std::uint64_t m) const {
    if (m == 0) throw DomainError("mobius(0) is undefined");
    if (m > limit()) return cygan::mobius(m);
    int sign = 1;
    while (m > 1) {
      const std::uint32_t p = spf_[m];
      m /= p;
      if (m % p == 0) return 0;
      sign = -sign;
    }
    return sign;
  }

  CoreDecomposition squarefree_core(std::uint64_t m) const {
    if (m == 0) throw DomainError("squarefree_core(0) is undefined");
    if (m > limit()) return cygan::squarefree_core(m);
    CoreDecomposition d{m, 1, 1};
    while (m > 1) {
      const std::uint32_t p = spf_[m];
      unsigned e = 0;
      while (m % p == 0) {
        m /= p;
        ++e;
      }
      if (e % 2) d.core *= p;
      d.k *= detail::ipow(p, e / 2);
    }
    return d;
  }

 private:
  std::vector<std::uint32_t> spf_;
};

}  // namespace cygan
