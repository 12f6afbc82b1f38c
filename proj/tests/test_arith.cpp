#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cygan/arith.hpp"
#include "oracles.hpp"

namespace {

using cygan::u128;

TEST(R2Table, SmallValues) {
  EXPECT_EQ(cygan::build_r2(25)[25], 12u);
  EXPECT_EQ(cygan::build_r2(10)[3], 0u);
  const auto t0 = cygan::build_r2(0);
  EXPECT_EQ(t0.limit(), 0u);
  EXPECT_EQ(t0[0], 1u);
}

TEST(R2Table, Invariants) {
  const auto t = cygan::build_r2(100000);
  EXPECT_EQ(t[0], 1u);
  EXPECT_EQ(t[1], 4u);
  for (std::uint64_t m = 1; m <= t.limit(); ++m) ASSERT_EQ(t[m] % 4, 0u) << m;
  for (std::uint64_t y : {1000u, 10000u, 100000u}) {
    std::uint64_t total = 0;
    for (std::uint64_t m = 0; m <= y; ++m) total += t[m];
    EXPECT_LE(std::abs(static_cast<double>(total) - std::numbers::pi * y), 10.0 * std::sqrt(static_cast<double>(y)));
  }
}

TEST(R2Table, MatchesEnumeration) {
  const auto t = cygan::build_r2(10000);
  for (std::uint64_t m = 0; m <= 10000; ++m) ASSERT_EQ(t[m], oracle::r2(m)) << m;
}

TEST(R2Table, SupportListsNonzeroEntries) {
  const auto t = cygan::build_r2(500);
  std::size_t idx = 0;
  for (std::uint64_t m = 0; m <= 500; ++m) {
    if (t[m] == 0) continue;
    ASSERT_LT(idx, t.support().size());
    EXPECT_EQ(t.support()[idx++], m);
  }
  EXPECT_EQ(idx, t.support().size());
}

TEST(R2Table, CoverageChecks) {
  const auto t = cygan::build_r2(50);
  EXPECT_TRUE(t.covers(50));
  EXPECT_FALSE(t.covers(51));
  EXPECT_THROW(t.at(51), cygan::PreconditionError);
  EXPECT_THROW(cygan::build_r2(std::uint64_t{1} << 32), cygan::RangeError);
}

TEST(Mobius, Examples) {
  EXPECT_EQ(cygan::mobius(1), 1);
  EXPECT_EQ(cygan::mobius(12), 0);
  EXPECT_EQ(cygan::mobius(6), 1);
  EXPECT_EQ(cygan::mobius(30), -1);
  EXPECT_THROW(cygan::mobius(0), cygan::DomainError);
}

TEST(Mobius, MatchesFactorizationOracle) {
  const cygan::SmallestPrimeFactorSieve sieve(5000);
  for (std::uint64_t m = 1; m <= 10000; ++m) {
    const int expected = oracle::mobius(m);
    ASSERT_EQ(cygan::mobius(m), expected) << m;
    ASSERT_EQ(sieve.mobius(m), expected) << m;  // above 5000 exercises the fallback
  }
}

TEST(SquarefreeCore, Examples) {
  EXPECT_EQ(cygan::squarefree_core(18), (cygan::CoreDecomposition{18, 2, 3}));
  EXPECT_EQ(cygan::squarefree_core(1), (cygan::CoreDecomposition{1, 1, 1}));
  EXPECT_EQ(cygan::squarefree_core(7), (cygan::CoreDecomposition{7, 7, 1}));
  EXPECT_THROW(cygan::squarefree_core(0), cygan::DomainError);
}

TEST(SquarefreeCore, Properties) {
  const cygan::SmallestPrimeFactorSieve sieve(10000);
  for (std::uint64_t m = 1; m <= 10000; ++m) {
    const auto d = cygan::squarefree_core(m);
    ASSERT_EQ(d.core * d.k * d.k, m);
    for (std::uint64_t p = 2; p * p <= d.core; ++p) ASSERT_NE(d.core % (p * p), 0u) << m;
    ASSERT_EQ(sieve.squarefree_core(m), d);
  }
}

TEST(Isqrt, Examples) {
  EXPECT_EQ(cygan::isqrt(std::uint64_t{15}), 3u);
  EXPECT_EQ(cygan::isqrt(std::uint64_t{16}), 4u);
  EXPECT_EQ(cygan::isqrt(u128{1} << 64), u128{1} << 32);
  EXPECT_EQ(cygan::isqrt(std::uint64_t{0}), 0u);
  EXPECT_EQ(cygan::isqrt(~std::uint64_t{0}), 0xFFFFFFFFull);
  EXPECT_EQ(cygan::isqrt(~u128{0}), u128{0xFFFFFFFFFFFFFFFFull});
}

TEST(Isqrt, RandomBracketProperty) {
  std::mt19937_64 gen(20261016);
  for (int i = 0; i < 100000; ++i) {
    // Random bit length up to 120, then random bits below it.
    const int bits = 1 + static_cast<int>(gen() % 120);
    u128 n = (u128{gen()} << 64) | gen();
    n &= (u128{1} << bits) - 1;
    const u128 r = cygan::isqrt(n);
    ASSERT_LE(r * r, n);
    ASSERT_GT((r + 1) * (r + 1), n);
  }
}

TEST(Isqrt, PerfectSquareNeighbours) {
  for (std::uint64_t r : {1ull, 3ull, 94906265ull, 4294967295ull}) {
    const std::uint64_t n = r * r;
    EXPECT_EQ(cygan::isqrt(n), r);
    EXPECT_EQ(cygan::isqrt(n - 1), r - 1);
  }
  const u128 big = u128{0xFFFFFFFFFFFFull} * 0xFFFFFFFFFFFFull;
  EXPECT_EQ(cygan::isqrt(big), u128{0xFFFFFFFFFFFFull});
  EXPECT_EQ(cygan::isqrt(big - 1), u128{0xFFFFFFFFFFFEull});
}

}  // namespace
