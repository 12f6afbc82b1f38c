#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cygan/spectra.hpp"
#include "oracles.hpp"

namespace {

using cd = std::complex<double>;
using Poly = std::vector<cd>;
using cygan::CombineMode;
using cygan::DensitySpec;

const Poly kOnePlusZ{1.0, 1.0};

// phi(t) = |p(e(t))|^2 by direct evaluation of p.
double phi_direct(const Poly& p, double t) {
  cd z = std::polar(1.0, 2.0 * std::numbers::pi * t), acc = 0.0, zk = 1.0;
  for (const auto& c : p) {
    acc += c * zk;
    zk *= z;
  }
  return std::norm(acc);
}

// Random Gaussian-integer polynomial of degree <= d with entries in [-3, 3].
Poly random_poly(std::mt19937_64& gen, int d) {
  std::uniform_int_distribution<int> coef(-3, 3);
  Poly p(d + 1);
  for (auto& c : p) c = cd(coef(gen), coef(gen));
  if (p.back() == cd{}) p.back() = 1.0;
  return p;
}

// Literal j-tuple enumeration of sum_{f_1+..+f_j = 0} prod a_f.
cd tuple_oracle(const std::vector<cygan::FourierTerm<cd>>& terms, int j) {
  const std::size_t n = terms.size();
  std::vector<std::size_t> idx(j, 0);
  cd total{};
  while (true) {
    std::vector<int> s(terms[0].frequency.m.size(), 0);
    cd prod = 1.0;
    for (int i = 0; i < j; ++i) {
      for (std::size_t l = 0; l < s.size(); ++l) s[l] += terms[idx[i]].frequency.m[l];
      prod *= terms[idx[i]].coefficient;
    }
    if (std::all_of(s.begin(), s.end(), [](int v) { return v == 0; })) total += prod;
    int i = 0;
    while (i < j && ++idx[i] == n) idx[i++] = 0;
    if (i == j) break;
  }
  return total;
}

TEST(PhiFromPoly, Examples) {
  const auto phi = cygan::phi_from_poly<cd>(kOnePlusZ);
  EXPECT_EQ(phi.degree(), 1);
  EXPECT_EQ(phi.coefficient(-1), cd(1.0));
  EXPECT_EQ(phi.coefficient(0), cd(2.0));
  EXPECT_EQ(phi.coefficient(1), cd(1.0));
  EXPECT_NEAR(phi.eval(0.125), 2.0 + 2.0 * std::cos(2.0 * std::numbers::pi * 0.125), 1e-15);

  const auto one = cygan::phi_from_poly<cd>(Poly{1.0});
  EXPECT_EQ(one.degree(), 0);
  EXPECT_EQ(one.coefficient(0), cd(1.0));
  const auto shifted = cygan::phi_from_poly<cd>(Poly{0.0, 1.0});
  EXPECT_EQ(shifted.degree(), 0);
  EXPECT_EQ(shifted.coefficient(0), cd(1.0));
  EXPECT_THROW(cygan::phi_from_poly<cd>(Poly{0.0, 0.0}), cygan::ConstructionError);
}

TEST(PhiFromPoly, RandomPolynomialsMatchDirectModulus) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Poly p = random_poly(gen, 1 + trial % 4);
    const auto phi = cygan::phi_from_poly<cd>(p);
    for (int m = 1; m <= phi.degree(); ++m) EXPECT_EQ(phi.coefficient(-m), std::conj(phi.coefficient(m)));
    for (double t : {0.0, 0.1, 0.37, 0.5, 0.93})
      EXPECT_NEAR(phi.eval(t), phi_direct(p, t), 1e-10 * (1.0 + phi_direct(p, t)));
  }
}

TEST(PhiMoment, CentralBinomials) {
  const auto exact = cygan::phi_from_poly(*cygan::as_gaussian_integers(kOnePlusZ));
  const int expected[] = {1, 2, 6, 20, 70, 252};
  for (int j = 0; j <= 5; ++j) {
    EXPECT_EQ(cygan::phi_moment(exact, j).re, expected[j]);
    EXPECT_EQ(cygan::phi_moment(exact, j).im, 0);
  }
  const auto one = cygan::phi_from_poly<cd>(Poly{1.0});
  for (int j = 0; j <= 8; ++j) EXPECT_EQ(cygan::phi_moment(one, j), cd(1.0));
}

TEST(PhiMoment, MatchesTrapezoidQuadrature) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Poly p = random_poly(gen, 1 + trial % 3);
    const auto phi = cygan::phi_from_poly<cd>(p);
    for (int j = 1; j <= 6; ++j) {
      double trap = 0.0;
      for (int i = 0; i < 4096; ++i) trap += std::pow(phi_direct(p, i / 4096.0), j) / 4096.0;
      const double conv = cygan::phi_moment(phi, j).real();
      EXPECT_NEAR(conv, trap, 1e-8 * trap) << trial << " " << j;
    }
  }
}

TEST(PhiMoment, SpanLimit) {
  const auto phi = cygan::phi_from_poly<cd>(Poly(11, 1.0));
  EXPECT_THROW(cygan::phi_moment(phi, 1001), cygan::LimitError);
}

TEST(ConstructionMoment, Examples) {
  const DensitySpec product(CombineMode::product, {kOnePlusZ, kOnePlusZ});
  EXPECT_EQ(cygan::construction_moment(product, 2), 36.0);
  const DensitySpec sum(CombineMode::sum, {kOnePlusZ, kOnePlusZ});
  EXPECT_EQ(cygan::construction_moment(sum, 1), 4.0);
  // E(X+Y)^2 = EX^2 + 2 EX EY + EY^2 = 6 + 8 + 6.
  EXPECT_EQ(cygan::construction_moment(sum, 2), 20.0);
  // E(X+Y)^4 = 70 + 4*20*2 + 6*6*6 + 4*2*20 + 70.
  EXPECT_EQ(cygan::construction_moment(sum, 4), 676.0);
}

TEST(ConstructionMoment, SumModeMatchesTorusQuadrature) {
  std::mt19937_64 gen(3);
  const Poly p = random_poly(gen, 2), q = random_poly(gen, 1);
  const DensitySpec sum(CombineMode::sum, {p, q});
  const int g = 256;
  for (int j = 1; j <= 4; ++j) {
    double acc = 0.0;
    for (int a = 0; a < g; ++a)
      for (int b = 0; b < g; ++b) acc += std::pow(phi_direct(p, a / double(g)) + phi_direct(q, b / double(g)), j);
    acc /= g * g;
    EXPECT_NEAR(cygan::construction_moment(sum, j), acc, 1e-9 * acc) << j;
  }
}

TEST(ConstrainedFrequencySum, Examples) {
  const DensitySpec one_axis(CombineMode::product, {kOnePlusZ});
  EXPECT_EQ(cygan::constrained_frequency_sum(one_axis, 2), 6.0);
  const DensitySpec trivial(CombineMode::product, {Poly{1.0}});
  for (int j = 2; j <= 6; j += 2) EXPECT_EQ(cygan::constrained_frequency_sum(trivial, j), 1.0);
  const DensitySpec two_axes(CombineMode::product, {kOnePlusZ, kOnePlusZ});
  EXPECT_EQ(cygan::constrained_frequency_sum(two_axes, 2), 36.0);
  const DensitySpec sum(CombineMode::sum, {kOnePlusZ});
  EXPECT_THROW(cygan::constrained_frequency_sum(sum, 2), cygan::PreconditionError);
}

TEST(ConstrainedFrequencySum, MatchesLiteralTupleEnumeration) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 1 + trial % 2;
    std::vector<Poly> polys;
    for (int l = 0; l < n; ++l) polys.push_back(random_poly(gen, n == 1 ? 3 : 2));
    const DensitySpec spec(CombineMode::product, polys);
    const auto terms = cygan::fourier_terms(spec.phis(), spec.mode());
    for (int j = 2; j <= (n == 1 ? 6 : 4); j += 2) {
      const cd brute = tuple_oracle(terms, j);
      const double dp = cygan::constrained_frequency_sum(spec, j);
      EXPECT_NEAR(dp, brute.real(), 1e-9 * std::abs(brute));
      EXPECT_NEAR(brute.imag(), 0.0, 1e-6 * std::abs(brute));
    }
  }
}

TEST(ConstrainedFrequencySum, ExactIdentityWithConstructionMoment) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 2;
    std::vector<Poly> polys;
    for (int l = 0; l < n; ++l) polys.push_back(random_poly(gen, 1 + (trial + l) % 3));
    const DensitySpec spec(CombineMode::product, polys);
    ASSERT_TRUE(spec.exact());
    for (int j = 2; j <= 6; j += 2)
      EXPECT_EQ(*cygan::constrained_frequency_sum_exact(spec, j), *spec.exact_moment(j)) << trial << " " << j;
  }
}

TEST(ConstrainedFrequencySum, RationallyDependentLambdas) {
  // lambda = (1, 2): the frequency m_1 + 2 m_2 must vanish, which admits more
  // tuples than the independent case, so the sum changes.
  const DensitySpec spec(CombineMode::product, {kOnePlusZ, kOnePlusZ});
  const auto terms = cygan::fourier_terms(spec.phis(), spec.mode());
  const auto dependent = cygan::constrained_frequency_sum(terms, 2, cygan::FrequencyRelation::rational({1, 2}));
  // Direct: int over t of (phi(t) phi(2t))^2.
  const auto phi = spec.phis()[0];
  double direct = 0.0;
  for (int i = 0; i < 4096; ++i) {
    const double t = i / 4096.0;
    direct += std::pow(phi.eval(t) * phi.eval(2 * t), 2) / 4096.0;
  }
  EXPECT_NEAR(dependent.real(), direct, 1e-9 * direct);
  EXPECT_GT(dependent.real(), 36.0);
  EXPECT_THROW(cygan::constrained_frequency_sum(terms, 2, cygan::FrequencyRelation{false, {}}),
               cygan::UnsupportedError);
}

TEST(Lj, Examples) {
  const DensitySpec product(CombineMode::product, {kOnePlusZ});
  EXPECT_EQ(cygan::l_j(product, 2), 1.0);
  EXPECT_DOUBLE_EQ(cygan::l_j(product, 4), 70.0 / 36.0);
  const DensitySpec flat(CombineMode::product, {Poly{1.0}});
  for (int j = 2; j <= 8; j += 2) EXPECT_EQ(cygan::l_j(flat, j), 1.0);
  EXPECT_THROW(cygan::l_j(product, 3), cygan::DomainError);
}

TEST(Lj, HolderLowerBound) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 20; ++trial) {
    const DensitySpec spec(trial % 2 ? CombineMode::sum : CombineMode::product,
                           {random_poly(gen, 2), random_poly(gen, 1)});
    for (int j = 2; j <= 8; j += 2) EXPECT_GE(cygan::l_j(spec, j), 1.0 - 1e-15);
  }
}

TEST(PredictedMoment, GaussianLadder) {
  EXPECT_EQ(cygan::predicted_moment(2), 1.0);
  EXPECT_EQ(cygan::predicted_moment(4), 3.0);
  EXPECT_EQ(cygan::predicted_moment(6), 15.0);
  for (int j = 1; j <= 9; j += 2) EXPECT_EQ(cygan::predicted_moment(j), 0.0);
  for (int j = 2; j <= 20; j += 2)
    EXPECT_EQ(cygan::predicted_moment(j), (j - 1) * cygan::predicted_moment(j - 2));
  // j!/(2^{j/2} (j/2)!) computed literally.
  for (int j = 2; j <= 12; j += 2) {
    double f = 1.0;
    for (int i = 2; i <= j; ++i) f *= i;
    double h = 1.0;
    for (int i = 2; i <= j / 2; ++i) h *= i;
    EXPECT_EQ(cygan::predicted_moment(j), f / (std::pow(2.0, j / 2) * h));
  }
  const DensitySpec product(CombineMode::product, {kOnePlusZ});
  EXPECT_NEAR(cygan::predicted_moment(product, 4), 3.0 * 70.0 / 36.0, 1e-15);
}

TEST(Density, FlatSpecIsStandardNormal) {
  const DensitySpec flat(CombineMode::product, {Poly{1.0}});
  for (double a : {0.0, 1.0, 2.0})
    EXPECT_NEAR(cygan::density_eval(flat, a), std::exp(-a * a / 2) / std::sqrt(2 * std::numbers::pi), 1e-14);
}

TEST(Density, MassAndMomentsOnePlusZ) {
  const DensitySpec spec(CombineMode::product, {kOnePlusZ});
  EXPECT_NEAR(cygan::density_mass(spec, -10.0, 10.0), 1.0, 1e-6);
  EXPECT_NEAR(cygan::density_mass(spec), 1.0, 1e-6);
  EXPECT_NEAR(cygan::density_moment(spec, 2), 1.0, 1e-6);
  EXPECT_NEAR(cygan::density_moment(spec, 4), 3.0 * 70.0 / 36.0, 1e-4);
  EXPECT_LE(std::abs(cygan::density_moment(spec, 1)), 1e-10);
  EXPECT_LE(std::abs(cygan::density_moment(spec, 3)), 1e-10);
}

TEST(Density, SumSpecMoments) {
  const DensitySpec spec(CombineMode::sum, {kOnePlusZ, kOnePlusZ});
  EXPECT_NEAR(cygan::density_mass(spec), 1.0, 1e-6);
  EXPECT_NEAR(cygan::density_moment(spec, 2), 1.0, 1e-6);
  EXPECT_NEAR(cygan::density_moment(spec, 4), cygan::predicted_moment(spec, 4), 1e-4);
  EXPECT_NEAR(cygan::predicted_moment(spec, 4), 3.0 * 676.0 / 400.0, 1e-12);
}

TEST(Density, MomentsMatchPredictionForRandomSpecs) {
  std::mt19937_64 gen(19);
  for (int trial = 0; trial < 4; ++trial) {
    // 3 + z-type polynomials keep phi away from zero.
    Poly p = random_poly(gen, 2);
    p[0] += 10.0;
    const DensitySpec spec(trial % 2 ? CombineMode::sum : CombineMode::product, {p});
    EXPECT_NEAR(cygan::density_moment(spec, 2), 1.0, 1e-5);
    EXPECT_NEAR(cygan::density_moment(spec, 4), cygan::predicted_moment(spec, 4), 1e-5 * cygan::predicted_moment(spec, 4));
  }
}

TEST(Density, EvenInAlpha) {
  const DensitySpec spec(CombineMode::product, {kOnePlusZ, Poly{2.0, 1.0}});
  for (double a = 0.0; a <= 5.0; a += 0.25)
    EXPECT_NEAR(cygan::density_eval(spec, a), cygan::density_eval(spec, -a), 1e-12);
  EXPECT_GE(cygan::density_eval(spec, 3.0), 0.0);
}

TEST(DensitySpec, Limits) {
  EXPECT_THROW(DensitySpec(CombineMode::product, {}), cygan::ConstructionError);
  EXPECT_THROW(DensitySpec(CombineMode::product, {kOnePlusZ}, 8), cygan::ConstructionError);
  EXPECT_THROW(DensitySpec(CombineMode::product, std::vector<Poly>(5, kOnePlusZ)), cygan::ConstructionError);
  // 64^4 tensor nodes exceed the component cap; 16^4 do not.
  const DensitySpec wide(CombineMode::product, std::vector<Poly>(4, Poly{2.0, 1.0}));
  EXPECT_THROW(wide.mixture(), cygan::LimitError);
  const DensitySpec narrow(CombineMode::product, std::vector<Poly>(4, Poly{2.0, 1.0}), 16);
  EXPECT_NO_THROW(narrow.mixture());
}

}  // namespace
