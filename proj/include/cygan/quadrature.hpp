#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "cygan/error.hpp"

namespace cygan {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule mapped to [0, 1]; weights sum to 1.
// Roots of P_n by Newton iteration from the Tricomi initial guess.
inline QuadratureRule gauss_legendre_unit(int n) {
  if (n < 1) throw PreconditionError("Gauss-Legendre rule needs n >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = 0.5 * (1.0 - z);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + z);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

}  // namespace cygan
