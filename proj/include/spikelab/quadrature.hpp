#pragma once

#include <vector>

namespace spikelab {

/// Gauss-Legendre nodes and weights.
struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
  int size() const { return static_cast<int>(x.size()); }
};

/// Rule of order n on [-1, 1]. Cached; thread-safe.
const QuadRule& gauss_legendre(int n);

/// Rule of order n mapped to [a, b].
QuadRule gauss_legendre_on(double a, double b, int n);

}  // namespace spikelab
