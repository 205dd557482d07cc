#include "spikelab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "spikelab/errors.hpp"

namespace spikelab {

namespace {

// Newton iteration on P_n with the three-term recurrence. Nodes are computed
// on [0, 1) side and mirrored.
QuadRule compute_gauss_legendre(int n) {
  QuadRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.w[i] = w;
    rule.w[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const QuadRule& gauss_legendre(int n) {
  if (n < 1) throw ParameterError("gauss_legendre: order must be >= 1");
  static std::mutex mutex;
  static std::map<int, QuadRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

QuadRule gauss_legendre_on(double a, double b, int n) {
  const QuadRule& base = gauss_legendre(n);
  QuadRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  double mid = 0.5 * (a + b);
  double half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    rule.x[i] = mid + half * base.x[i];
    rule.w[i] = half * base.w[i];
  }
  return rule;
}

}  // namespace spikelab
