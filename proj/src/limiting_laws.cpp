#include "spikelab/limiting_laws.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>

#include "spikelab/airy.hpp"
#include "spikelab/ensemble.hpp"
#include "spikelab/errors.hpp"
#include "spikelab/quadrature.hpp"
#include "spikelab/rng.hpp"

namespace spikelab {

void QuadratureConfig::validate() const {
  if (order < 8) throw ConfigError("QuadratureConfig: order must be >= 8");
  if (!(cutoff > 4.0)) throw ConfigError("QuadratureConfig: cutoff must be > 4");
  if (!(contour_offset > 0.0)) throw ConfigError("QuadratureConfig: contour_offset must be > 0");
}

double airy_kernel(double u, double v) {
  AiryPair pu = airy(u);
  if (u == v) return pu.aip * pu.aip - u * pu.ai * pu.ai;
  AiryPair pv = airy(v);
  double d = u - v;
  if (std::abs(d) < 1e-7) {
    // Symmetrized Taylor around the midpoint avoids the 0/0 cancellation.
    double m = 0.5 * (u + v);
    AiryPair pm = airy(m);
    double diag = pm.aip * pm.aip - m * pm.ai * pm.ai;
    // d^2/dd^2 correction is O(d^2) and negligible below the switch radius.
    return diag;
  }
  return (pu.ai * pv.aip - pu.aip * pv.ai) / d;
}

double fredholm_det_on(const std::function<double(double, double)>& kernel, double lower,
                       double upper, int order) {
  QuadRule rule = gauss_legendre_on(lower, upper, order);
  Eigen::MatrixXd m(order, order);
  std::vector<double> sqw(order);
  for (int i = 0; i < order; ++i) sqw[i] = std::sqrt(rule.w[i]);
  for (int i = 0; i < order; ++i) {
    for (int j = 0; j < order; ++j) {
      double kij = kernel(rule.x[i], rule.x[j]);
      if (!std::isfinite(kij)) throw NumericError("fredholm_det: non-finite kernel value");
      m(i, j) = (i == j ? 1.0 : 0.0) - sqw[i] * sqw[j] * kij;
    }
  }
  return Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant();
}

double fredholm_det(const std::function<double(double, double)>& kernel, double lower,
                    const QuadratureConfig& config) {
  config.validate();
  return fredholm_det_on(kernel, lower, lower + config.cutoff, config.order);
}

double tw2_cdf(double x, const QuadratureConfig& config) {
  return fredholm_det([](double u, double v) { return airy_kernel(u, v); }, x, config);
}

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

// One directed ray of the s/t contour: a(t) = a0 + t e^{i dir}, t in [0, T].
// Integrates exp(i x a + i a^3/3) g_m(a) for all requested m in one pass.
// The truncation point is where the integrand envelope falls 45 e-folds
// below its maximum along the ray (or t = 40, whichever is first).
struct RayAccumulator {
  std::vector<std::complex<double>> s_sums;
  std::vector<std::complex<double>> t_sums;
};

double ray_envelope(double x, std::complex<double> a0, std::complex<double> dir, double t) {
  std::complex<double> a = a0 + t * dir;
  return (kI * (x * a + a * a * a / 3.0)).real();
}

RayAccumulator integrate_ray(double x, int m_max, std::complex<double> a0,
                             std::complex<double> dir) {
  // March to find the envelope maximum and the truncation point.
  double peak = ray_envelope(x, a0, dir, 0.0);
  double t_max = 40.0;
  for (double t = 0.25; t <= 40.0; t += 0.25) {
    double e = ray_envelope(x, a0, dir, t);
    peak = std::max(peak, e);
    if (e < peak - 45.0) {
      t_max = t;
      break;
    }
  }
  RayAccumulator acc;
  acc.s_sums.assign(m_max + 1, 0.0);
  acc.t_sums.assign(m_max + 1, 0.0);
  int panels = std::max(24, static_cast<int>(std::ceil(t_max * (4.0 + std::abs(x)))));
  const QuadRule& base = gauss_legendre(16);
  for (int p = 0; p < panels; ++p) {
    double lo = t_max * p / panels, hi = t_max * (p + 1) / panels;
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int q = 0; q < base.size(); ++q) {
      double t = mid + half * base.x[q];
      double w = half * base.w[q];
      std::complex<double> a = a0 + t * dir;
      std::complex<double> core = std::exp(kI * (x * a + a * a * a / 3.0)) * dir * w;
      std::complex<double> ia = kI * a;
      std::complex<double> s_factor = 1.0;  // (ia)^{-m}
      std::complex<double> t_factor = 1.0;  // (-ia)^{m-1}
      for (int m = 1; m <= m_max; ++m) {
        s_factor /= ia;
        acc.s_sums[m] += core * s_factor;
        acc.t_sums[m] += core * t_factor;
        t_factor *= -ia;
      }
    }
  }
  return acc;
}

}  // namespace

std::vector<StPair> bbp_functions_upto(double x, int m_max, const QuadratureConfig& config) {
  config.validate();
  if (m_max < 1 || m_max > 8) throw DomainError("bbp_functions: m must be in [1, 8]");
  if (!(x >= -20.0 && x <= 20.0)) throw DomainError("bbp_functions: x must be in [-20, 20]");
  std::complex<double> a0{0.0, -config.contour_offset};
  std::complex<double> dir_right = std::exp(kI * (M_PI / 6.0));
  std::complex<double> dir_left = std::exp(kI * (5.0 * M_PI / 6.0));
  RayAccumulator right = integrate_ray(x, m_max, a0, dir_right);
  RayAccumulator left = integrate_ray(x, m_max, a0, dir_left);
  std::vector<StPair> out(m_max + 1);
  for (int m = 1; m <= m_max; ++m) {
    // Contour runs from the left infinity to the right infinity.
    std::complex<double> s_val = (right.s_sums[m] - left.s_sums[m]) / (2.0 * M_PI);
    std::complex<double> t_val = (right.t_sums[m] - left.t_sums[m]) / (2.0 * M_PI);
    out[m] = {s_val.real(), t_val.real()};
  }
  return out;
}

StPair bbp_functions(double x, int m, const QuadratureConfig& config) {
  return bbp_functions_upto(x, m, config)[m];
}

double twk_cdf(double x, int k, const QuadratureConfig& config) {
  config.validate();
  if (k < 0 || k > 6) throw DomainError("twk_cdf: k must be in [0, 6]");
  if (k == 0) return tw2_cdf(x, config);
  int n = config.order;
  QuadRule rule = gauss_legendre_on(x, x + config.cutoff, n);
  std::vector<double> sqw(n);
  for (int i = 0; i < n; ++i) sqw[i] = std::sqrt(rule.w[i]);

  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = sqw[i] * sqw[j] * airy_kernel(rule.x[i], rule.x[j]);
  Eigen::MatrixXd m_eye = Eigen::MatrixXd::Identity(n, n) - a;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m_eye);
  double rcond = lu.rcond();
  if (!(rcond > 1e-12))
    throw NumericError("twk_cdf: resolvent condition number exceeds 1e12 at x=" +
                       std::to_string(x));
  double det1 = lu.determinant();

  // phi_m solves (I - A)phi = s^(m) on the nodes (symmetrized variables).
  Eigen::MatrixXd rhs(n, k);
  Eigen::MatrixXd t_vals(n, k);
  for (int i = 0; i < n; ++i) {
    std::vector<StPair> st = bbp_functions_upto(rule.x[i], k, config);
    for (int m = 1; m <= k; ++m) {
      rhs(i, m - 1) = sqw[i] * st[m].s;
      t_vals(i, m - 1) = sqw[i] * st[m].t;
    }
  }
  Eigen::MatrixXd psi = lu.solve(rhs);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(k, k);
  for (int m = 0; m < k; ++m)
    for (int nn = 0; nn < k; ++nn) gram(m, nn) -= psi.col(m).dot(t_vals.col(nn));
  double det2 = Eigen::PartialPivLU<Eigen::MatrixXd>(gram).determinant();
  return det1 * det2;
}

namespace {

// Iterates a k-dimensional tensor index; returns false after the last one.
bool advance(std::vector<int>& idx, int base) {
  for (int d = 0; d < static_cast<int>(idx.size()); ++d) {
    if (++idx[d] < base) return true;
    idx[d] = 0;
  }
  return false;
}

double gue_k_box_integral(double upper, int k, double sigma2, double box, int order) {
  QuadRule rule = gauss_legendre_on(-box, upper, order);
  std::vector<double> wexp(order);
  for (int i = 0; i < order; ++i)
    wexp[i] = rule.w[i] * std::exp(-rule.x[i] * rule.x[i] / (2.0 * sigma2));
  std::vector<int> idx(k, 0);
  double total = 0.0;
  do {
    double dens = 1.0;
    for (int d = 0; d < k; ++d) {
      dens *= wexp[idx[d]];
      for (int e = d + 1; e < k; ++e) {
        double diff = rule.x[idx[d]] - rule.x[idx[e]];
        dens *= diff * diff;
      }
    }
    total += dens;
  } while (advance(idx, order));
  return total;
}

double gue_k_mc(double x, int k, double sigma2, double* mc_stderr) {
  constexpr int kDraws = 100000;
  TrialRng rng(0x5EEDCAFEULL, 0);
  int count = 0;
  for (int d = 0; d < kDraws; ++d) {
    HermitianMatrix m = sample_gue(k, sigma2, rng);
    std::vector<double> eig = hermitian_eigenvalues(std::move(m));
    if (eig.front() <= x) ++count;
  }
  double p = static_cast<double>(count) / kDraws;
  if (mc_stderr) *mc_stderr = std::sqrt(p * (1.0 - p) / kDraws);
  return p;
}

}  // namespace

double gue_k_max_cdf(double x, int k, double sigma2, const QuadratureConfig& config,
                     double* mc_stderr) {
  config.validate();
  if (k < 1) throw DomainError("gue_k_max_cdf: k must be >= 1");
  if (!(sigma2 > 0.0)) throw DomainError("gue_k_max_cdf: sigma2 must be > 0");
  if (mc_stderr) *mc_stderr = 0.0;
  if (k > 4) return gue_k_mc(x, k, sigma2, mc_stderr);

  double box = 8.0 * std::sqrt(sigma2) * std::sqrt(static_cast<double>(k));
  if (x <= -box) return 0.0;
  double upper = std::min(x, box);
  int order = config.order;
  if (k == 3) order = std::min(order, 48);
  if (k == 4) order = std::min(order, 32);

  static std::mutex mutex;
  static std::map<std::tuple<int, double, double, int>, double> norm_cache;
  double normalizer = 0.0;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_tuple(k, sigma2, box, order);
    auto it = norm_cache.find(key);
    if (it == norm_cache.end())
      it = norm_cache.emplace(key, gue_k_box_integral(box, k, sigma2, box, order)).first;
    normalizer = it->second;
  }
  return gue_k_box_integral(upper, k, sigma2, box, order) / normalizer;
}

double sine_kernel_gap(double s, const QuadratureConfig& config) {
  config.validate();
  if (s < 0.0) throw DomainError("sine_kernel_gap: s must be >= 0");
  if (s == 0.0) return 1.0;
  auto sine_kernel = [](double x, double y) {
    double d = M_PI * (x - y);
    if (std::abs(d) < 1e-8) return 1.0 - d * d / 6.0;
    return std::sin(d) / d;
  };
  return fredholm_det_on(sine_kernel, 0.0, s, config.order);
}

double gaudin_spacing_cdf(double s, const QuadratureConfig& config) {
  config.validate();
  if (s < 0.0) throw DomainError("gaudin_spacing_cdf: s must be >= 0");
  if (s > 5.0) throw DomainError("gaudin_spacing_cdf: supported range is [0, 5]");
  if (s == 0.0) return 0.0;
  const double h = 1e-3;
  auto hval = [&](double u) { return sine_kernel_gap(u, config); };
  // 5-point forward stencil at 0, central stencil at s (shifted near 0).
  double hp0 =
      (-25.0 * hval(0.0) + 48.0 * hval(h) - 36.0 * hval(2 * h) + 16.0 * hval(3 * h) -
       3.0 * hval(4 * h)) /
      (12.0 * h);
  double hps;
  if (s >= 2.0 * h) {
    hps = (hval(s - 2 * h) - 8.0 * hval(s - h) + 8.0 * hval(s + h) - hval(s + 2 * h)) / (12.0 * h);
  } else {
    hps = (-25.0 * hval(s) + 48.0 * hval(s + h) - 36.0 * hval(s + 2 * h) + 16.0 * hval(s + 3 * h) -
           3.0 * hval(s + 4 * h)) /
          (12.0 * h);
  }
  return hps - hp0;
}

double gaussian_cdf(double x, double mu, double sigma2) {
  return 0.5 * std::erfc(-(x - mu) / std::sqrt(2.0 * sigma2));
}

double law_cdf(const LimitLaw& law, double x, const QuadratureConfig& config) {
  switch (law.kind) {
    case LimitLaw::Kind::Tw2:
      return tw2_cdf(x, config);
    case LimitLaw::Kind::TwkPlus2:
      return twk_cdf(x, law.k, config);
    case LimitLaw::Kind::GueKMax:
      return gue_k_max_cdf(x, law.k, law.sigma2, config);
    case LimitLaw::Kind::Gaussian:
      return gaussian_cdf(x, law.mu, law.sigma2);
    case LimitLaw::Kind::GaudinSpacing:
      return gaudin_spacing_cdf(std::min(std::max(x, 0.0), 5.0), config);
  }
  throw DomainError("law_cdf: unknown law kind");
}

std::string law_name(const LimitLaw& law) {
  switch (law.kind) {
    case LimitLaw::Kind::Tw2:
      return "tw2";
    case LimitLaw::Kind::TwkPlus2:
      return "tw" + std::to_string(law.k + 2);
    case LimitLaw::Kind::GueKMax:
      return "gue" + std::to_string(law.k) + "_max(sigma2=" + std::to_string(law.sigma2) + ")";
    case LimitLaw::Kind::Gaussian:
      return "gaussian(mu=" + std::to_string(law.mu) + ",sigma2=" + std::to_string(law.sigma2) +
             ")";
    case LimitLaw::Kind::GaudinSpacing:
      return "gaudin_spacing";
  }
  return "unknown";
}

double law_quantile(const LimitLaw& law, double p, const QuadratureConfig& config) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("law_quantile: p must be in (0, 1)");
  double lo, hi;
  if (law.kind == LimitLaw::Kind::GaudinSpacing) {
    lo = 0.0;
    hi = 5.0;
  } else if (law.kind == LimitLaw::Kind::Gaussian) {
    double sd = std::sqrt(law.sigma2);
    lo = law.mu - 10.0 * sd;
    hi = law.mu + 10.0 * sd;
  } else if (law.kind == LimitLaw::Kind::GueKMax) {
    double sd = std::sqrt(law.sigma2);
    lo = -8.0 * sd * std::sqrt(static_cast<double>(law.k));
    hi = -lo;
  } else {
    lo = -7.0;
    hi = 10.0;
  }
  for (int iter = 0; iter < 80; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (law_cdf(law, mid, config) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-10 * (1.0 + std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace spikelab
