#pragma once

#include <functional>
#include <string>
#include <vector>

namespace spikelab {

/// Shared quadrature knobs for all limiting-law evaluations.
struct QuadratureConfig {
  int order = 60;              // Nystrom / Gauss-Legendre node count
  double cutoff = 16.0;        // truncation length for semi-infinite intervals
  double contour_offset = 1.0; // distance the s/t contour passes below the origin
  void validate() const;       // order >= 8, cutoff > 4, contour_offset > 0
};

/// Airy kernel Ai(u,v) = int_0^inf Ai(y+u) Ai(y+v) dy, evaluated in closed
/// form: (Ai(u)Ai'(v) - Ai'(u)Ai(v))/(u - v), with the diagonal limit
/// Ai'(u)^2 - u Ai(u)^2.
double airy_kernel(double u, double v);

/// Nystrom approximation of det(I - K) on L^2(lower, inf): Gauss-Legendre
/// nodes on (lower, lower + cutoff), determinant of
/// (delta_ij - sqrt(w_i w_j) K(x_i, x_j)).
double fredholm_det(const std::function<double(double, double)>& kernel, double lower,
                    const QuadratureConfig& config = {});

/// Same discretization on an explicit finite interval (lower, upper).
double fredholm_det_on(const std::function<double(double, double)>& kernel, double lower,
                       double upper, int order);

/// Tracy-Widom (beta = 2) distribution function: det(I - A_x).
double tw2_cdf(double x, const QuadratureConfig& config = {});

/// The pair (s^(m)(x), t^(m)(x)): contour integrals of
/// exp(i x a + i a^3/3) (ia)^{-m}  resp.  exp(i x a + i a^3/3) (-ia)^{m-1}
/// over a contour from inf e^{i 5pi/6} to inf e^{i pi/6} passing below the
/// origin through -i * contour_offset.
struct StPair {
  double s;
  double t;
};
StPair bbp_functions(double x, int m, const QuadratureConfig& config = {});

/// All (s^(m), t^(m)) for m = 1..m_max in one contour pass.
std::vector<StPair> bbp_functions_upto(double x, int m_max, const QuadratureConfig& config = {});

/// Generalized Tracy-Widom law for a critical spike of multiplicity k:
/// det(1 - A_x) * det(delta_mn - <(1 - A_x)^{-1} s^(m), t^(n)>)_{m,n <= k}.
/// k = 0 reduces exactly to tw2_cdf.
double twk_cdf(double x, int k, const QuadratureConfig& config = {});

/// Distribution of the largest eigenvalue of the k x k GUE with parameter
/// sigma2. k <= 4 uses tensorized quadrature of the |Vandermonde|^2 density;
/// larger k falls back to Monte Carlo (100000 draws, fixed internal seed)
/// whose standard error is written to mc_stderr when provided.
double gue_k_max_cdf(double x, int k, double sigma2, const QuadratureConfig& config = {},
                     double* mc_stderr = nullptr);

/// Gap probability H(s) = det(I - S) of the sine kernel on [0, s].
double sine_kernel_gap(double s, const QuadratureConfig& config = {});

/// Nearest-neighbor spacing CDF of the sine-kernel process:
/// int_0^s H''(u) du = H'(s) - H'(0), via 5-point finite differences of H.
double gaudin_spacing_cdf(double s, const QuadratureConfig& config = {});

/// Tagged evaluable limit law.
struct LimitLaw {
  enum class Kind { Tw2, TwkPlus2, GueKMax, Gaussian, GaudinSpacing };
  Kind kind = Kind::Tw2;
  int k = 0;          // TwkPlus2, GueKMax
  double mu = 0.0;    // Gaussian
  double sigma2 = 1.0;  // GueKMax, Gaussian

  static LimitLaw tw2() { return {Kind::Tw2, 0, 0.0, 1.0}; }
  static LimitLaw twk(int k) { return {Kind::TwkPlus2, k, 0.0, 1.0}; }
  static LimitLaw gue_k_max(int k, double sigma2) { return {Kind::GueKMax, k, 0.0, sigma2}; }
  static LimitLaw gaussian(double mu, double sigma2) { return {Kind::Gaussian, 0, mu, sigma2}; }
  static LimitLaw gaudin() { return {Kind::GaudinSpacing, 0, 0.0, 1.0}; }
};

double law_cdf(const LimitLaw& law, double x, const QuadratureConfig& config = {});
std::string law_name(const LimitLaw& law);

/// Inverse CDF by bisection; used for medians and self-consistency checks.
double law_quantile(const LimitLaw& law, double p, const QuadratureConfig& config = {});

double gaussian_cdf(double x, double mu, double sigma2);

}  // namespace spikelab
