#pragma once

#include <complex>
#include <string>

#include "spikelab/ensemble.hpp"

namespace spikelab {

/// Semicircle density with parameter sigma2:
/// rho(x) = sqrt(4 sigma2 - x^2) / (2 pi sigma2) on [-2 sqrt(sigma2), 2 sqrt(sigma2)].
/// The 1/(2 pi sigma2) prefactor is the unique normalization integrating to 1.
double semicircle_density(double x, double sigma2);

/// Closed-form CDF of the semicircle law.
double semicircle_cdf(double x, double sigma2);

/// Center C(pi1) = pi1 + 1/pi1 and variance sigma2(pi1) = pi1^2/(pi1^2 - 1)
/// of the detached largest eigenvalue. Defined for pi1 > 1 only.
struct BbpQuantities {
  double c;
  double sigma2;
  double sigma() const;
};

BbpQuantities bbp_center_scale(double pi1);

/// Values of the exponent
///   F_u(w) = w^2/2 - u w + (1 - alpha^2 - beta) log w
///            + alpha^2 log(w - pi1) + (1/n) sum_i log(w - rest_i)
/// and its first three derivatives. The alpha^2 term is present only for
/// k >= 1. Real overload requires w right of the largest pole.
struct FDerivatives {
  double f;
  double f1;
  double f2;
  double f3;
};

struct FDerivativesC {
  std::complex<double> f;
  std::complex<double> f1;
  std::complex<double> f2;
  std::complex<double> f3;
};

FDerivatives f_derivatives(double w, const DeformationSpec& spec, double u);
FDerivativesC f_derivatives(std::complex<double> w, const DeformationSpec& spec, double u);

enum class Regime {
  SubCritical,               // pi1 < 1, fixed rank (includes pure GUE)
  Critical,                  // pi1 = 1, fixed rank
  SuperCriticalFixedRank,    // pi1 > 1, fixed rank
  SuperCriticalGrowingRank,  // pi1 > 1, rank grows
  SubCriticalGrowingRank,    // pi1 <= 1, rank grows
};

std::string regime_name(Regime regime);

/// Deterministic saddle-point geometry of one spec: the largest root w_o of
/// F'' = 0, the matching u_o with F'_{u_o}(w_o) = 0, and the
/// centering/rescaling the corresponding limit theorem prescribes.
struct EdgeGeometry {
  double alpha_n = 0.0;
  double beta_n = 0.0;
  double w_o = 0.0;
  double u_o = 0.0;
  double t_r = 0.0;   // (w_o - pi1)/alpha_n; 0 in the degenerate k = 0 case
  double nu_n = 0.0;  // alpha_n * F'''(w_o); 0 in the degenerate k = 0 case
  double center = 0.0;
  double scale = 0.0;
  Regime regime = Regime::SubCritical;
};

/// Growing-rank geometry for k >= 1; pure-GUE fallback (center 2, scale
/// n^(2/3)) for k = 0. Throws GeometryError if no root bracket is found.
EdgeGeometry solve_edge_geometry(const DeformationSpec& spec);

/// Fixed-rank centering/scale per the regime of pi1 (< 1, = 1, > 1).
EdgeGeometry fixed_rank_geometry(const DeformationSpec& spec);

/// Center u of the spacing window at bulk position alpha, |alpha| < 2 sigma(pi1):
/// u = C(pi1) + alpha_n * alpha / sigma2 + beta_n / pi1 - (1/n) sum 1/(pi1 - rest_i).
double bulk_center(const DeformationSpec& spec, double alpha);

}  // namespace spikelab
