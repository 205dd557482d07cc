#pragma once

#include "spikelab/ensemble.hpp"
#include "spikelab/limiting_laws.hpp"

namespace spikelab {

/// Contours for the finite-N correlation kernel
///   K_N(u,v) = N/(2 i pi)^2 int_Gamma dz int_gamma dw
///              e^{N(w^2/2 - vw - z^2/2 + uz)} (w/z)^{N-k-r}
///              ((w-pi1)/(z-pi1))^k prod_i (w-rest_i)/(z-rest_i) / (w-z),
/// with Gamma a counterclockwise circle around 0 and every perturbation
/// eigenvalue, and gamma a bottom-to-top vertical line Re w = A to the right
/// of the circle.
struct ContourConfig {
  double gamma_abscissa = 0.0;   // A
  double gamma_halfwidth = 0.0;  // truncation of the vertical line
  double circle_center = 0.0;
  double circle_radius = 0.0;
  int nodes_circle = 0;
  int nodes_line = 0;

  void validate(const DeformationSpec& spec) const;  // throws ConfigError
};

/// Contours adapted to kernel evaluation with both arguments inside
/// [window_lo, window_hi]. The vertical line is routed through the real
/// saddle of the Gaussian exponent when the window sits at or beyond the
/// spectral edge; accuracy inside the bulk degrades with n and is intended
/// for small n. Throws ConfigError when the perturbation spread would force
/// an unreasonably large circle.
ContourConfig auto_contours(const DeformationSpec& spec, double window_lo, double window_hi);

struct KernelValue {
  double value;       // conjugated kernel e^{N(u-v)c} K_N(u,v)
  double imag_ratio;  // |imaginary residue| / |value|, must be small
};

/// Conjugated kernel value with reference point c (the conjugation
/// e^{N(u-v)c} leaves every correlation determinant unchanged; the raw
/// off-diagonal value is not by itself physical). Throws NumericError if the
/// log-scaled magnitudes still overflow.
KernelValue kn_kernel_detail(double u, double v, const DeformationSpec& spec,
                             const ContourConfig& contours, double reference_point);

/// Same, with c = (u + v)/2.
double kn_kernel(double u, double v, const DeformationSpec& spec, const ContourConfig& contours);

/// Normalized mean eigenvalue density K_N(x,x)/N (conjugation-invariant).
double kn_density(double x, const DeformationSpec& spec, const ContourConfig& contours);

/// Gap probability P(lambda_1 <= s) = det(I - K_N) on L^2(s, inf), via a
/// Nystrom determinant of the conjugated kernel on (s, upper). The upper
/// truncation is the smaller of s + config.cutoff and a finite-n support
/// bound; the vertical line is re-adapted to each quadrature node.
double kn_gap_probability(double s, const DeformationSpec& spec, const ContourConfig& contours,
                          const QuadratureConfig& config = {});

}  // namespace spikelab
