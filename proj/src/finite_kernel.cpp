#include "spikelab/finite_kernel.hpp"

#include <quadmath.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "spikelab/errors.hpp"
#include "spikelab/quadrature.hpp"

namespace spikelab {

namespace {

// The double-contour integrals are evaluated entirely in quadruple
// precision. The value of the kernel sits many e-folds below the integrand
// magnitude on any admissible contour pair (the circle must enclose every
// perturbation eigenvalue, so it cannot pass through the z-saddle), and the
// resulting cancellation exhausts double precision at n beyond ~16. Nodes,
// weights, exponents and sums all stay in __float128; only the final value
// is narrowed.
using qfloat = __float128;
using qcplx = __complex128;

const qfloat kQPi = acosq((qfloat)-1);

qcplx qc(qfloat re, qfloat im) {
  qcplx z;
  __real__ z = re;
  __imag__ z = im;
  return z;
}

// Gauss-Legendre rule on [-1, 1] in quad precision (Newton on P_n).
struct QuadGL {
  std::vector<qfloat> x, w;
};

const QuadGL& quad_gl12() {
  static const QuadGL rule = [] {
    constexpr int n = 12;
    QuadGL r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
      qfloat x = cosq(kQPi * (4 * i + 3) / (4 * n + 2));
      qfloat pp = 0;
      for (int iter = 0; iter < 200; ++iter) {
        qfloat p0 = 1, p1 = x;
        for (int j = 2; j <= n; ++j) {
          qfloat p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        pp = n * (x * p1 - p0) / (x * x - 1);
        qfloat dx = p1 / pp;
        x -= dx;
        if (fabsq(dx) < (qfloat)1e-32) break;
      }
      r.x[i] = -x;
      r.x[n - 1 - i] = x;
      qfloat w = 2 / ((1 - x * x) * pp * pp);
      r.w[i] = w;
      r.w[n - 1 - i] = w;
    }
    return r;
  }();
  return rule;
}

// Exponent of the w-side integrand: N(w^2/2 - vw) + (N-k-r) Log w
// + k Log(w - pi1) + sum_i Log(w - rest_i). All powers are integers, so the
// principal branch exponentiates to a single-valued function.
qcplx contour_exponent(qcplx w, double point, const DeformationSpec& spec) {
  qfloat n = spec.n;
  qcplx val = n * (w * w / 2 - (qfloat)point * w);
  val += (qfloat)(spec.n - spec.k - spec.r()) * clogq(w);
  if (spec.k > 0) val += (qfloat)spec.k * clogq(w - (qfloat)spec.pi1);
  for (double p : spec.rest) val += clogq(w - (qfloat)p);
  return val;
}

double pure_saddle(double v) {
  // Largest real root of w - v + 1/w = 0; exists for |v| >= 2.
  if (v < 2.0 + 1e-9) return 0.0;
  return 0.5 * (v + std::sqrt(v * v - 4.0));
}

struct CircleTable {
  std::vector<qcplx> z;
  std::vector<qcplx> dz;
};

CircleTable build_circle(const ContourConfig& cfg) {
  CircleTable t;
  int n = cfg.nodes_circle;
  t.z.resize(n);
  t.dz.resize(n);
  qfloat c = cfg.circle_center, rad = cfg.circle_radius;
  qfloat dtheta = 2 * kQPi / n;
  for (int j = 0; j < n; ++j) {
    qfloat theta = dtheta * j;
    qcplx e = qc(cosq(theta), sinq(theta));
    t.z[j] = c + rad * e;
    t.dz[j] = qc(0, 1) * rad * e * dtheta;
  }
  return t;
}

struct LineTable {
  std::vector<qcplx> w;
  std::vector<qcplx> dw;
};

// Vertical line Re w = abscissa truncated at +-halfwidth, composite
// Gauss-Legendre panels sized to the oscillation of the integrand.
LineTable build_line(double abscissa, double halfwidth, int min_nodes, double v, int n_matrix) {
  LineTable t;
  double freq = n_matrix * (std::abs(abscissa - v) + 1.0) + 8.0;
  int panels =
      std::max(8, static_cast<int>(std::ceil(2.0 * halfwidth * freq / (2.0 * M_PI) / 4.0)));
  panels = std::max(panels, (min_nodes + 11) / 12);
  const QuadGL& base = quad_gl12();
  t.w.reserve(panels * 12);
  t.dw.reserve(panels * 12);
  qfloat qa = abscissa, qh = halfwidth;
  for (int p = 0; p < panels; ++p) {
    qfloat lo = -qh + 2 * qh * p / panels;
    qfloat hi = -qh + 2 * qh * (p + 1) / panels;
    qfloat mid = (lo + hi) / 2, half = (hi - lo) / 2;
    for (std::size_t q = 0; q < base.x.size(); ++q) {
      qfloat ti = mid + half * base.x[q];
      t.w.push_back(qc(qa, ti));
      t.dw.push_back(qc(0, 1) * half * base.w[q]);
    }
  }
  return t;
}

// Truncation point: where the exponent envelope has dropped 85 e-folds below
// its running maximum along the upper half-line. The budget covers both the
// target accuracy and the cancellation depth of the double integral (the
// value sits far below the integrand scale). Double precision suffices to
// place the cut.
double line_halfwidth(double abscissa, double v, const DeformationSpec& spec) {
  auto envelope = [&](double t) {
    return (double)crealq(contour_exponent(qc(abscissa, t), v, spec));
  };
  double peak = envelope(0.0);
  for (double t = 0.25; t <= 20.0; t += 0.25) {
    double e = envelope(t);
    peak = std::max(peak, e);
    if (e < peak - 85.0) return t;
  }
  return 20.0;
}

struct ScaledVector {
  std::vector<qcplx> values;  // weight * exp(exponent - ref)
  double ref;
};

ScaledVector scaled_line_vector(const LineTable& line, double v, const DeformationSpec& spec) {
  ScaledVector out;
  int n = static_cast<int>(line.w.size());
  std::vector<qcplx> expo(n);
  qfloat ref = (qfloat)-1e300;
  for (int i = 0; i < n; ++i) {
    expo[i] = contour_exponent(line.w[i], v, spec);
    ref = std::max((double)ref, (double)crealq(expo[i])) ;
  }
  out.ref = (double)ref;
  out.values.resize(n);
  qfloat qref = out.ref;
  for (int i = 0; i < n; ++i) out.values[i] = line.dw[i] * cexpq(expo[i] - qref);
  return out;
}

ScaledVector scaled_circle_vector(const CircleTable& circle, double u,
                                  const DeformationSpec& spec) {
  ScaledVector out;
  int n = static_cast<int>(circle.z.size());
  std::vector<qcplx> expo(n);
  double ref = -1e300;
  for (int j = 0; j < n; ++j) {
    expo[j] = -contour_exponent(circle.z[j], u, spec);  // integrand is e^{-f_z}
    ref = std::max(ref, (double)crealq(expo[j]));
  }
  out.ref = ref;
  out.values.resize(n);
  qfloat qref = ref;
  for (int j = 0; j < n; ++j) out.values[j] = circle.dz[j] * cexpq(expo[j] - qref);
  return out;
}

// Cauchy coupling of one scaled line vector with every circle node:
// g(j) = sum_i b_i / (w_i - z_j).
std::vector<qcplx> line_to_circle(const ScaledVector& line_vec, const LineTable& line,
                                  const CircleTable& circle) {
  std::vector<qcplx> g(circle.z.size());
  for (std::size_t j = 0; j < circle.z.size(); ++j) {
    qcplx zj = circle.z[j];
    qcplx acc = qc(0, 0);
    for (std::size_t i = 0; i < line.w.size(); ++i) acc += line_vec.values[i] / (line.w[i] - zj);
    g[j] = acc;
  }
  return g;
}

// Kernel value kept in split mantissa/exponent form so callers can rebalance
// magnitudes before collapsing to double.
struct SplitValue {
  double mant_re = 0.0;  // |(mant_re, mant_im)| = 1 unless the value is 0
  double mant_im = 0.0;
  double exponent = -1e308;

  double log_abs() const {
    return exponent + std::log(std::hypot(mant_re, mant_im) + 1e-300);
  }
  double collapse() const {
    double total = log_abs();
    if (total > 700.0)
      throw NumericError("kn_kernel: overflow despite log scaling (exponent " +
                         std::to_string(total) + ")");
    return total < -740.0 ? 0.0 : mant_re * std::exp(exponent);
  }
  double imag_ratio() const { return std::abs(mant_im) / (std::abs(mant_re) + 1e-300); }
};

// Assembles N/(2 i pi)^2 * e^{ref_w + ref_z + N(u-v)c} * sum_j g_j a_j.
SplitValue combine(const std::vector<qcplx>& g, double line_ref, const ScaledVector& circ_vec,
                   double u, double v, double c, const DeformationSpec& spec) {
  qcplx sum = qc(0, 0);
  for (std::size_t j = 0; j < g.size(); ++j) sum += g[j] * circ_vec.values[j];
  double expo = line_ref + circ_vec.ref + spec.n * (u - v) * c +
                std::log(static_cast<double>(spec.n)) - std::log(4.0 * M_PI * M_PI);
  // 1/(2 i pi)^2 = -1/(4 pi^2)
  qcplx val = -sum;
  double re = (double)crealq(val), im = (double)cimagq(val);
  double mag = std::hypot(re, im);
  SplitValue out;
  if (mag == 0.0) return out;
  out.mant_re = re / mag;
  out.mant_im = im / mag;
  out.exponent = expo + std::log(mag);
  return out;
}

KernelValue to_kernel_value(const SplitValue& sv) {
  KernelValue out{};
  out.value = sv.collapse();
  out.imag_ratio = sv.imag_ratio();
  return out;
}

// Beyond this point the finite-n eigenvalue density is negligible relative
// to every tolerance in use; the 1/sqrt(n) term covers the slow decay of the
// smallest ensembles.
double finite_support_bound(const DeformationSpec& spec) {
  double edge = 2.0;
  if (spec.k > 0 && spec.pi1 > 1.0) edge = std::max(edge, spec.pi1 + 1.0 / spec.pi1);
  return edge + 2.0 + 8.0 / std::sqrt(static_cast<double>(spec.n));
}

}  // namespace

void ContourConfig::validate(const DeformationSpec& spec) const {
  if (nodes_circle < 16 || nodes_line < 24)
    throw ConfigError("ContourConfig: node counts too small");
  if (!(circle_radius > 0.0)) throw ConfigError("ContourConfig: circle radius must be positive");
  auto inside = [&](double p) { return std::abs(p - circle_center) < circle_radius - 1e-12; };
  if (!inside(0.0)) throw ConfigError("ContourConfig: circle must enclose 0");
  if (spec.k > 0 && !inside(spec.pi1)) throw ConfigError("ContourConfig: circle must enclose pi1");
  for (double p : spec.rest)
    if (!inside(p)) throw ConfigError("ContourConfig: circle must enclose every rest eigenvalue");
  if (!(gamma_abscissa > circle_center + circle_radius))
    throw ConfigError("ContourConfig: the vertical line must pass right of the circle");
  if (!(gamma_halfwidth > 0.0)) throw ConfigError("ContourConfig: line halfwidth must be positive");
}

ContourConfig auto_contours(const DeformationSpec& spec, double window_lo, double window_hi) {
  spec.validate();
  double lo_p = 0.0, hi_p = 0.0;
  if (spec.k > 0) {
    lo_p = std::min(lo_p, spec.pi1);
    hi_p = std::max(hi_p, spec.pi1);
  }
  for (double p : spec.rest) {
    lo_p = std::min(lo_p, p);
    hi_p = std::max(hi_p, p);
  }
  ContourConfig cfg;
  cfg.circle_center = 0.5 * (lo_p + hi_p);
  cfg.circle_radius = 0.5 * (hi_p - lo_p) + 0.5;
  if (cfg.circle_radius > 20.0)
    throw ConfigError(
        "auto_contours: perturbation spread needs a circle of radius > 20; "
        "supply explicit contours");
  double edge = cfg.circle_center + cfg.circle_radius;
  double v_ref = std::max(window_lo, window_hi);
  cfg.gamma_abscissa = std::max(edge + 0.2, pure_saddle(v_ref));
  cfg.gamma_halfwidth = line_halfwidth(cfg.gamma_abscissa, v_ref, spec);

  double u_max = std::max(std::abs(window_lo), std::abs(window_hi));
  double r = cfg.circle_radius;
  double cycles = spec.n * (0.5 * r * r + (u_max + 1.0) * r) / (2.0 * M_PI) + spec.n;
  cfg.nodes_circle = std::max(256, 64 * static_cast<int>(std::ceil(6.0 * cycles / 64.0)));
  double lfreq = spec.n * (std::abs(cfg.gamma_abscissa - window_lo) + 1.0);
  cfg.nodes_line = std::max(
      192,
      12 * static_cast<int>(std::ceil(2.0 * cfg.gamma_halfwidth * lfreq / (2.0 * M_PI) / 3.0)));
  cfg.validate(spec);
  return cfg;
}

KernelValue kn_kernel_detail(double u, double v, const DeformationSpec& spec,
                             const ContourConfig& contours, double reference_point) {
  spec.validate();
  contours.validate(spec);
  if (spec.n > 256) throw ParameterError("kn_kernel: n is capped at 256");
  CircleTable circle = build_circle(contours);
  LineTable line =
      build_line(contours.gamma_abscissa, contours.gamma_halfwidth, contours.nodes_line, v, spec.n);
  ScaledVector lv = scaled_line_vector(line, v, spec);
  ScaledVector cv = scaled_circle_vector(circle, u, spec);
  std::vector<qcplx> g = line_to_circle(lv, line, circle);
  return to_kernel_value(combine(g, lv.ref, cv, u, v, reference_point, spec));
}

double kn_kernel(double u, double v, const DeformationSpec& spec, const ContourConfig& contours) {
  return kn_kernel_detail(u, v, spec, contours, 0.5 * (u + v)).value;
}

double kn_density(double x, const DeformationSpec& spec, const ContourConfig& contours) {
  return kn_kernel_detail(x, x, spec, contours, x).value / spec.n;
}

double kn_gap_probability(double s, const DeformationSpec& spec, const ContourConfig& contours,
                          const QuadratureConfig& config) {
  spec.validate();
  contours.validate(spec);
  config.validate();
  if (spec.n > 128) throw ParameterError("kn_gap_probability: n is capped at 128");

  double upper = std::min(s + config.cutoff, std::max(finite_support_bound(spec), s + 1.0));
  // Conjugation reference: the kernel's intrinsic exponential asymmetry grows
  // like e^{N(u-v) pi1} through the spike residue (0 for the pure case), so
  // this choice keeps the conjugated matrix entries bounded. The determinant
  // is invariant under the choice.
  double c = spec.largest_pole();
  int m = config.order;
  QuadRule rule = gauss_legendre_on(s, upper, m);

  CircleTable circle = build_circle(contours);
  std::vector<ScaledVector> circ_vecs(m);
  for (int p = 0; p < m; ++p) circ_vecs[p] = scaled_circle_vector(circle, rule.x[p], spec);

  double circle_edge = contours.circle_center + contours.circle_radius;
  Eigen::MatrixXd kmat(m, m);
  Eigen::MatrixXd imag_ratio(m, m);
  for (int q = 0; q < m; ++q) {
    double v = rule.x[q];
    // The line is re-routed through the saddle for each target point; the
    // kernel value itself is contour-independent.
    double abscissa = std::max(circle_edge + 0.2, pure_saddle(v));
    double halfwidth = line_halfwidth(abscissa, v, spec);
    LineTable line = build_line(abscissa, halfwidth, contours.nodes_line, v, spec.n);
    ScaledVector lv = scaled_line_vector(line, v, spec);
    std::vector<qcplx> g = line_to_circle(lv, line, circle);
    for (int p = 0; p < m; ++p) {
      KernelValue kv = combine(g, lv.ref, circ_vecs[p], rule.x[p], v, c, spec);
      kmat(p, q) = kv.value;
      imag_ratio(p, q) = kv.imag_ratio;
    }
  }
  // Realness check on the entries that carry weight in the determinant.
  double kscale = kmat.cwiseAbs().maxCoeff();
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      if (std::abs(kmat(p, q)) > 1e-6 * kscale && imag_ratio(p, q) > 1e-4)
        throw NumericError("kn_gap_probability: kernel failed the realness check");
  Eigen::MatrixXd det_mat = Eigen::MatrixXd::Identity(m, m);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      det_mat(p, q) -= std::sqrt(rule.w[p]) * std::sqrt(rule.w[q]) * kmat(p, q);
  double det = Eigen::PartialPivLU<Eigen::MatrixXd>(det_mat).determinant();
  return det;
}

}  // namespace spikelab
