#include "spikelab/edge_geometry.hpp"

#include <cmath>

#include "spikelab/errors.hpp"

namespace spikelab {

double semicircle_density(double x, double sigma2) {
  if (!(sigma2 > 0.0)) throw ParameterError("semicircle_density: sigma2 must be > 0");
  double support = 4.0 * sigma2 - x * x;
  if (support <= 0.0) return 0.0;
  return std::sqrt(support) / (2.0 * M_PI * sigma2);
}

double semicircle_cdf(double x, double sigma2) {
  if (!(sigma2 > 0.0)) throw ParameterError("semicircle_cdf: sigma2 must be > 0");
  double edge = 2.0 * std::sqrt(sigma2);
  if (x <= -edge) return 0.0;
  if (x >= edge) return 1.0;
  return 0.5 + x * std::sqrt(4.0 * sigma2 - x * x) / (4.0 * M_PI * sigma2) +
         std::asin(x / edge) / M_PI;
}

double BbpQuantities::sigma() const { return std::sqrt(sigma2); }

BbpQuantities bbp_center_scale(double pi1) {
  if (!(pi1 > 1.0)) throw DomainError("bbp_center_scale: defined for pi1 > 1 only");
  return {pi1 + 1.0 / pi1, pi1 * pi1 / (pi1 * pi1 - 1.0)};
}

namespace {

template <typename T>
struct FTerms {
  double a2;      // alpha^2, zero for the pure case
  double coeff0;  // 1 - alpha^2 - beta
  double inv_n;
  const DeformationSpec* spec;

  T f(T w, double u) const {
    T val = w * w / 2.0 - u * w + coeff0 * std::log(w);
    if (a2 > 0.0) val += a2 * std::log(w - spec->pi1);
    for (double p : spec->rest) val += inv_n * std::log(w - p);
    return val;
  }
  T f1(T w, double u) const {
    T val = w - u + coeff0 / w;
    if (a2 > 0.0) val += a2 / (w - spec->pi1);
    for (double p : spec->rest) val += inv_n / (w - p);
    return val;
  }
  T f2(T w) const {
    T val = 1.0 - coeff0 / (w * w);
    if (a2 > 0.0) {
      T d = w - spec->pi1;
      val -= a2 / (d * d);
    }
    for (double p : spec->rest) {
      T d = w - p;
      val -= inv_n / (d * d);
    }
    return val;
  }
  T f3(T w) const {
    T val = 2.0 * coeff0 / (w * w * w);
    if (a2 > 0.0) {
      T d = w - spec->pi1;
      val += 2.0 * a2 / (d * d * d);
    }
    for (double p : spec->rest) {
      T d = w - p;
      val += 2.0 * inv_n / (d * d * d);
    }
    return val;
  }
};

template <typename T>
FTerms<T> make_terms(const DeformationSpec& spec) {
  double a2 = spec.k > 0 ? static_cast<double>(spec.k) / spec.n : 0.0;
  return {a2, 1.0 - a2 - spec.beta_n(), 1.0 / spec.n, &spec};
}

void check_not_pole(double w, const DeformationSpec& spec) {
  auto near = [&](double p) { return std::abs(w - p) < 1e-14 * (1.0 + std::abs(p)); };
  bool pole = near(0.0);
  if (spec.k > 0 && near(spec.pi1)) pole = true;
  for (double p : spec.rest)
    if (near(p)) pole = true;
  if (pole) throw DomainError("f_derivatives: w coincides with a logarithmic pole");
}

}  // namespace

FDerivatives f_derivatives(double w, const DeformationSpec& spec, double u) {
  spec.validate();
  check_not_pole(w, spec);
  if (w <= spec.largest_pole())
    throw DomainError("f_derivatives: real evaluation requires w right of the largest pole");
  auto terms = make_terms<double>(spec);
  return {terms.f(w, u), terms.f1(w, u), terms.f2(w), terms.f3(w)};
}

FDerivativesC f_derivatives(std::complex<double> w, const DeformationSpec& spec, double u) {
  spec.validate();
  check_not_pole(w.real(), spec);
  if (w.imag() == 0.0 && w.real() <= spec.largest_pole())
    throw DomainError("f_derivatives: real axis left of the largest pole is on the cut");
  auto terms = make_terms<std::complex<double>>(spec);
  return {terms.f(w, u), terms.f1(w, u), terms.f2(w), terms.f3(w)};
}

std::string regime_name(Regime regime) {
  switch (regime) {
    case Regime::SubCritical:
      return "sub_critical";
    case Regime::Critical:
      return "critical";
    case Regime::SuperCriticalFixedRank:
      return "super_critical_fixed_rank";
    case Regime::SuperCriticalGrowingRank:
      return "super_critical_growing_rank";
    case Regime::SubCriticalGrowingRank:
      return "sub_critical_growing_rank";
  }
  return "unknown";
}

EdgeGeometry solve_edge_geometry(const DeformationSpec& spec) {
  spec.validate();
  EdgeGeometry g;
  g.alpha_n = spec.alpha_n();
  g.beta_n = spec.beta_n();
  double n23 = std::pow(static_cast<double>(spec.n), 2.0 / 3.0);

  if (spec.pure_gue()) {
    // Degenerate rank: the exponent reduces to w^2/2 - uw + log w, whose
    // largest F''-root is 1 and stationary u is 2.
    g.w_o = 1.0;
    g.u_o = 2.0;
    g.t_r = 0.0;
    g.nu_n = 0.0;
    g.center = 2.0;
    g.scale = n23;
    g.regime = Regime::SubCritical;
    return g;
  }

  auto terms = make_terms<double>(spec);
  double p_max = spec.largest_pole();
  double lo = p_max + 1e-9 * (1.0 + std::abs(p_max));
  double hi = p_max + 10.0;

  // Dense scan for the last sign change of F'' (F'' -> 1 at infinity, so the
  // last bracket holds the largest root), then bisection.
  constexpr int kScanPoints = 10000;
  double step = (hi - lo) / kScanPoints;
  double a = 0.0, b = 0.0;
  double prev_x = lo, prev_f = terms.f2(lo);
  bool found = false;
  for (int i = 1; i <= kScanPoints; ++i) {
    double x = lo + i * step;
    double fx = terms.f2(x);
    if (std::isfinite(prev_f) && std::isfinite(fx) && prev_f < 0.0 && fx >= 0.0) {
      a = prev_x;
      b = x;
      found = true;
    }
    prev_x = x;
    prev_f = fx;
  }
  if (!found)
    throw GeometryError("solve_edge_geometry: no F''=0 bracket on (" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
  for (int iter = 0; iter < 200; ++iter) {
    double mid = 0.5 * (a + b);
    if (terms.f2(mid) < 0.0)
      a = mid;
    else
      b = mid;
    if (b - a < 1e-14 * std::abs(b)) break;
  }
  g.w_o = 0.5 * (a + b);

  // Closed-form stationarity: u_o is read off F'_{u_o}(w_o) = 0.
  g.u_o = terms.f1(g.w_o, 0.0);
  g.t_r = (g.w_o - spec.pi1) / g.alpha_n;
  g.nu_n = g.alpha_n * terms.f3(g.w_o);
  g.center = g.u_o;
  double k23 = std::pow(static_cast<double>(spec.k), 2.0 / 3.0);
  if (spec.pi1 > 1.0) {
    g.regime = Regime::SuperCriticalGrowingRank;
    g.scale = g.t_r * k23 / g.alpha_n;
  } else {
    g.regime = Regime::SubCriticalGrowingRank;
    g.scale = n23 * std::pow(terms.f3(g.w_o) / 2.0, -1.0 / 3.0);
  }
  if (!(g.scale > 0.0)) throw GeometryError("solve_edge_geometry: non-positive scale");
  return g;
}

EdgeGeometry fixed_rank_geometry(const DeformationSpec& spec) {
  spec.validate();
  EdgeGeometry g = solve_edge_geometry(spec);
  double n23 = std::pow(static_cast<double>(spec.n), 2.0 / 3.0);
  if (spec.pi1 > 1.0 && spec.k >= 1) {
    BbpQuantities bbp = bbp_center_scale(spec.pi1);
    g.regime = Regime::SuperCriticalFixedRank;
    g.center = bbp.c;
    g.scale = bbp.sigma2 * std::sqrt(static_cast<double>(spec.n));
  } else {
    g.regime = spec.pi1 == 1.0 && spec.k >= 1 ? Regime::Critical : Regime::SubCritical;
    g.center = 2.0;
    g.scale = n23;
  }
  return g;
}

double bulk_center(const DeformationSpec& spec, double alpha) {
  spec.validate();
  if (!(spec.pi1 > 1.0)) throw DomainError("bulk_center: requires pi1 > 1");
  BbpQuantities bbp = bbp_center_scale(spec.pi1);
  if (!(std::abs(alpha) < 2.0 * bbp.sigma()))
    throw DomainError("bulk_center: |alpha| must be < 2 sigma(pi1)");
  double u = bbp.c + spec.alpha_n() * alpha / bbp.sigma2 + spec.beta_n() / spec.pi1;
  for (double p : spec.rest) u -= (1.0 / spec.n) / (spec.pi1 - p);
  return u;
}

}  // namespace spikelab
