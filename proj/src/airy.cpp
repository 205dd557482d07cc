#include "spikelab/airy.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "spikelab/errors.hpp"

namespace spikelab {

namespace {

constexpr double kAi0 = 0.3550280538878172392600632;    // 3^(-2/3)/Gamma(2/3)
constexpr double kAip0 = -0.2588194037928067984051836;  // -3^(-1/3)/Gamma(1/3)
constexpr double kSqrtPi = 1.7724538509055160273;

// Taylor step for y'' = x y: given (y, y') at x0, returns values at x0 + h.
// Coefficient recurrence c_{m+2} = (x0 c_m + c_{m-1}) / ((m+1)(m+2)).
AiryPair taylor_step(double x0, AiryPair v, double h) {
  double cm1 = 0.0;           // c_{m-1}
  double c0 = v.ai, c1 = v.aip;
  double sum = c0 + c1 * h;
  double dsum = c1;
  double hp = h;  // h^{M-1} for coefficient index M = m + 2
  for (int m = 0; m + 2 <= 60; ++m) {
    double c2 = (x0 * c0 + cm1) / ((m + 1.0) * (m + 2.0));
    dsum += (m + 2.0) * c2 * hp;
    double term = c2 * hp * h;
    sum += term;
    hp *= h;
    cm1 = c0;
    c0 = c1;
    c1 = c2;
  }
  return {sum, dsum};
}

// Asymptotic series coefficients u_k (and v_k = u_k (6k+1)/(1-6k)), summed
// with alternating signs until the smallest term.
void asymptotic_sums(double zeta, double& su, double& sv) {
  double u = 1.0, sign = 1.0;
  su = 1.0;
  sv = 1.0;
  double prev = 1.0;
  for (int k = 1; k <= 40; ++k) {
    u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / (216.0 * k * (2.0 * k - 1.0));
    double term = u / std::pow(zeta, k);
    if (term > prev) break;  // divergent tail reached
    sign = -sign;
    su += sign * term;
    sv += sign * term * (6.0 * k + 1.0) / (1.0 - 6.0 * k);
    prev = term;
    if (term < 1e-18) break;
  }
}

// Oscillatory expansion sums: P, Q built from even/odd u_k, R, S from v_k.
void oscillatory_sums(double zeta, double& p, double& q, double& r, double& s) {
  std::array<double, 26> u{}, v{};
  u[0] = 1.0;
  v[0] = 1.0;
  for (int k = 1; k < 26; ++k) {
    u[k] = u[k - 1] * (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) /
           (216.0 * k * (2.0 * k - 1.0));
    v[k] = u[k] * (6.0 * k + 1.0) / (1.0 - 6.0 * k);
  }
  p = q = r = s = 0.0;
  double zp = 1.0;  // zeta^{-k}
  double prev = 1e300;
  for (int k = 0; k < 26; ++k) {
    double term = u[k] * zp;
    if (std::abs(term) > prev) break;
    prev = std::abs(term);
    double sgn = (k / 2) % 2 == 0 ? 1.0 : -1.0;  // (-1)^j for k = 2j or 2j+1
    if (k % 2 == 0) {
      p += sgn * term;
      r += sgn * v[k] * zp;
    } else {
      q += sgn * term;
      s += sgn * v[k] * zp;
    }
    zp /= zeta;
    if (std::abs(term) < 1e-18) break;
  }
}

AiryPair airy_asymptotic_pos(double x) {
  double sqrtx = std::sqrt(x);
  double zeta = 2.0 / 3.0 * x * sqrtx;
  double su, sv;
  asymptotic_sums(zeta, su, sv);
  double e = std::exp(-zeta);
  double x14 = std::sqrt(sqrtx);
  double ai = e * su / (2.0 * kSqrtPi * x14);
  double aip = -e * sv * x14 / (2.0 * kSqrtPi);
  return {ai, aip};
}

AiryPair airy_asymptotic_neg(double x) {
  double t = -x;
  double sqrtt = std::sqrt(t);
  double zeta = 2.0 / 3.0 * t * sqrtt;
  double p, q, r, s;
  oscillatory_sums(zeta, p, q, r, s);
  double phase = zeta - M_PI / 4.0;
  double c = std::cos(phase), sn = std::sin(phase);
  double t14 = std::sqrt(sqrtt);
  double ai = (c * p + sn * q) / (kSqrtPi * t14);
  double aip = (sn * r - c * s) * t14 / kSqrtPi;
  return {ai, aip};
}

// Anchor tables on [3, 9] and [-9, -3], spacing 1/4, built by Taylor-stepping
// inward from the asymptotic seed at |x| = 9 (the numerically stable
// direction on the positive axis).
struct AnchorTable {
  std::vector<AiryPair> pos;  // pos[i] at x = 9 - i/4, i = 0..24
  std::vector<AiryPair> neg;  // neg[i] at x = -9 + i/4, i = 0..24
};

const AnchorTable& anchors() {
  static const AnchorTable table = [] {
    AnchorTable t;
    t.pos.resize(25);
    t.neg.resize(25);
    t.pos[0] = airy_asymptotic_pos(9.0);
    for (int i = 1; i <= 24; ++i) t.pos[i] = taylor_step(9.0 - (i - 1) * 0.25, t.pos[i - 1], -0.25);
    t.neg[0] = airy_asymptotic_neg(-9.0);
    for (int i = 1; i <= 24; ++i)
      t.neg[i] = taylor_step(-9.0 + (i - 1) * 0.25, t.neg[i - 1], 0.25);
    return t;
  }();
  return table;
}

}  // namespace

AiryPair airy(double x) {
  if (!(x >= -500.0 && x <= 400.0))
    throw DomainError("airy: argument out of supported range");
  if (std::abs(x) <= 3.0) return taylor_step(0.0, {kAi0, kAip0}, x);
  if (x >= 9.0) return airy_asymptotic_pos(x);
  if (x <= -9.0) return airy_asymptotic_neg(x);
  const AnchorTable& t = anchors();
  if (x > 0.0) {
    int i = static_cast<int>(std::lround((9.0 - x) * 4.0));
    i = std::min(std::max(i, 0), 24);
    double x0 = 9.0 - i * 0.25;
    return taylor_step(x0, t.pos[i], x - x0);
  }
  int i = static_cast<int>(std::lround((x + 9.0) * 4.0));
  i = std::min(std::max(i, 0), 24);
  double x0 = -9.0 + i * 0.25;
  return taylor_step(x0, t.neg[i], x - x0);
}

}  // namespace spikelab
