#include "cubic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cubicstrata {

Complex discriminant(const Params& p) {
  return -4.0 * p.e1 * p.e1 * p.e1 - 27.0 * p.e0 * p.e0;
}

namespace {

double roundto(double x, double q) {
  if (!std::isfinite(x)) return x;
  double r = std::round(x / q) * q;
  return r == 0.0 ? 0.0 : r;  // normalize -0
}

// Canonical order: lexicographic by (Re, Im) rounded to tol.root_round,
// ties broken on the raw values so the order is still total.
void sort_canonical(std::array<Complex, 3>& z, double q) {
  std::sort(z.begin(), z.end(), [q](Complex a, Complex b) {
    double ar = roundto(a.real(), q), br = roundto(b.real(), q);
    if (ar != br) return ar < br;
    double ai = roundto(a.imag(), q), bi = roundto(b.imag(), q);
    if (ai != bi) return ai < bi;
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

Complex newton_polish(const Params& p, Complex z) {
  for (int it = 0; it < 2; ++it) {
    Complex d = eval_dp(p, z);
    // A vanishing derivative means a (near) multiple root; polishing there
    // would divide noise by noise.
    if (std::abs(d) < 1e-13 * (1.0 + std::norm(z))) break;
    z -= eval_p(p, z) / d;
  }
  return z;
}

// Double-double scalar: value hi + lo with |lo| <= ulp(hi)/2.  Only the
// handful of operations the compensated Horner below needs.
struct DD {
  double hi = 0.0, lo = 0.0;
};

DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

DD two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

DD dd_add(DD x, DD y) {
  DD s = two_sum(x.hi, y.hi);
  double lo = s.lo + x.lo + y.lo;
  DD r = two_sum(s.hi, lo);
  return r;
}

DD dd_mul(DD x, DD y) {
  DD p = two_prod(x.hi, y.hi);
  double lo = p.lo + x.hi * y.lo + x.lo * y.hi;
  DD r = two_sum(p.hi, lo);
  return r;
}

struct DDC {
  DD re, im;
};

DDC ddc_add(DDC a, DDC b) { return {dd_add(a.re, b.re), dd_add(a.im, b.im)}; }

DDC ddc_mul(DDC a, DDC b) {
  DD rr = dd_add(dd_mul(a.re, b.re), dd_mul({-a.im.hi, -a.im.lo}, b.im));
  DD ii = dd_add(dd_mul(a.re, b.im), dd_mul(a.im, b.re));
  return {rr, ii};
}

// P(z) with evaluation error far below one ulp of the leading terms.  At a
// near-double stationary point the plain double Horner cancels two O(1)
// terms down to O(1e-17), so its rounding noise is the same size as the
// value itself and the splitting estimate 2 sqrt|2 P / P''| inherits a
// sqrt-amplified version of that noise right at the merge threshold.
Complex eval_p_dd(const Params& p, Complex z) {
  DDC zz{{z.real(), 0.0}, {z.imag(), 0.0}};
  DDC e1{{p.e1.real(), 0.0}, {p.e1.imag(), 0.0}};
  DDC e0{{p.e0.real(), 0.0}, {p.e0.imag(), 0.0}};
  DDC acc = ddc_add(ddc_mul(zz, zz), e1);
  acc = ddc_add(ddc_mul(acc, zz), e0);
  return {acc.re.hi, acc.im.hi};
}

}  // namespace

CubicRoots solve_cubic(const Params& p, const Tolerances& tol) {
  CubicRoots out;

  double pscale = std::abs(p.e1) + std::abs(p.e0);
  if (pscale <= tol.zero_norm) {
    out.z = {Complex(0.0), Complex(0.0), Complex(0.0)};
    out.pattern = MultPattern::triple;
    out.dup = 0;
    return out;
  }

  // Depressed cubic: u^3 and v^3 solve w^2 + e0*w - (e1/3)^3 = 0.  Taking
  // the larger branch avoids cancellation.
  const Complex w1(-0.5, std::sqrt(3.0) / 2.0);   // primitive cube root of 1
  const Complex w2(-0.5, -std::sqrt(3.0) / 2.0);
  Complex half_q = 0.5 * p.e0;
  Complex third_p = p.e1 / 3.0;
  Complex s = std::sqrt(half_q * half_q + third_p * third_p * third_p);
  Complex u3 = (std::abs(-half_q + s) >= std::abs(-half_q - s)) ? -half_q + s : -half_q - s;

  std::array<Complex, 3> z;
  if (std::abs(u3) == 0.0) {
    // e1 and e0 both effectively zero was handled above; here only e1 = 0
    // with u3 underflow is left, so fall back to the pure binomial solve.
    Complex r = std::pow(-p.e0, 1.0 / 3.0);
    z = {r, w1 * r, w2 * r};
  } else {
    Complex u = std::pow(u3, 1.0 / 3.0);
    Complex v = -third_p / u;
    z = {u + v, w1 * u + w2 * v, w2 * u + w1 * v};
  }
  for (auto& zi : z) zi = newton_polish(p, zi);

  // Multiplicity.  Near a collision Cardano's branches carry O(sqrt(eps))
  // noise, so the decision is not made on the raw pair distance: reexpand
  // around the stationary point z_d (P'(z_d) = 0) nearest the close pair,
  // where the true splitting is 2*sqrt(-2 P(z_d)/P''(z_d)).
  int ia = 0, ib = 1;
  double dmin = std::abs(z[0] - z[1]);
  if (std::abs(z[0] - z[2]) < dmin) { dmin = std::abs(z[0] - z[2]); ia = 0; ib = 2; }
  if (std::abs(z[1] - z[2]) < dmin) { dmin = std::abs(z[1] - z[2]); ia = 1; ib = 2; }
  double mscale = std::max({1.0, std::abs(z[ia]), std::abs(z[ib])});

  if (dmin <= 100.0 * tol.root_merge * mscale) {
    Complex zd = std::sqrt(-p.e1 / 3.0);
    Complex mean = 0.5 * (z[ia] + z[ib]);
    if (std::abs(-zd - mean) < std::abs(zd - mean)) zd = -zd;
    Complex split_sq = -2.0 * eval_p_dd(p, zd) / (6.0 * zd);
    double split = 2.0 * std::sqrt(std::abs(split_sq));
    double mergetol = tol.root_merge * std::max(1.0, std::abs(zd));
    if (split <= mergetol) {
      out.pattern = MultPattern::double_root;
      z = {zd, zd, -2.0 * zd};
    } else {
      Complex h = std::sqrt(split_sq);
      z = {newton_polish(p, zd + h), newton_polish(p, zd - h), newton_polish(p, -2.0 * zd)};
    }
  }

  out.z = z;
  sort_canonical(out.z, tol.root_round);
  if (out.pattern == MultPattern::double_root) {
    out.dup = (out.z[0] == out.z[1]) ? 0 : 1;
  }
  return out;
}

Spectrum spectrum(const Params& p, const CubicRoots& roots) {
  Spectrum s;
  for (int j = 0; j < 3; ++j) s.lambda[j] = eval_dp(p, roots.z[j]);
  if (roots.pattern == MultPattern::double_root) {
    // P' vanishes identically at a double root; pin the value so callers
    // can test "multiple" by lambda == 0 exactly.
    s.lambda[roots.dup] = 0.0;
    s.lambda[roots.dup + 1] = 0.0;
  } else if (roots.pattern == MultPattern::triple) {
    s.lambda = {Complex(0.0), Complex(0.0), Complex(0.0)};
  }
  return s;
}

Spectrum spectrum(const Params& p, const Tolerances& tol) {
  return spectrum(p, solve_cubic(p, tol));
}

double axis_distance(Complex lambda) {
  double m = std::abs(lambda);
  if (m == 0.0) throw std::invalid_argument("axis_distance: zero eigenvalue (multiple root)");
  return std::abs(lambda.real()) / m;
}

Params scale_params(const Params& p, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("scale_params: delta must be positive");
  return Params{delta * delta * p.e1, delta * delta * delta * p.e0};
}

Params rotate_params(const Params& p) {
  return Params{-p.e1, Complex(0.0, -1.0) * p.e0};
}

Params reflect_params(const Params& p) {
  return Params{p.e1, -p.e0};
}

ChartPoint normalize_chart(const Params& p, Chart chart) {
  double a = std::abs(p.e1), b = std::abs(p.e0);
  if (chart == Chart::e1_unit) {
    if (a == 0.0) throw std::invalid_argument("normalize_chart: e1_unit needs e1 != 0");
    double d = 1.0 / std::sqrt(a);
    return ChartPoint{scale_params(p, d), d};
  }
  if (a + b == 0.0) throw std::invalid_argument("normalize_chart: zero parameters");
  // delta^2*a + delta^3*b = 1 is monotone in delta: Newton from a safe
  // one-term guess, bisection fallback not needed.
  double d = (a >= b) ? 1.0 / std::sqrt(a + b) : std::cbrt(1.0 / (a + b));
  for (int it = 0; it < 60; ++it) {
    double f = d * d * a + d * d * d * b - 1.0;
    double df = 2.0 * d * a + 3.0 * d * d * b;
    double step = f / df;
    d -= step;
    if (std::abs(step) <= 1e-16 * d) break;
  }
  return ChartPoint{scale_params(p, d), d};
}

double root_scale(const CubicRoots& roots) {
  double m = 1.0;
  for (const auto& z : roots.z) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace cubicstrata
