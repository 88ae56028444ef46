#include "flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cubicstrata {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double wrap_pi(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

// Dormand-Prince 5(4).  k1 comes in (FSAL), k7 = f(y_out) goes out.
template <typename F>
void dopri_step(F&& f, Complex y, Complex k1, double h, Complex& y_out,
                Complex& err, Complex& k7) {
  const Complex k2 = f(y + h * (1.0 / 5 * k1));
  const Complex k3 = f(y + h * (3.0 / 40 * k1 + 9.0 / 40 * k2));
  const Complex k4 = f(y + h * (44.0 / 45 * k1 - 56.0 / 15 * k2 + 32.0 / 9 * k3));
  const Complex k5 =
      f(y + h * (19372.0 / 6561 * k1 - 25360.0 / 2187 * k2 +
                 64448.0 / 6561 * k3 - 212.0 / 729 * k4));
  const Complex k6 =
      f(y + h * (9017.0 / 3168 * k1 - 355.0 / 33 * k2 + 46732.0 / 5247 * k3 +
                 49.0 / 176 * k4 - 5103.0 / 18656 * k5));
  y_out = y + h * (35.0 / 384 * k1 + 500.0 / 1113 * k3 + 125.0 / 192 * k4 -
                   2187.0 / 6784 * k5 + 11.0 / 84 * k6);
  k7 = f(y_out);
  err = h * (71.0 / 57600 * k1 - 71.0 / 16695 * k3 + 71.0 / 1920 * k4 -
             17253.0 / 339200 * k5 + 22.0 / 525 * k6 - 1.0 / 40 * k7);
}

struct RootInfo {
  CubicRoots roots;
  std::array<Complex, 3> lambda;
  std::array<double, 3> separation;  // min distance to the other roots
  double scale = 1.0;
  bool near_parabolic = false;
};

RootInfo root_info(const Params& p, const Tolerances& tol) {
  RootInfo info;
  info.roots = solve_cubic(p, tol);
  info.lambda = spectrum(p, info.roots).lambda;
  info.scale = root_scale(info.roots);
  for (int i = 0; i < 3; ++i) {
    double s = 1e300;
    for (int j = 0; j < 3; ++j)
      if (j != i) s = std::min(s, std::abs(info.roots.z[i] - info.roots.z[j]));
    info.separation[i] = s;
    if (s <= 1e-4 * info.scale) info.near_parabolic = true;
  }
  return info;
}

bool landing_compatible(Complex lambda, int dir) {
  if (lambda == Complex(0.0, 0.0)) return true;  // parabolic petals face both ways
  return dir > 0 ? lambda.real() < 0.0 : lambda.real() > 0.0;
}

}  // namespace

double chart_radius(const Params& p, const Tolerances& tol) {
  double m = std::max(1.0, std::sqrt(std::abs(p.e1)));
  m = std::max(m, std::cbrt(std::abs(p.e0)));
  return tol.chart_factor * m;
}

Complex pole_time_series(const Params& p, Complex z) {
  const Complex iz2 = 1.0 / (z * z);
  const Complex iz = 1.0 / z;
  const Complex e1 = p.e1, e0 = p.e0;
  Complex t = 0.5 * iz2;
  t -= e1 / 4.0 * iz2 * iz2;
  t -= e0 / 5.0 * iz2 * iz2 * iz;
  t += e1 * e1 / 6.0 * iz2 * iz2 * iz2;
  t += 2.0 * e1 * e0 / 7.0 * iz2 * iz2 * iz2 * iz;
  t += (e0 * e0 - e1 * e1 * e1) / 8.0 * iz2 * iz2 * iz2 * iz2;
  return t;
}

double seed_angle(const Params& p, int index, double R) {
  double theta = (index - 1) * (kPi / 2.0);
  for (int it = 0; it < 3; ++it) {
    const Complex z = std::polar(R, theta);
    const double g = pole_time_series(p, z).imag();
    const double dg = (Complex(0, -1) * z / eval_p(p, z)).imag();
    if (dg == 0.0) break;
    theta -= g / dg;
  }
  return theta;
}

int sector_of(double theta) {
  const double s = std::floor(theta / (kPi / 2.0)) + 2.0;
  long q = (std::lround(s) - 1) % 4;
  if (q < 0) q += 4;
  return static_cast<int>(q) + 1;
}

Trajectory integrate(const Params& p, Complex z0, int time_dir,
                     const Tolerances& tol, bool record, double t_limit,
                     double h_max, const std::vector<double>* absorb) {
  if (time_dir != 1 && time_dir != -1)
    throw std::invalid_argument("time_dir must be +1 or -1");
  const double dir = static_cast<double>(time_dir);
  const double R = chart_radius(p, tol);
  const double w_exit = 1.0 / R;
  const RootInfo info = root_info(p, tol);
  const double landing_r = tol.landing * info.scale;

  const auto f_fin = [&](Complex z) { return dir * eval_p(p, z); };
  const auto f_inf = [&](Complex w) {
    return dir * -(1.0 / w + p.e1 * w + p.e0 * w * w);
  };

  double budget = t_limit > 0.0
                      ? t_limit
                      : tol.max_time * (info.near_parabolic ? 100.0 : 1.0);

  Trajectory traj;
  ChartFlag chart = ChartFlag::finite;
  Complex u = z0;
  if (std::abs(u) > R) {
    chart = ChartFlag::infinity_chart;
    u = 1.0 / u;
    traj.excursions.push_back(
        {std::arg(z0), std::abs(u), std::arg(z0), false});
  }
  double elapsed = 0.0;

  // Winding of z - z_k, accumulated over the whole run; names the enclosed
  // root of a homoclinic loop.
  std::array<double, 3> wind{};
  std::array<double, 3> prev_arg;
  {
    const Complex zc = chart == ChartFlag::finite ? u : 1.0 / u;
    for (int k = 0; k < 3; ++k) prev_arg[k] = std::arg(zc - info.roots.z[k]);
  }
  const auto update_winding = [&](Complex zc) {
    for (int k = 0; k < 3; ++k) {
      const double a = std::arg(zc - info.roots.z[k]);
      wind[k] += wrap_pi(a - prev_arg[k]);
      prev_arg[k] = a;
    }
  };

  // Spiral landing certificate: inside half the separation disk of one
  // root, enough winding plus radial contraction counts as landed even
  // though the landing radius is still far.
  int win_root = -1;
  double win_accum = 0.0, win_prev = 0.0, win_r0 = 0.0;

  // Period annulus trap: per root, closest approach over successive 20-turn
  // winding blocks.  Comparing blocks at equal winding phase cancels the
  // orbit shape, so closed orbits hold the ratio at 1 while any landing
  // spiral with |Re lambda|/|lambda| above ~1.6e-4 contracts below 0.98.
  std::array<double, 3> wind_mark{};
  std::array<double, 3> rmin_prev{-1.0, -1.0, -1.0};
  std::array<double, 3> rmin_cur{1e300, 1e300, 1e300};

  const auto push = [&](double t, Complex val, ChartFlag c) {
    if (record) traj.samples.push_back({t, val, c});
  };
  const auto finish = [&](TerminalEvent ev, double t, Complex val, ChartFlag c,
                          const char* diag) {
    traj.event = ev;
    traj.t_end = t;
    traj.u_end = val;
    traj.chart_end = c;
    traj.diagnostic = diag;
    traj.winding = wind;
    push(t, val, c);
  };

  push(0.0, u, chart);

  if (chart == ChartFlag::finite) {
    double dmin = 1e300;
    int imin = -1;
    for (int k = 0; k < 3; ++k) {
      const double d = std::abs(u - info.roots.z[k]);
      if (d < dmin) dmin = d, imin = k;
    }
    if (dmin <= landing_r && landing_compatible(info.lambda[imin], time_dir)) {
      traj.root = imin;
      finish(TerminalEvent::landed, 0.0, u, chart, "");
      return traj;
    }
  }

  Complex k1 = chart == ChartFlag::finite ? f_fin(u) : f_inf(u);
  double h = std::min(1e-3, 0.05 * std::max(1.0, std::abs(u)) /
                                (std::abs(k1) + 1e-300));
  if (h_max > 0.0) h = std::min(h, h_max);
  double errold = 1.0;
  long steps = 0;
  const long max_steps = 4000000;

  while (true) {
    if (++steps > max_steps) {
      finish(TerminalEvent::step_failure, dir * elapsed, u, chart,
             "step budget exhausted");
      return traj;
    }
    const double rem = budget - elapsed;
    if (rem <= 1e-13 * budget) {
      finish(TerminalEvent::time_exhausted, dir * elapsed, u, chart,
             t_limit > 0.0 ? "" : "time budget exhausted");
      return traj;
    }
    bool clipped = false;
    if (h >= rem) {
      h = rem;
      clipped = true;
    }

    Complex y, err, k7;
    if (chart == ChartFlag::finite)
      dopri_step(f_fin, u, k1, h, y, err, k7);
    else
      dopri_step(f_inf, u, k1, h, y, err, k7);

    const double tolr =
        tol.abs + tol.rel * std::max(std::abs(u), std::abs(y));
    const double e = std::abs(err) / tolr;
    if (e > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(e, -0.2));
      if (h < 1e-14 * std::max(1.0, elapsed)) {
        finish(TerminalEvent::step_failure, dir * elapsed, u, chart,
               "step size underflow");
        return traj;
      }
      continue;
    }

    if (chart == ChartFlag::finite && std::abs(y) > R) {
      // Locate |z| = R on (0, h] by Illinois on a fresh partial step.
      double s0 = 0.0, f0 = std::abs(u) - R;
      double s1 = 1.0, f1 = std::abs(y) - R;
      Complex ystar = y;
      for (int it = 0; it < 80 && s1 - s0 > 1e-15; ++it) {
        double sm = (f1 * s0 - f0 * s1) / (f1 - f0);
        if (!(sm > s0 && sm < s1)) sm = 0.5 * (s0 + s1);
        Complex ym, em, km;
        dopri_step(f_fin, u, k1, sm * h, ym, em, km);
        const double fm = std::abs(ym) - R;
        if (std::abs(fm) <= 1e-11 * R) {
          s1 = sm;
          ystar = ym;
          break;
        }
        if ((fm < 0.0) == (f0 < 0.0)) {
          s0 = sm;
          f0 = fm;
        } else {
          s1 = sm;
          f1 = fm;
          ystar = ym;
        }
      }
      elapsed += s1 * h;
      update_winding(ystar);
      push(dir * elapsed, ystar, ChartFlag::finite);
      const double theta_out = std::arg(ystar);
      if (absorb != nullptr) {
        for (double a : *absorb) {
          if (std::abs(wrap_pi(theta_out - a)) <= tol.match) {
            traj.excursions.push_back({theta_out, 1.0 / R, theta_out, false});
            traj.direction = theta_out;
            finish(TerminalEvent::reached_infinity, dir * elapsed, ystar,
                   ChartFlag::finite, "");
            return traj;
          }
        }
      }
      chart = ChartFlag::infinity_chart;
      u = 1.0 / ystar;
      const double wmag = std::abs(u);
      if (wmag >= w_exit) u *= w_exit * (1.0 - 1e-12) / wmag;
      traj.excursions.push_back({theta_out, std::abs(u), theta_out, false});
      push(dir * elapsed, u, chart);
      k1 = f_inf(u);
      h = std::max(1e-14, 0.2 * h);
      errold = 1.0;
      win_root = -1;
      continue;
    }

    if (chart == ChartFlag::infinity_chart && std::abs(y) >= w_exit) {
      double s0 = 0.0, f0 = std::abs(u) - w_exit;
      double s1 = 1.0, f1 = std::abs(y) - w_exit;
      Complex ystar = y;
      for (int it = 0; it < 80 && s1 - s0 > 1e-15; ++it) {
        double sm = (f1 * s0 - f0 * s1) / (f1 - f0);
        if (!(sm > s0 && sm < s1)) sm = 0.5 * (s0 + s1);
        Complex ym, em, km;
        dopri_step(f_inf, u, k1, sm * h, ym, em, km);
        const double fm = std::abs(ym) - w_exit;
        if (std::abs(fm) <= 1e-11 * w_exit) {
          s1 = sm;
          ystar = ym;
          break;
        }
        if ((fm < 0.0) == (f0 < 0.0)) {
          s0 = sm;
          f0 = fm;
        } else {
          s1 = sm;
          f1 = fm;
          ystar = ym;
        }
      }
      elapsed += s1 * h;
      push(dir * elapsed, ystar, ChartFlag::infinity_chart);
      if (!traj.excursions.empty()) traj.excursions.back().returned = true;
      chart = ChartFlag::finite;
      u = 1.0 / ystar;
      const double zmag = std::abs(u);
      if (zmag >= R) u *= R * (1.0 - 1e-12) / zmag;
      update_winding(u);
      push(dir * elapsed, u, chart);
      k1 = f_fin(u);
      h = std::max(1e-14, 0.2 * h);
      errold = 1.0;
      continue;
    }

    // Plain accepted step.
    elapsed += h;
    u = y;
    k1 = k7;
    const Complex zc = chart == ChartFlag::finite ? u : 1.0 / u;
    update_winding(zc);
    push(dir * elapsed, u, chart);

    for (int k = 0; k < 3; ++k) {
      const double rk = std::abs(zc - info.roots.z[k]);
      if (rk < rmin_cur[k]) rmin_cur[k] = rk;
      if (std::abs(wind[k] - wind_mark[k]) >= 40.0 * kPi) {
        if (rmin_prev[k] >= 0.0 && rmin_cur[k] >= 0.98 * rmin_prev[k]) {
          finish(TerminalEvent::trapped, dir * elapsed, u, chart,
                 "closed orbit region");
          return traj;
        }
        wind_mark[k] = wind[k];
        rmin_prev[k] = rmin_cur[k];
        rmin_cur[k] = 1e300;
      }
    }

    if (chart == ChartFlag::infinity_chart) {
      const double wmag = std::abs(u);
      Excursion& ex = traj.excursions.back();
      if (wmag < ex.min_w) {
        ex.min_w = wmag;
        ex.theta_at_min = std::arg(zc);
      }
      // Deep in the chart the asymptotic time to the pole decides the run:
      // Im t is conserved along the flow, so an inbound trajectory with
      // Im t at integration-drift level genuinely enters the pole and the
      // remaining Re t completes the time analytically.  Stepping all the
      // way to the pole is not an option (h shrinks like |w|^(9/5) into
      // the underflow guard), and a near-miss shows Im t at the parameter
      // offset scale, orders above this threshold.
      if (wmag <= 0.5 * w_exit) {
        const Complex T = pole_time_series(p, zc);
        const double rem = dir * T.real();
        if (std::abs(T.imag()) <= 1e-9 && rem >= 0.0) {
          traj.direction = std::arg(zc);
          finish(TerminalEvent::reached_infinity, dir * (elapsed + rem), u,
                 chart, "");
          return traj;
        }
      }
    } else {
      double dmin = 1e300;
      int imin = -1;
      for (int k = 0; k < 3; ++k) {
        const double d = std::abs(u - info.roots.z[k]);
        if (d < dmin) dmin = d, imin = k;
      }
      if (dmin <= landing_r &&
          landing_compatible(info.lambda[imin], time_dir)) {
        traj.root = imin;
        finish(TerminalEvent::landed, dir * elapsed, u, chart, "");
        return traj;
      }
      if (imin >= 0 && dmin <= 0.5 * info.separation[imin] &&
          landing_compatible(info.lambda[imin], time_dir) &&
          info.lambda[imin] != Complex(0.0, 0.0)) {
        const double a = std::arg(u - info.roots.z[imin]);
        if (win_root != imin) {
          win_root = imin;
          win_accum = 0.0;
          win_prev = a;
          win_r0 = dmin;
        } else {
          win_accum += wrap_pi(a - win_prev);
          win_prev = a;
          if (std::abs(win_accum) >= 4.0 * kPi && dmin <= 0.9 * win_r0) {
            traj.root = imin;
            finish(TerminalEvent::landed, dir * elapsed, u, chart, "");
            return traj;
          }
        }
      } else {
        win_root = -1;
      }
    }

    const double ee = std::max(e, 1e-10);
    double fac = 0.9 * std::pow(ee, -0.7 / 5.0) * std::pow(errold, 0.4 / 5.0);
    fac = std::clamp(fac, 0.2, 5.0);
    errold = ee;
    if (!clipped) h *= fac;
    if (h_max > 0.0) h = std::min(h, h_max);
  }
}

namespace {

// Quadrant bounded by the two base directions of an adjacent separatrix
// pair: {a, a+1 cyclic} bounds sector a+1.
int pair_quadrant(int i, int j) {
  const int lo = std::min(i, j), hi = std::max(i, j);
  if (lo == 1 && hi == 4) return 1;
  return hi;
}

SeparatrixTrace run_one(const Params& p, int index, double R,
                        const std::array<double, 4>& seeds,
                        const Tolerances& tol, bool record) {
  SeparatrixTrace tr;
  tr.index = index;
  tr.kind = (index % 2 == 1) ? SepKind::attracting : SepKind::repelling;
  tr.theta_seed = seeds[index - 1];
  const int dir = tr.kind == SepKind::attracting ? -1 : +1;
  const Complex z0 = std::polar(R, tr.theta_seed);
  // A homoclinic trace leaves along a separatrix of the other kind; its
  // seeds are the absorbing exit directions.
  const std::vector<double> absorb =
      tr.kind == SepKind::attracting
          ? std::vector<double>{seeds[1], seeds[3]}
          : std::vector<double>{seeds[0], seeds[2]};
  tr.traj = integrate(p, z0, dir, tol, record, 0.0, 0.0, &absorb);

  switch (tr.traj.event) {
    case TerminalEvent::landed:
      tr.outcome = SepOutcome::lands;
      tr.root = tr.traj.root;
      break;
    case TerminalEvent::reached_infinity: {
      // Re-approach to the pole happens along a separatrix of the other
      // kind; compare exit angles at |z| = R against their seeds.
      const double theta_out = tr.traj.excursions.empty()
                                   ? tr.traj.direction
                                   : tr.traj.excursions.back().theta_out;
      int best = 0;
      double bestd = 1e300;
      for (int j = (tr.kind == SepKind::attracting ? 2 : 1); j <= 4; j += 2) {
        const double d = std::abs(wrap_pi(theta_out - seeds[j - 1]));
        if (d < bestd) bestd = d, best = j;
      }
      if (bestd <= tol.match) {
        tr.outcome = SepOutcome::homoclinic;
        tr.partner = best;
        tr.quadrant = pair_quadrant(tr.index, tr.partner);
        int enc = 0;
        for (int k = 1; k < 3; ++k)
          if (std::abs(tr.traj.winding[k]) > std::abs(tr.traj.winding[enc]))
            enc = k;
        if (std::abs(tr.traj.winding[enc]) < 3.0) {
          tr.outcome = SepOutcome::unresolved;
          tr.diagnostic = "enclosed root ambiguous";
        } else {
          tr.enclosed_root = enc;
        }
      } else {
        tr.outcome = SepOutcome::unresolved;
        char buf[96];
        std::snprintf(buf, sizeof buf,
                      "pole approach %.3g rad off nearest seed", bestd);
        tr.diagnostic = buf;
      }
      break;
    }
    case TerminalEvent::trapped:
      tr.outcome = SepOutcome::unresolved;
      tr.diagnostic = tr.traj.diagnostic;
      break;
    case TerminalEvent::time_exhausted:
      tr.outcome = SepOutcome::unresolved;
      tr.diagnostic = "time budget exhausted";
      break;
    case TerminalEvent::step_failure:
      tr.outcome = SepOutcome::unresolved;
      tr.diagnostic = tr.traj.diagnostic;
      break;
  }
  return tr;
}

}  // namespace

std::array<SeparatrixTrace, 4> trace_separatrices(const Params& p,
                                                  const Tolerances& tol,
                                                  const TraceOptions& opts) {
  std::array<SeparatrixTrace, 4> out;
  const double R = chart_radius(p, tol);

  if (std::abs(p.e1) + std::abs(p.e0) <= tol.zero_norm) {
    // Pure z^3: the four separatrices are the half-axes into the triple
    // root at 0.
    for (int i = 1; i <= 4; ++i) {
      SeparatrixTrace& tr = out[i - 1];
      tr.index = i;
      tr.kind = (i % 2 == 1) ? SepKind::attracting : SepKind::repelling;
      tr.theta_seed = (i - 1) * (kPi / 2.0);
      tr.outcome = SepOutcome::lands;
      tr.root = 0;
      if (opts.record) {
        const Complex z0 = std::polar(R, tr.theta_seed);
        const int dir = tr.kind == SepKind::attracting ? -1 : +1;
        tr.traj = integrate(p, z0, dir, tol, true);
      }
    }
    return out;
  }

  std::array<double, 4> seeds;
  for (int i = 1; i <= 4; ++i) seeds[i - 1] = seed_angle(p, i, R);

  const auto run = [&](int index) {
    out[index - 1] = run_one(p, index, R, seeds, tol, opts.record);
  };

  if (opts.early_w1) {
    run(2);
    run(4);
    const auto& a = out[1];
    const auto& b = out[3];
    if (a.outcome == SepOutcome::lands && b.outcome == SepOutcome::lands &&
        a.root == b.root) {
      for (int i : {1, 3}) {
        out[i - 1].index = i;
        out[i - 1].kind = SepKind::attracting;
        out[i - 1].theta_seed = seeds[i - 1];
        out[i - 1].outcome = SepOutcome::unresolved;
        out[i - 1].diagnostic = "skipped";
      }
      return out;
    }
    run(1);
    run(3);
  } else {
    for (int i = 1; i <= 4; ++i) run(i);
  }

  // Cross-validate homoclinic pairing.
  for (int i = 1; i <= 4; ++i) {
    SeparatrixTrace& tr = out[i - 1];
    if (tr.outcome != SepOutcome::homoclinic) continue;
    SeparatrixTrace& pa = out[tr.partner - 1];
    if (pa.outcome != SepOutcome::homoclinic || pa.partner != i ||
        pa.quadrant != tr.quadrant || pa.enclosed_root != tr.enclosed_root) {
      tr.outcome = SepOutcome::unresolved;
      tr.diagnostic = "homoclinic pairing inconsistent";
      if (pa.outcome == SepOutcome::homoclinic) {
        pa.outcome = SepOutcome::unresolved;
        pa.diagnostic = "homoclinic pairing inconsistent";
      }
    }
  }
  return out;
}

ConnectingGraph build_connecting_graph(
    const std::array<SeparatrixTrace, 4>& traces) {
  ConnectingGraph g;
  bool any_hom = false, any_unresolved = false, skipped = false;
  for (const auto& tr : traces) {
    if (tr.outcome == SepOutcome::lands) g.landing[tr.index - 1] = tr.root;
    if (tr.outcome == SepOutcome::homoclinic) any_hom = true;
    if (tr.outcome == SepOutcome::unresolved) {
      any_unresolved = true;
      if (tr.diagnostic == "skipped") skipped = true;
    }
  }

  const int rep1 = g.landing[1], rep2 = g.landing[3];
  const int att1 = g.landing[0], att2 = g.landing[2];
  if (rep1 >= 0 && rep1 == rep2) {
    g.w_class = WClass::w1;
    g.shared_root = rep1;
    if (att1 >= 0 && att2 >= 0 &&
        (att1 == att2 || att1 == rep1 || att2 == rep1))
      g.diagnostic = "landing pattern not generic";
  } else if (att1 >= 0 && att1 == att2) {
    g.w_class = WClass::w2;
    g.shared_root = att1;
    if (rep1 >= 0 && rep2 >= 0 &&
        (rep1 == rep2 || rep1 == att1 || rep2 == att1))
      g.diagnostic = "landing pattern not generic";
  } else if (any_hom) {
    g.w_class = WClass::none;
  } else {
    g.w_class = WClass::none;
    g.diagnostic = any_unresolved
                       ? (skipped ? "skipped traces without shared landing"
                                  : "unresolved traces")
                       : "no shared landing";
  }
  return g;
}

double center_period(const Params& p, const CubicRoots& roots, int j,
                     const Tolerances& tol) {
  const Complex zc = roots.z[j];
  const Complex lam = spectrum(p, roots).lambda[j];
  if (lam == Complex(0.0, 0.0) ||
      std::abs(lam.real()) > 1e-6 * std::abs(lam))
    throw std::invalid_argument("eigenvalue not on the imaginary axis");
  const double scale = root_scale(roots);
  const double r0 = 1e-3 * scale;
  const Complex z0 = zc + r0;
  const double t_pred = 2.0 * kPi / std::abs(lam);

  Trajectory traj =
      integrate(p, z0, +1, tol, true, 3.0 * t_pred, t_pred / 8.0);
  if (traj.event != TerminalEvent::time_exhausted || !traj.diagnostic.empty())
    throw std::runtime_error("orbit did not stay on a closed cycle");

  // Unwrap the section angle along the samples and bracket the first full
  // turn.
  double phi = 0.0;
  double prev = std::arg(z0 - zc);
  size_t kb = 0;
  double phi_b = 0.0;
  for (size_t k = 1; k < traj.samples.size(); ++k) {
    const double a = std::arg(traj.samples[k].u - zc);
    phi += wrap_pi(a - prev);
    prev = a;
    if (std::abs(phi) >= 2.0 * kPi) {
      kb = k;
      phi_b = phi;
      break;
    }
  }
  if (kb == 0) throw std::runtime_error("no full turn within 3 predicted periods");

  const double target = phi_b > 0.0 ? 2.0 * kPi : -2.0 * kPi;
  // Newton on phi(t) - target from the bracket start.
  const Sample& base = traj.samples[kb - 1];
  double phi_base = 0.0;
  {
    // phi at the bracket start, recomputed the same way.
    double acc = 0.0;
    double pr = std::arg(z0 - zc);
    for (size_t k = 1; k < kb; ++k) {
      const double a = std::arg(traj.samples[k].u - zc);
      acc += wrap_pi(a - pr);
      pr = a;
    }
    phi_base = acc;
  }
  const double dt = traj.samples[kb].t - base.t;
  double t_cross = base.t + 0.5 * dt;
  for (int it = 0; it < 12; ++it) {
    t_cross = std::clamp(t_cross, base.t + 1e-15, base.t + 2.0 * dt);
    Trajectory seg = integrate(p, base.u, +1, tol, false, t_cross - base.t);
    const Complex z = seg.u_end;
    const double phi_here =
        phi_base + wrap_pi(std::arg(z - zc) - std::arg(base.u - zc));
    const double g = phi_here - target;
    const double gdot = (eval_p(p, z) / (z - zc)).imag();
    if (gdot == 0.0) break;
    const double step = g / gdot;
    t_cross -= step;
    if (std::abs(step) < 1e-13 * std::max(1.0, t_cross)) break;
  }

  // Closure: first return must come back to the seed.
  Trajectory full = integrate(p, z0, +1, tol, false, t_cross);
  if (std::abs(full.u_end - z0) > 1e-2 * r0)
    throw std::runtime_error("orbit does not close; not a center");
  return t_cross;
}

namespace {

double point_segment_dist(Complex q, Complex a, Complex b) {
  const Complex ab = b - a;
  const double L2 = std::norm(ab);
  if (L2 == 0.0) return std::abs(q - a);
  double s = ((q - a) * std::conj(ab)).real() / L2;
  s = std::clamp(s, 0.0, 1.0);
  return std::abs(q - (a + s * ab));
}

struct Quad {
  const Params& p;
  int depth_limit = 48;
  bool failed = false;

  Complex f(Complex z) const { return 1.0 / eval_p(p, z); }

  Complex simpson(Complex a, Complex b, Complex fa, Complex fm, Complex fb) const {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  }

  Complex refine(Complex a, Complex b, Complex fa, Complex fm, Complex fb,
                 Complex whole, double eps_here, int depth) {
    const Complex m = 0.5 * (a + b);
    const Complex lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const Complex flm = f(lm), frm = f(rm);
    const Complex left = simpson(a, m, fa, flm, fm);
    const Complex right = simpson(m, b, fm, frm, fb);
    const Complex d = left + right - whole;
    if (std::abs(d) <= 15.0 * eps_here || depth >= depth_limit) {
      if (depth >= depth_limit && std::abs(d) > 15.0 * eps_here) failed = true;
      return left + right + d / 15.0;
    }
    return refine(a, m, fa, flm, fm, left, eps_here * 0.5, depth + 1) +
           refine(m, b, fm, frm, fb, right, eps_here * 0.5, depth + 1);
  }

  Complex segment(Complex a, Complex b, double eps_here) {
    const Complex m = 0.5 * (a + b);
    const Complex fa = f(a), fm = f(m), fb = f(b);
    return refine(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), eps_here, 0);
  }
};

}  // namespace

Complex path_time(const Params& p, const std::vector<Complex>& path,
                  const Tolerances& tol) {
  if (path.size() < 2) throw std::invalid_argument("path needs two points");
  const CubicRoots roots = solve_cubic(p, tol);
  const double guard = tol.landing * root_scale(roots);
  double total_len = 0.0;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    for (const Complex& r : roots.z)
      if (point_segment_dist(r, path[i], path[i + 1]) <= guard)
        throw std::invalid_argument("path passes too close to a root");
    total_len += std::abs(path[i + 1] - path[i]);
  }

  // First pass fixes the absolute target; a closed loop can sum to zero, so
  // the scale comes from the largest segment as well.
  Quad q{p};
  Complex rough = 0.0;
  double seg_mag = 0.0;
  std::vector<Complex> rough_seg(path.size() - 1);
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const Complex a = path[i], b = path[i + 1];
    const Complex fa = q.f(a), fm = q.f(0.5 * (a + b)), fb = q.f(b);
    rough_seg[i] = q.simpson(a, b, fa, fm, fb);
    rough += rough_seg[i];
    seg_mag = std::max(seg_mag, std::abs(rough_seg[i]));
  }
  const double target =
      tol.quad_rel * std::max({std::abs(rough), seg_mag, 1e-9});

  Complex total = 0.0;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const double len = std::abs(path[i + 1] - path[i]);
    if (len == 0.0) continue;
    total += q.segment(path[i], path[i + 1],
                       target * std::max(len / total_len, 1e-3));
  }
  if (q.failed) throw std::runtime_error("quadrature did not converge");
  return total;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,re_z,im_z,chart\n";
  char buf[160];
  for (const Sample& s : traj.samples) {
    const Complex z =
        s.chart == ChartFlag::finite ? s.u : Complex(1.0, 0.0) / s.u;
    std::snprintf(buf, sizeof buf, "%s,%s,%s,%d\n",
                  format_double(s.t, 12).c_str(),
                  format_double(z.real(), 12).c_str(),
                  format_double(z.imag(), 12).c_str(),
                  s.chart == ChartFlag::finite ? 0 : 1);
    out += buf;
  }
  return out;
}

}  // namespace cubicstrata
