#include "classify.hpp"

#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cubicstrata {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double wrap_pi(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

// Adjacent pair {a, a+1 cyclic} bounds quadrant a+1; {4, 1} wraps to 1.
int pair_quadrant(int a, int b) {
  const int lo = std::min(a, b), hi = std::max(a, b);
  if (lo == 1 && hi == 4) return 1;
  return hi;
}

// The four separatrices split into two disjoint adjacent pairs; given one,
// the other is determined.
std::array<int, 2> complement_pair(const std::array<int, 2>& e) {
  std::array<int, 2> out{};
  int k = 0;
  for (int i = 1; i <= 4; ++i)
    if (i != e[0] && i != e[1]) out[k++] = i;
  return out;
}

bool has_pair(const Certificate& c) {
  return c.evidence_pair[0] >= 1 && c.evidence_pair[1] >= 1;
}

double axis_threshold(const Certificate& c) {
  return c.mode == ClassifyMode::grid ? c.tol.band : c.tol.axis;
}

const char* pattern_name(MultPattern m) {
  switch (m) {
    case MultPattern::simple: return "simple";
    case MultPattern::double_root: return "double";
    case MultPattern::triple: return "triple";
  }
  return "simple";
}

const char* w_class_name(WClass w) {
  switch (w) {
    case WClass::none: return "none";
    case WClass::w1: return "w1";
    case WClass::w2: return "w2";
  }
  return "none";
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    if (ch == '"' || ch == '\\') {
      out += '\\';
      out += ch;
    } else if (static_cast<unsigned char>(ch) < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04x", ch);
      out += buf;
    } else {
      out += ch;
    }
  }
  return out;
}

std::string join_diagnostics(const std::array<SeparatrixTrace, 4>& traces) {
  std::string out;
  for (const auto& tr : traces) {
    if (tr.diagnostic.empty() || tr.diagnostic == "skipped") continue;
    if (!out.empty()) out += "; ";
    out += "s" + std::to_string(tr.index) + ": " + tr.diagnostic;
  }
  return out;
}

// Near-wall sweep evidence for banded classification: the returned
// excursion with the closest pole approach, matched to the nearest
// opposite-kind seed angle, names the separatrix pair of the wall.
bool excursion_pair(const Params& p, const Tolerances& tol,
                    const std::array<SeparatrixTrace, 4>& traces,
                    std::array<int, 2>& pair_out) {
  int owner = 0;
  double best_w = 0.0;
  double theta = 0.0;
  for (const auto& tr : traces) {
    for (const auto& ex : tr.traj.excursions) {
      if (!ex.returned) continue;
      if (owner == 0 || ex.min_w < best_w) {
        owner = tr.index;
        best_w = ex.min_w;
        theta = ex.theta_out;
      }
    }
  }
  if (owner == 0) return false;
  const double R = chart_radius(p, tol);
  const bool owner_attracting = owner % 2 == 1;
  int matched = 0;
  double best = 0.0;
  for (int k = owner_attracting ? 2 : 1; k <= 4; k += 2) {
    const double d = std::abs(wrap_pi(theta - seed_angle(p, k, R)));
    if (matched == 0 || d < best) {
      matched = k;
      best = d;
    }
  }
  pair_out = {std::min(owner, matched), std::max(owner, matched)};
  return true;
}

// The interior side of a wall band leaves no sweep evidence: the would-be
// loop separatrix spirals about the almost-center root without reaching
// the chart radius.  Project the point onto the wall (Newton on Re lambda
// in e0, with d lambda / d e0 = -6 z / lambda) and read the pair there.
bool wall_projection_pair(const Params& p, const Tolerances& tol, Complex z0,
                          std::array<int, 2>& pair_out) {
  Params q = p;
  Complex z = z0;
  bool on_wall = false;
  for (int it = 0; it < 4; ++it) {
    const CubicRoots r = solve_cubic(q, tol);
    int j = 0;
    for (int k = 1; k < 3; ++k)
      if (std::abs(r.z[k] - z) < std::abs(r.z[j] - z)) j = k;
    z = r.z[j];
    const Complex lambda = eval_dp(q, z);
    if (std::abs(lambda.real()) <= 1e-12 * std::abs(lambda)) {
      on_wall = true;
      break;
    }
    const Complex g = -6.0 * z / lambda;
    q.e0 -= lambda.real() * std::conj(g) / std::norm(g);
  }
  if (!on_wall) return false;
  const auto traces = trace_separatrices(q, tol);
  for (const auto& tr : traces)
    if (tr.outcome == SepOutcome::homoclinic && tr.index < tr.partner) {
      pair_out = {tr.index, tr.partner};
      return true;
    }
  return excursion_pair(q, tol, traces, pair_out);
}

Params lerp_params(const Params& a, const Params& b, double s) {
  return {a.e1 + (b.e1 - a.e1) * s, a.e0 + (b.e0 - a.e0) * s};
}

// Root position continued from solve_cubic(a).z[root0] along the segment,
// by nearest-root marching.  The march is rebuilt from s=0 on every call so
// the continuation does not depend on the query order.
Complex tracked_root(const Params& a, const Params& b, int root0, double s,
                     const Tolerances& tol) {
  Complex z = solve_cubic(a, tol).z[root0];
  const int steps = 256;
  for (int k = 1; k <= steps; ++k) {
    const CubicRoots rk = solve_cubic(lerp_params(a, b, s * k / steps), tol);
    int best = 0;
    double d1 = 1e300, d2 = 1e300;
    for (int j = 0; j < 3; ++j) {
      const double d = std::abs(rk.z[j] - z);
      if (d < d1) {
        d2 = d1;
        d1 = d;
        best = j;
      } else if (d < d2) {
        d2 = d;
      }
    }
    if (d1 > 0.5 * d2)
      throw std::runtime_error(
          "locate_boundary: root tracking ambiguous near a collision");
    z = rk.z[best];
  }
  return z;
}

}  // namespace

std::string tag_code(StratumTag tag) {
  switch (tag) {
    case StratumTag::epsilon_zero: return "E0";
    case StratumTag::generic_w1: return "W1";
    case StratumTag::generic_w2: return "W2";
    case StratumTag::homoclinic: return "H";
    case StratumTag::figure_eight: return "F8";
    case StratumTag::parabolic_regular: return "PR";
    case StratumTag::parabolic_center: return "PC";
    case StratumTag::unresolved: return "U";
  }
  return "U";
}

std::string stratum_label(const Stratum& s) {
  std::string out = tag_code(s.tag);
  if (s.index1 >= 0) {
    out += "(" + std::to_string(s.index1);
    if (s.index2 >= 0) out += "," + std::to_string(s.index2);
    out += ")";
  }
  return out;
}

std::string certificate_json(const Certificate& c) {
  std::string s = "{\"params\":{\"e1\":\"" + format_complex(c.p.e1, 17) +
                  "\",\"e0\":\"" + format_complex(c.p.e0, 17) + "\"}";
  s += ",\"delta\":\"" + format_complex(c.delta, 17) + "\"";
  s += ",\"axis_distances\":[";
  for (int j = 0; j < 3; ++j) {
    if (j) s += ',';
    s += format_double(c.axis_distances[j], 17);
  }
  s += "],\"pattern\":\"";
  s += pattern_name(c.pattern);
  s += "\",\"tag\":\"" + tag_code(c.stratum.tag) + "\"";
  s += ",\"indices\":[" + std::to_string(c.stratum.index1) + "," +
       std::to_string(c.stratum.index2) + "]";
  s += ",\"w_class\":\"";
  s += w_class_name(c.w_class);
  s += "\",\"evidence_pair\":[" + std::to_string(c.evidence_pair[0]) + "," +
       std::to_string(c.evidence_pair[1]) + "]";
  s += ",\"mode\":\"";
  s += c.mode == ClassifyMode::grid ? "grid" : "point";
  s += "\",\"diagnostic\":\"" + json_escape(c.diagnostic) + "\"";
  s += ",\"tolerances\":" + tolerances_json(c.tol) + "}";
  return s;
}

std::string certificate_digest(const Certificate& c) {
  return hex64(fnv1a64(certificate_json(c)));
}

Stratum replay(const Certificate& c) {
  Stratum s;
  if (std::abs(c.p.e1) + std::abs(c.p.e0) <= c.tol.zero_norm) {
    s.tag = StratumTag::epsilon_zero;
    return s;
  }
  if (c.pattern == MultPattern::triple) return s;
  const double th = axis_threshold(c);
  if (c.pattern == MultPattern::double_root) {
    double ad = -1.0;
    for (double a : c.axis_distances)
      if (a >= 0.0) ad = a;
    if (ad < 0.0 || !has_pair(c)) return s;
    if (ad <= th) {
      s.tag = StratumTag::parabolic_center;
      s.index1 = pair_quadrant(c.evidence_pair[0], c.evidence_pair[1]);
    } else {
      s.tag = StratumTag::parabolic_regular;
      s.index1 = c.evidence_pair[0];
      s.index2 = c.evidence_pair[1];
    }
    return s;
  }
  int count = 0;
  for (double a : c.axis_distances)
    if (a >= 0.0 && a <= th) ++count;
  switch (count) {
    case 0:
      if (c.w_class == WClass::w1) s.tag = StratumTag::generic_w1;
      if (c.w_class == WClass::w2) s.tag = StratumTag::generic_w2;
      break;
    case 1:
      if (has_pair(c)) {
        s.tag = StratumTag::homoclinic;
        s.index1 = pair_quadrant(c.evidence_pair[0], c.evidence_pair[1]);
      }
      break;
    case 3:
      if (has_pair(c)) {
        const int q1 = pair_quadrant(c.evidence_pair[0], c.evidence_pair[1]);
        const auto other = complement_pair(c.evidence_pair);
        const int q2 = pair_quadrant(other[0], other[1]);
        s.tag = StratumTag::figure_eight;
        s.index1 = std::min(q1, q2);
        s.index2 = std::max(q1, q2);
      }
      break;
    default:
      // Exactly two on-axis eigenvalues would contradict the residue
      // identity sum(1/lambda_j) = 0; left unresolved.
      break;
  }
  return s;
}

ClassifyResult classify(const Params& p, const Tolerances& tol,
                        ClassifyMode mode) {
  if (!std::isfinite(p.e1.real()) || !std::isfinite(p.e1.imag()) ||
      !std::isfinite(p.e0.real()) || !std::isfinite(p.e0.imag()))
    throw std::invalid_argument("classify: parameters must be finite");

  ClassifyResult res;
  Certificate& c = res.cert;
  c.p = p;
  c.mode = mode;
  c.tol = tol;
  c.delta = discriminant(p);

  const CubicRoots roots = solve_cubic(p, tol);
  c.pattern = roots.pattern;

  if (std::abs(p.e1) + std::abs(p.e0) <= tol.zero_norm) {
    c.stratum = res.stratum = replay(c);
    return res;
  }

  const Spectrum spec = spectrum(p, roots);
  for (int j = 0; j < 3; ++j) {
    const bool multiple =
        c.pattern == MultPattern::triple ||
        (c.pattern == MultPattern::double_root &&
         (j == roots.dup || j == roots.dup + 1));
    if (!multiple) c.axis_distances[j] = axis_distance(spec.lambda[j]);
  }

  Tolerances run_tol = tol;
  if (mode == ClassifyMode::grid) {
    run_tol.rel = tol.grid_rel;
    run_tol.abs = tol.grid_abs;
    run_tol.landing = tol.grid_landing;
  }
  const double th = axis_threshold(c);

  // All tracing happens at the normalized chart point: the integrator
  // tolerances are calibrated at unit scale, and trajectory times grow as
  // delta^-2 on small parameters.  Separatrix indices are scale invariant;
  // root indices are translated back through nearest-root matching.
  const ChartPoint cp = normalize_chart(p, Chart::sphere);
  std::array<int, 3> o_of_n{0, 1, 2};
  {
    const CubicRoots rn = solve_cubic(cp.p, tol);
    for (int j = 0; j < 3; ++j) {
      int best = 0;
      double bd = 1e300;
      for (int k = 0; k < 3; ++k) {
        const double d = std::abs(rn.z[j] - cp.delta * roots.z[k]);
        if (d < bd) {
          bd = d;
          best = k;
        }
      }
      o_of_n[j] = best;
    }
  }
  const auto traced = [&](const TraceOptions& opts = {}) {
    auto traces = trace_separatrices(cp.p, run_tol, opts);
    for (auto& tr : traces) {
      if (tr.root >= 0) tr.root = o_of_n[tr.root];
      if (tr.enclosed_root >= 0) tr.enclosed_root = o_of_n[tr.enclosed_root];
    }
    return traces;
  };

  if (c.pattern == MultPattern::triple) {
    c.diagnostic = "triple root beyond the zero threshold";
  } else if (c.pattern == MultPattern::double_root) {
    const int simple_idx = roots.dup == 0 ? 2 : 0;
    const double ad = c.axis_distances[simple_idx];
    const auto traces = traced();
    if (ad <= th) {
      // Center case: two separatrices close up into the loop around the
      // simple root, the other two land at the double root.
      int a = 0;
      for (const auto& tr : traces)
        if (tr.outcome == SepOutcome::homoclinic && tr.index < tr.partner)
          a = tr.index;
      if (a > 0) {
        const auto& tr = traces[a - 1];
        if (tr.enclosed_root >= 0 && tr.enclosed_root != simple_idx) {
          c.diagnostic = "loop does not enclose the center root";
        } else {
          c.evidence_pair = {a, tr.partner};
        }
      } else if (mode == ClassifyMode::grid &&
                 excursion_pair(cp.p, run_tol, traces, c.evidence_pair)) {
        // accepted sweep evidence
      } else {
        c.diagnostic = "persistent loop not found";
        const std::string d = join_diagnostics(traces);
        if (!d.empty()) c.diagnostic += "; " + d;
      }
    } else {
      // Petal case: three separatrices land at the double root; the middle
      // one of the three, cyclically, starts the adjacent pair.
      int missing = 0, landed_at_dup = 0;
      for (const auto& tr : traces) {
        const bool at_dup = tr.outcome == SepOutcome::lands &&
                            (tr.root == roots.dup || tr.root == roots.dup + 1);
        if (at_dup)
          ++landed_at_dup;
        else
          missing = tr.index;
      }
      if (landed_at_dup == 3) {
        const int m = (missing + 1) % 4 + 1;
        c.evidence_pair = {m, m % 4 + 1};
      } else {
        c.diagnostic = "petal landing pattern incomplete";
        const std::string d = join_diagnostics(traces);
        if (!d.empty()) c.diagnostic += "; " + d;
      }
    }
  } else {
    int count = 0, on_axis_root = -1;
    for (int j = 0; j < 3; ++j) {
      if (c.axis_distances[j] <= th) {
        ++count;
        on_axis_root = j;
      }
    }
    if (count == 0) {
      TraceOptions opts;
      opts.early_w1 = mode == ClassifyMode::grid;
      const auto traces = traced(opts);
      const ConnectingGraph g = build_connecting_graph(traces);
      c.w_class = g.w_class;
      if (g.w_class == WClass::none) {
        c.diagnostic = g.diagnostic;
        const std::string d = join_diagnostics(traces);
        if (!d.empty())
          c.diagnostic += (c.diagnostic.empty() ? "" : "; ") + d;
      }
    } else if (count == 2) {
      c.diagnostic =
          "two eigenvalues within the axis tolerance contradict the residue "
          "identity";
    } else {
      const auto traces = traced();
      std::array<int, 2> pairs[2];
      int npairs = 0;
      for (const auto& tr : traces)
        if (tr.outcome == SepOutcome::homoclinic && tr.index < tr.partner &&
            npairs < 2)
          pairs[npairs++] = {tr.index, tr.partner};
      if (count == 1) {
        if (npairs == 1) {
          const auto& tr = traces[pairs[0][0] - 1];
          if (tr.enclosed_root >= 0 && tr.enclosed_root != on_axis_root) {
            c.diagnostic = "loop does not enclose the on-axis root";
          } else {
            c.evidence_pair = pairs[0];
          }
        } else if (npairs == 0 && mode == ClassifyMode::grid &&
                   (excursion_pair(cp.p, run_tol, traces, c.evidence_pair) ||
                    wall_projection_pair(cp.p, run_tol,
                                         cp.delta * roots.z[on_axis_root],
                                         c.evidence_pair))) {
          // accepted sweep or projected-wall evidence
        } else {
          c.diagnostic = npairs == 0 ? "no homoclinic pair found"
                                     : "extra homoclinic pair";
          const std::string d = join_diagnostics(traces);
          if (!d.empty()) c.diagnostic += "; " + d;
        }
      } else {  // count == 3
        std::array<int, 2> ev{0, 0};
        if (npairs == 2) {
          ev = pairs[0][0] == 1 || pairs[0][1] == 1 ? pairs[0] : pairs[1];
        } else if (npairs == 1 && mode == ClassifyMode::grid) {
          ev = pairs[0];
        } else if (npairs == 0 && mode == ClassifyMode::grid) {
          excursion_pair(cp.p, run_tol, traces, ev);
        }
        if (ev[0] >= 1) {
          // normalize to the pair containing separatrix 1
          c.evidence_pair =
              ev[0] == 1 || ev[1] == 1 ? ev : complement_pair(ev);
        } else {
          c.diagnostic = "figure eight loops not traced";
          const std::string d = join_diagnostics(traces);
          if (!d.empty()) c.diagnostic += "; " + d;
        }
      }
    }
  }

  c.stratum = res.stratum = replay(c);
  return res;
}

Params locate_boundary(const Params& p_start, const Params& p_end,
                       const BoundaryTarget& target, const Tolerances& tol) {
  if (target.kind == BoundaryTarget::Kind::homoclinic_axis &&
      (target.root < 0 || target.root > 2))
    throw std::invalid_argument("locate_boundary: root index out of range");

  const Complex delta0 = discriminant(p_start);
  if (target.kind == BoundaryTarget::Kind::delta_zero &&
      std::abs(delta0) == 0.0)
    return p_start;

  const auto f = [&](double s) -> double {
    const Params ps = lerp_params(p_start, p_end, s);
    if (target.kind == BoundaryTarget::Kind::homoclinic_axis) {
      const Complex z = tracked_root(p_start, p_end, target.root, s, tol);
      return (eval_dp(ps, z)).real();
    }
    // |Delta| signed by projection onto the starting value: the sign flips
    // where Delta crosses the hyperplane orthogonal to it through 0.
    const Complex d = discriminant(ps);
    return (d * std::conj(delta0)).real() / std::abs(delta0);
  };

  // Coarse scan for the first bracket, then Illinois refinement.
  const int scan = 64;
  double sa = 0.0, fa = f(0.0);
  if (std::abs(fa) <= tol.locate) return p_start;
  double sb = sa, fb = fa;
  bool bracketed = false;
  for (int k = 1; k <= scan; ++k) {
    sb = static_cast<double>(k) / scan;
    fb = f(sb);
    if (std::abs(fb) <= tol.locate) return lerp_params(p_start, p_end, sb);
    if ((fa < 0.0) != (fb < 0.0)) {
      bracketed = true;
      break;
    }
    sa = sb;
    fa = fb;
  }
  if (!bracketed)
    throw std::runtime_error(
        "locate_boundary: indicator does not change sign along the segment");

  for (int it = 0; it < 200; ++it) {
    double sc = sb - fb * (sb - sa) / (fb - fa);
    if (!std::isfinite(sc) || sc <= std::min(sa, sb) ||
        sc >= std::max(sa, sb))
      sc = 0.5 * (sa + sb);
    const double fc = f(sc);
    if (std::abs(fc) <= tol.locate || std::abs(sb - sa) < 1e-15)
      return lerp_params(p_start, p_end, sc);
    if ((fc < 0.0) != (fb < 0.0)) {
      sa = sb;
      fa = fb;
    } else {
      fa *= 0.5;  // Illinois step keeps the stalled endpoint moving
    }
    sb = sc;
    fb = fc;
  }
  throw std::runtime_error("locate_boundary: refinement did not converge");
}

}  // namespace cubicstrata
