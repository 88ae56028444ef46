#include "ds_invariants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cubicstrata {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Contour normalization: tau = +-2 pi i / lambda, signed into the upper
// half plane.  Im(2 pi i / lambda) has the sign of Re lambda, so the sign
// choice fails exactly on the wall where Re lambda = 0.
Complex tau_of(Complex lambda) {
  const Complex t = 2.0 * kPi * Complex(0.0, 1.0) / lambda;
  if (t.imag() == 0.0)
    throw std::runtime_error("tau sign undefined on the stratum boundary");
  return t.imag() > 0.0 ? t : -t;
}

Params lerp_params(const Params& a, const Params& b, double s) {
  return {a.e1 + (b.e1 - a.e1) * s, a.e0 + (b.e0 - a.e0) * s};
}

// Roots of the three tracks continued along the segment, matched node to
// node by the permutation of least total movement.
struct RootTracks {
  std::array<std::array<Complex, 3>, 65> z;  // node k = segment s = k/64
};

RootTracks march_roots(const Params& a, const Params& b,
                       const Tolerances& tol) {
  static constexpr int kPerm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  RootTracks t;
  t.z[0] = solve_cubic(a, tol).z;
  for (int k = 1; k <= 64; ++k) {
    const CubicRoots rk = solve_cubic(lerp_params(a, b, k / 64.0), tol);
    int bestp = 0;
    double bestd = 1e300;
    for (int pi = 0; pi < 6; ++pi) {
      double d = 0.0;
      for (int j = 0; j < 3; ++j)
        d += std::abs(rk.z[kPerm[pi][j]] - t.z[k - 1][j]);
      if (d < bestd) {
        bestd = d;
        bestp = pi;
      }
    }
    for (int j = 0; j < 3; ++j) t.z[k][j] = rk.z[kPerm[bestp][j]];
  }
  return t;
}

// Richardson ladder for values at offsets d0 * 2^-k, k = 0..K: the value
// extends smoothly in the offset, so the classic ratio-2 tableau applies.
Complex richardson(const std::vector<Complex>& f, double* last_correction) {
  std::vector<Complex> t = f;
  const int n = static_cast<int>(t.size());
  Complex prev = t[n - 1];
  for (int j = 1; j < n; ++j) {
    const double w = std::pow(2.0, j) - 1.0;
    prev = t[n - 1];
    for (int i = n - 1; i >= j; --i) t[i] += (t[i] - t[i - 1]) / w;
  }
  if (last_correction) *last_correction = std::abs(t[n - 1] - prev);
  return t[n - 1];
}

struct SideData {
  WallLimits lim;
  std::array<int, 2> deg_label{0, 0};
  WClass w = WClass::none;
};

// One-sided ladder: tau pairs at wall + sign*d_k*dir, keyed by the root
// continuing the wall's center root.
SideData compute_side(const Params& wall, Complex dir_e1, Complex dir_e0,
                      double sign, double d0, int K, Complex z_center,
                      const Tolerances& tol) {
  SideData side;
  std::vector<Complex> degs, nds;
  for (int k = 0; k <= K; ++k) {
    const double d = sign * d0 * std::pow(2.0, -k);
    const Params pk{wall.e1 + d * dir_e1, wall.e0 + d * dir_e0};
    const DsInvariant inv = tau_pair(pk, tol);
    const CubicRoots rk = solve_cubic(pk, tol);
    int deg_idx = 0;
    for (int j = 1; j < 3; ++j)
      if (std::abs(rk.z[j] - z_center) < std::abs(rk.z[deg_idx] - z_center))
        deg_idx = j;
    int slot;
    if (inv.enclosed_roots[0] == deg_idx)
      slot = 0;
    else if (inv.enclosed_roots[1] == deg_idx)
      slot = 1;
    else
      throw std::runtime_error(
          "crossing: wall center root not enclosed on the offset ladder");
    const WClass w =
        inv.quadrant_pairs[0][0] == 1 ? WClass::w2 : WClass::w1;
    if (k == 0) {
      side.deg_label = inv.quadrant_pairs[slot];
      side.w = w;
    } else if (side.deg_label != inv.quadrant_pairs[slot] || side.w != w) {
      throw std::runtime_error(
          "crossing: stratum changes along the offset ladder");
    }
    degs.push_back(slot == 0 ? inv.tau_a : inv.tau_b);
    nds.push_back(slot == 0 ? inv.tau_b : inv.tau_a);
  }
  double ca = 0.0, cb = 0.0;
  side.lim.deg = richardson(degs, &ca);
  side.lim.nd = richardson(nds, &cb);
  side.lim.extrap_residual = std::max(ca, cb);
  return side;
}

CrossingReport crossing_core(const Params& p_start, const Params& p_end,
                             const Tolerances& tol, bool require_v) {
  // Every axis crossing of a tracked eigenvalue is a wall candidate; only
  // the ones that classify as homoclinic count.  The crossing needs exactly
  // one of those.
  const RootTracks tracks = march_roots(p_start, p_end, tol);
  std::vector<std::pair<Params, ClassifyResult>> walls;
  for (int j = 0; j < 3; ++j) {
    for (int k = 1; k <= 64; ++k) {
      const Params pa = lerp_params(p_start, p_end, (k - 1) / 64.0);
      const Params pb = lerp_params(p_start, p_end, k / 64.0);
      const double fa = eval_dp(pa, tracks.z[k - 1][j]).real();
      const double fb = eval_dp(pb, tracks.z[k][j]).real();
      if ((fa < 0.0) == (fb < 0.0)) continue;
      const CubicRoots ra = solve_cubic(pa, tol);
      BoundaryTarget target;
      target.kind = BoundaryTarget::Kind::homoclinic_axis;
      target.root = 0;
      for (int i = 1; i < 3; ++i)
        if (std::abs(ra.z[i] - tracks.z[k - 1][j]) <
            std::abs(ra.z[target.root] - tracks.z[k - 1][j]))
          target.root = i;
      const Params w = locate_boundary(pa, pb, target, tol);
      ClassifyResult c = classify(w, tol);
      if (c.stratum.tag == StratumTag::homoclinic)
        walls.emplace_back(w, std::move(c));
    }
  }
  if (walls.empty())
    throw std::runtime_error("crossing: path does not cross a homoclinic wall");
  if (walls.size() > 1)
    throw std::runtime_error(
        "crossing: path crosses more than one homoclinic wall");

  CrossingReport rep;
  rep.wall = walls[0].first;
  rep.h_index = walls[0].second.stratum.index1;

  const CubicRoots rw = solve_cubic(rep.wall, tol);
  const Spectrum sw = spectrum(rep.wall, rw);
  rep.center_root = 0;
  for (int j = 1; j < 3; ++j)
    if (axis_distance(sw.lambda[j]) <
        axis_distance(sw.lambda[rep.center_root]))
      rep.center_root = j;
  rep.tau1 = homoclinic_period(rep.wall, rep.center_root, tol);

  // Segment coordinate of the wall, then ladders on both sides along the
  // segment direction.
  const Complex de1 = p_end.e1 - p_start.e1, de0 = p_end.e0 - p_start.e0;
  const double L = std::sqrt(std::norm(de1) + std::norm(de0));
  const Complex u1 = de1 / L, u0 = de0 / L;
  const double s_wall =
      ((rep.wall.e1 - p_start.e1) * std::conj(de1) +
       (rep.wall.e0 - p_start.e0) * std::conj(de0))
          .real() /
      (L * L);
  const double margin = std::min(s_wall, 1.0 - s_wall) * L;
  const double d0 = std::min(tol.d0, 0.45 * margin);
  const Complex z_c = rw.z[rep.center_root];

  SideData start_side =
      compute_side(rep.wall, u1, u0, -1.0, d0, tol.extrap_k, z_c, tol);
  SideData end_side =
      compute_side(rep.wall, u1, u0, 1.0, d0, tol.extrap_k, z_c, tol);
  if (start_side.w == end_side.w)
    throw std::runtime_error("crossing: both sides fall in the same stratum");
  if (require_v && start_side.w != WClass::w2)
    throw std::invalid_argument(
        "crossing_table: path must start on the W2 side (case V)");

  const SideData& w2side = start_side.w == WClass::w2 ? start_side : end_side;
  const SideData& w1side = start_side.w == WClass::w2 ? end_side : start_side;
  rep.side_w2 = w2side.lim;
  rep.side_w1 = w1side.lim;
  rep.deg_label_w2 = w2side.deg_label;
  rep.deg_label_w1 = w1side.deg_label;

  rep.residual_reversal = std::abs(rep.side_w1.deg + rep.side_w2.deg);
  rep.residual_shift =
      std::abs(rep.side_w1.nd - rep.side_w2.nd - rep.side_w2.deg);
  rep.residual_period = std::abs(std::abs(rep.side_w2.deg) - rep.tau1);

  const bool deg12 = rep.deg_label_w2 == std::array<int, 2>{1, 2};
  const bool plus = rep.side_w2.deg.real() > 0.0;
  rep.table_row = deg12 ? (plus ? 1 : 2) : (plus ? 4 : 3);

  rep.pass = rep.residual_reversal <= tol.crossing &&
             rep.residual_shift <= tol.crossing &&
             rep.residual_period <= tol.crossing &&
             rep.side_w2.extrap_residual <= tol.crossing &&
             rep.side_w1.extrap_residual <= tol.crossing;
  return rep;
}

}  // namespace

DsInvariant tau_pair(const Params& p, const ConnectingGraph& graph,
                     const Tolerances& tol) {
  if (graph.w_class == WClass::none)
    throw std::invalid_argument(
        "tau_pair: connecting graph has no wall side" +
        (graph.diagnostic.empty() ? std::string()
                                  : ": " + graph.diagnostic));
  const CubicRoots roots = solve_cubic(p, tol);
  if (roots.pattern != MultPattern::simple)
    throw std::invalid_argument("tau_pair: roots are not simple");
  const Spectrum spec = spectrum(p, roots);

  // tau_a belongs to the first quadrant pair of the stratum, and the pair
  // labels follow the landing separatrices: in W2 the loops are read off
  // s2 and s4, in W1 off s3 and s1.  One missing landing next to a
  // resolved partner is completed by elimination: the pattern puts one
  // separatrix at each non-shared root, and approach to an almost-center
  // root can be too slow to resolve.
  const bool w1 = graph.w_class == WClass::w1;
  const int sep_a = w1 ? 3 : 2, sep_b = w1 ? 1 : 4;
  int ra = graph.landing[sep_a - 1], rb = graph.landing[sep_b - 1];
  if (ra < 0 && rb >= 0) ra = 3 - graph.shared_root - rb;
  if (rb < 0 && ra >= 0) rb = 3 - graph.shared_root - ra;
  if (ra < 0 || rb < 0 || ra == rb || ra == graph.shared_root ||
      rb == graph.shared_root)
    throw std::runtime_error("tau_pair: landing pattern is not generic");

  DsInvariant inv;
  inv.tau_a = tau_of(spec.lambda[ra]);
  inv.tau_b = tau_of(spec.lambda[rb]);
  inv.enclosed_roots = {ra, rb};
  if (w1)
    inv.quadrant_pairs = {{{2, 3}, {1, 4}}};
  else
    inv.quadrant_pairs = {{{1, 2}, {3, 4}}};
  return inv;
}

DsInvariant tau_pair(const Params& p, const Tolerances& tol) {
  // Trace at the normalized chart point (integration tolerances are
  // calibrated at unit scale) and carry root indices back.
  const ChartPoint cp = normalize_chart(p, Chart::sphere);
  const CubicRoots ro = solve_cubic(p, tol);
  const CubicRoots rn = solve_cubic(cp.p, tol);
  std::array<int, 3> o_of_n{0, 1, 2};
  for (int j = 0; j < 3; ++j) {
    int best = 0;
    for (int k = 1; k < 3; ++k)
      if (std::abs(rn.z[j] - cp.delta * ro.z[k]) <
          std::abs(rn.z[j] - cp.delta * ro.z[best]))
        best = k;
    o_of_n[j] = best;
  }
  TraceOptions opts;
  opts.record = true;
  auto traces = trace_separatrices(cp.p, tol, opts);
  for (auto& tr : traces) {
    if (tr.root >= 0) tr.root = o_of_n[tr.root];
    if (tr.enclosed_root >= 0) tr.enclosed_root = o_of_n[tr.enclosed_root];
  }
  const ConnectingGraph graph = build_connecting_graph(traces);
  const DsInvariant inv = tau_pair(p, graph, tol);

  // Winding oracle: around each enclosed root a circle below 0.3 times the
  // root separation winds once about it and zero about the others.  The
  // circle must clear every separatrix except the one landing at the root
  // itself, which any enclosing loop crosses.
  for (int slot = 0; slot < 2; ++slot) {
    const int r = inv.enclosed_roots[slot];
    int n_of_o = 0;
    for (int j = 0; j < 3; ++j)
      if (o_of_n[j] == r) n_of_o = j;
    const Complex zn = rn.z[n_of_o];
    double radius = 1e300;
    for (int j = 0; j < 3; ++j)
      if (j != n_of_o) radius = std::min(radius, 0.3 * std::abs(rn.z[j] - zn));
    for (const auto& tr : traces) {
      if (tr.outcome == SepOutcome::lands && tr.root == r) continue;
      // an unresolved trace that ended in this root's immediate vicinity is
      // a slow approach to it and crosses the loop like a landing does
      if (!tr.traj.samples.empty()) {
        const Sample& last = tr.traj.samples.back();
        if (last.chart == ChartFlag::finite &&
            std::abs(last.u - zn) < radius)
          continue;
      }
      for (const auto& s : tr.traj.samples) {
        if (s.chart != ChartFlag::finite) continue;
        radius = std::min(radius, 0.9 * std::abs(s.u - zn));
      }
    }
    if (radius < 1e-3 * root_scale(rn))
      throw std::runtime_error(
          "tau_pair: no separatrix-avoiding loop around root " +
          std::to_string(r));
  }
  return inv;
}

std::string ds_invariant_json(const DsInvariant& inv) {
  std::string s = "{\"tau_a\":\"" + format_complex(inv.tau_a) +
                  "\",\"tau_b\":\"" + format_complex(inv.tau_b) + "\"";
  s += ",\"quadrant_pairs\":[[" + std::to_string(inv.quadrant_pairs[0][0]) +
       "," + std::to_string(inv.quadrant_pairs[0][1]) + "],[" +
       std::to_string(inv.quadrant_pairs[1][0]) + "," +
       std::to_string(inv.quadrant_pairs[1][1]) + "]]";
  s += ",\"enclosed_roots\":[" + std::to_string(inv.enclosed_roots[0]) + "," +
       std::to_string(inv.enclosed_roots[1]) + "]}";
  return s;
}

double homoclinic_period(const Params& p, int root_j, const Tolerances& tol) {
  if (root_j < 0 || root_j > 2)
    throw std::invalid_argument("homoclinic_period: root index out of range");
  const CubicRoots roots = solve_cubic(p, tol);
  const Spectrum spec = spectrum(p, roots);
  const Complex lambda = spec.lambda[root_j];
  if (lambda == 0.0)
    throw std::invalid_argument("homoclinic_period: multiple root");
  if (axis_distance(lambda) > tol.axis)
    throw std::invalid_argument(
        "homoclinic_period: eigenvalue is off the imaginary axis");
  const double tau1 = 2.0 * kPi / std::abs(lambda);
  const double measured = center_period(p, roots, root_j, tol);
  if (std::abs(measured - tau1) > 1e-6 * tau1)
    throw std::runtime_error(
        "homoclinic_period: return time " + format_double(measured) +
        " disagrees with 2 pi / |lambda| = " + format_double(tau1));
  return tau1;
}

CrossingReport crossing_table(const Params& p_start, const Params& p_end,
                              const Tolerances& tol) {
  return crossing_core(p_start, p_end, tol, true);
}

CrossingReport verify_limits(const Params& p_start, const Params& p_end,
                             const Tolerances& tol) {
  return crossing_core(p_start, p_end, tol, false);
}

std::string crossing_report_json(const CrossingReport& r) {
  const auto side = [](const WallLimits& w) {
    return "{\"deg\":\"" + format_complex(w.deg) + "\",\"nd\":\"" +
           format_complex(w.nd) +
           "\",\"extrap_residual\":" + format_double(w.extrap_residual) + "}";
  };
  std::string s = "{\"wall\":{\"e1\":\"" + format_complex(r.wall.e1) +
                  "\",\"e0\":\"" + format_complex(r.wall.e0) + "\"}";
  s += ",\"h_index\":" + std::to_string(r.h_index);
  s += ",\"center_root\":" + std::to_string(r.center_root);
  s += ",\"tau1\":" + format_double(r.tau1);
  s += ",\"side_w2\":" + side(r.side_w2);
  s += ",\"side_w1\":" + side(r.side_w1);
  s += ",\"deg_label_w2\":[" + std::to_string(r.deg_label_w2[0]) + "," +
       std::to_string(r.deg_label_w2[1]) + "]";
  s += ",\"deg_label_w1\":[" + std::to_string(r.deg_label_w1[0]) + "," +
       std::to_string(r.deg_label_w1[1]) + "]";
  s += ",\"table_row\":" + std::to_string(r.table_row);
  s += ",\"residual_period\":" + format_double(r.residual_period);
  s += ",\"residual_reversal\":" + format_double(r.residual_reversal);
  s += ",\"residual_shift\":" + format_double(r.residual_shift);
  s += ",\"pass\":";
  s += r.pass ? "true" : "false";
  s += "}";
  return s;
}

}  // namespace cubicstrata
