// Real-time flow of z' = P(z) on the sphere: adaptive integration in the
// finite chart and in the chart w = 1/z at infinity, separatrix tracing
// with landing and homoclinic detection, the connecting graph, center
// periods, and complex-time quadrature along paths.
#pragma once

#include "cubic.hpp"

#include <string>
#include <vector>

namespace cubicstrata {

enum class ChartFlag { finite, infinity_chart };

struct Sample {
  double t = 0.0;   // flow time (negative along backward integration)
  Complex u;        // z in the finite chart, w = 1/z at infinity
  ChartFlag chart = ChartFlag::finite;
};

enum class TerminalEvent {
  landed,
  reached_infinity,
  trapped,  // closed orbit region: sustained winding without contraction
  time_exhausted,
  step_failure
};

// One stay beyond |z| = R.  theta values are arg z; min_w is the closest
// approach to the pole.  A near-homoclinic sweep shows up as a returned
// excursion with small min_w, and its geometry names the quadrant.
struct Excursion {
  double theta_out = 0.0;     // arg z at the outward |z| = R crossing
  double min_w = 0.0;
  double theta_at_min = 0.0;  // arg z at the closest approach
  bool returned = false;
};

struct Trajectory {
  std::vector<Sample> samples;  // empty unless recording was requested
  TerminalEvent event = TerminalEvent::time_exhausted;
  int root = -1;                // landed: index into CubicRoots::z
  double direction = 0.0;       // reached_infinity: arg z at the last exit
  std::vector<Excursion> excursions;
  std::array<double, 3> winding{};  // accumulated arg(z - z_k) change
  double t_end = 0.0;
  Complex u_end;
  ChartFlag chart_end = ChartFlag::finite;
  std::string diagnostic;
};

// R = chart_factor * max(1, |e1|^(1/2), |e0|^(1/3)); beyond R the z^3 term
// dominates by about two orders.
double chart_radius(const Params& p, const Tolerances& tol = {});

// Asymptotic time to the pole from z, |z| >= R; truncation error O(z^-9).
Complex pole_time_series(const Params& p, Complex z);

// Separatrix direction near index*pi/2 - pi/2 at radius R: Newton on
// Im t(R e^{i theta}) = 0 with the exact derivative Im(-iz/P(z)).
double seed_angle(const Params& p, int index, double R);

// Quadrant of a direction: sector j covers arg z in ((j-2) pi/2, (j-1) pi/2).
int sector_of(double theta);

// time_dir +1 or -1.  t_limit > 0 caps |t| at exactly that value (event
// time_exhausted with empty diagnostic); h_max > 0 caps the step size.
//
// absorb: exit directions treated as reaching the pole.  An outward
// |z| = R crossing whose angle lies within tol.match of an entry ends the
// run with reached_infinity.  Integration error spreads a homoclinic
// trajectory across the pole by about sqrt(2 |Im t|) in the w chart, far
// above any fixed |w| threshold, while its exit angle at R still agrees
// with the partner separatrix seed to ~1e-8 rad; matching at the crossing
// is the reliable detector.
Trajectory integrate(const Params& p, Complex z0, int time_dir,
                     const Tolerances& tol = {}, bool record = false,
                     double t_limit = 0.0, double h_max = 0.0,
                     const std::vector<double>* absorb = nullptr);

enum class SepKind { attracting, repelling };
enum class SepOutcome { lands, homoclinic, unresolved };

struct SeparatrixTrace {
  int index = 0;  // 1..4; odd attracting (base angles 0, pi), even repelling
  SepKind kind = SepKind::attracting;
  double theta_seed = 0.0;
  SepOutcome outcome = SepOutcome::unresolved;
  int root = -1;          // lands
  int partner = 0;        // homoclinic
  int enclosed_root = -1; // homoclinic
  int quadrant = 0;       // homoclinic
  std::string diagnostic;
  Trajectory traj;
};

struct TraceOptions {
  bool record = false;
  // Trace the repelling pair first and stop if it already shows the shared
  // landing; the attracting traces come back unresolved("skipped").
  bool early_w1 = false;
};

std::array<SeparatrixTrace, 4> trace_separatrices(const Params& p,
                                                  const Tolerances& tol = {},
                                                  const TraceOptions& opts = {});

enum class WClass { none, w1, w2 };

struct ConnectingGraph {
  std::array<int, 4> landing{-1, -1, -1, -1};  // separatrix s -> root, -1 if not landing
  int shared_root = -1;
  WClass w_class = WClass::none;
  std::string diagnostic;  // set when the landing pattern is inconsistent
};

ConnectingGraph build_connecting_graph(const std::array<SeparatrixTrace, 4>& traces);

// First-return time of the closed orbit seeded at z_j + r, r = 1e-3 * scale.
// Throws when the orbit does not close (not a center).
double center_period(const Params& p, const CubicRoots& roots, int j,
                     const Tolerances& tol = {});

// Complex time along a polyline: integral of d zeta / P(zeta).  Rejects
// paths passing within 1e-6 * scale of a root.
Complex path_time(const Params& p, const std::vector<Complex>& path,
                  const Tolerances& tol = {});

std::string trajectory_csv(const Trajectory& traj);

}  // namespace cubicstrata
