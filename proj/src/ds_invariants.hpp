// Analytic invariants of the generic strata: the pair (tau_a, tau_b) in H^2,
// the loop period at homoclinic strata, and the one-sided limit relations
// checked across a homoclinic wall.
#pragma once

#include "classify.hpp"

namespace cubicstrata {

struct DsInvariant {
  Complex tau_a;  // Im > 0
  Complex tau_b;  // Im > 0
  // Adjacent-quadrant labels of the two loops: ((1,2),(3,4)) in W2,
  // ((2,3),(1,4)) in W1; tau_a belongs to the first pair.
  std::array<std::array<int, 2>, 2> quadrant_pairs{};
  std::array<int, 2> enclosed_roots{-1, -1};  // aligned with (tau_a, tau_b)
};

DsInvariant tau_pair(const Params& p, const ConnectingGraph& graph,
                     const Tolerances& tol = {});
// Convenience: trace, build the graph, then delegate.  Throws outside W1/W2.
DsInvariant tau_pair(const Params& p, const Tolerances& tol = {});

std::string ds_invariant_json(const DsInvariant& inv);

// 2 pi / |lambda_j|, cross-checked against the measured return time.
double homoclinic_period(const Params& p, int root_j, const Tolerances& tol = {});

// One-sided tau limits onto a homoclinic wall, keyed by root identity:
// "deg" is the tau of the root whose eigenvalue reaches the axis, "nd" the
// other.  Limits are Richardson extrapolations over offsets d0 * 2^-k.
struct WallLimits {
  Complex deg;
  Complex nd;
  double extrap_residual = 0.0;  // last extrapolation correction, convergence gauge
};

struct CrossingReport {
  Params wall;          // located point on the H surface
  int h_index = 0;      // quadrant from the tracer at the wall
  int center_root = -1; // root whose eigenvalue is on the axis at the wall
  double tau1 = 0.0;    // loop period at the wall
  WallLimits side_w2;   // side (V): labels (tau_12, tau_34)
  WallLimits side_w1;   // sides (I)-(IV): labels (tau'_14, tau'_23)
  // Label assignment of deg/nd on each side, as quadrant pairs.
  std::array<int, 2> deg_label_w2{0, 0};
  std::array<int, 2> deg_label_w1{0, 0};
  int table_row = 0;    // 1..4 for rows (I)..(IV)
  double residual_period = 0.0;   // | |lim deg| - tau1 | and sign structure
  double residual_reversal = 0.0; // | deg_w1 + deg_w2 |
  double residual_shift = 0.0;    // | nd_w1 - nd_w2 - deg_w2 |
  bool pass = false;
};

// The path p_start -> p_end must cross exactly one homoclinic wall, with
// W2 on the start side and W1 on the end side (case (V) crossing).
CrossingReport crossing_table(const Params& p_start, const Params& p_end,
                              const Tolerances& tol = {});

// Same machinery without the table-row bookkeeping; accepts either
// orientation of the crossing.
CrossingReport verify_limits(const Params& p_start, const Params& p_end,
                             const Tolerances& tol = {});

std::string crossing_report_json(const CrossingReport& r);

}  // namespace cubicstrata
