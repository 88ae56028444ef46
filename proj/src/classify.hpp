// Stratum decision procedure: which piece of the bifurcation diagram a
// parameter point belongs to, with a replayable certificate.
#pragma once

#include "flow.hpp"

#include <string>

namespace cubicstrata {

enum class StratumTag {
  epsilon_zero,
  generic_w1,
  generic_w2,
  homoclinic,         // index1 = quadrant 1..4
  figure_eight,       // (index1, index2) = (1,3) or (2,4)
  parabolic_regular,  // (index1, index2) adjacent pair, cyclic
  parabolic_center,   // index1 = quadrant of the persistent loop
  unresolved
};

struct Stratum {
  StratumTag tag = StratumTag::unresolved;
  int index1 = -1;
  int index2 = -1;
};

// Short form used in grid CSV and the CLI: E0 W1 W2 H F8 PR PC U.
std::string tag_code(StratumTag tag);
std::string stratum_label(const Stratum& s);  // e.g. "H(2)", "F8(1,3)"

// Banded mode widens the on-axis test from tol.axis to tol.band, accepts
// near-miss sweep evidence for the codimension-1 indices, and runs the
// integrator with the cheaper grid profile.  Point mode is strict.
enum class ClassifyMode { point, grid };

struct Certificate {
  Params p;  // the classified point
  Complex delta;
  std::array<double, 3> axis_distances{-1.0, -1.0, -1.0};  // -1 at multiple roots
  MultPattern pattern = MultPattern::simple;
  Stratum stratum;
  // Geometry evidence recorded from the tracer; enough to replay the
  // decision without integrating again.
  WClass w_class = WClass::none;
  std::array<int, 2> evidence_pair{0, 0};  // separatrix pair behind H/F8/PR/PC indices
  ClassifyMode mode = ClassifyMode::point;
  std::string diagnostic;
  Tolerances tol;
};

std::string certificate_json(const Certificate& c);
// FNV-1a 64 over certificate_json, lowercase hex.
std::string certificate_digest(const Certificate& c);
// The decision recomputed from the stored numbers alone.
Stratum replay(const Certificate& c);

struct ClassifyResult {
  Stratum stratum;
  Certificate cert;
};

ClassifyResult classify(const Params& p, const Tolerances& tol = {},
                        ClassifyMode mode = ClassifyMode::point);

struct BoundaryTarget {
  enum class Kind { homoclinic_axis, delta_zero } kind = Kind::homoclinic_axis;
  int root = 0;  // index into solve_cubic(p_start), tracked along the segment
};

// Bisection/secant refinement of the indicator zero on the straight segment;
// throws when the segment does not bracket a sign change.
Params locate_boundary(const Params& p_start, const Params& p_end,
                       const BoundaryTarget& target, const Tolerances& tol = {});

}  // namespace cubicstrata
