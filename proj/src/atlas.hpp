// Parameter-space sampling: stratum maps over 2-D slices (fixed e1, grid in
// e0), the Delta = 0 torus knot with its four codimension-3 marks, the
// figure-eight segments, and stratum adjacency summaries.
#pragma once

#include "classify.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cubicstrata {

struct SliceSpec {
  Chart chart = Chart::e1_unit;  // naming only; the slice fixes e1 either way
  Complex e1;
  double x0 = -1.0, x1 = 1.0;  // bounds of Re e0
  double y0 = -1.0, y1 = 1.0;  // bounds of Im e0
  int nx = 201, ny = 201;
  double band = 1e-3;
};

struct Cell {
  Params p;
  Stratum stratum;
  std::string digest;  // certificate digest, 16 hex chars
};

struct StratumGrid {
  SliceSpec spec;
  std::vector<Cell> cells;  // row-major, y outer, x inner
};

// Deterministic for a given spec, tolerances and seed regardless of threads.
StratumGrid sample_slice(const SliceSpec& spec, const Tolerances& tol = {},
                         int threads = 1);

// Columns: re_e1, im_e1, re_e0, im_e0, tag, index1, index2, cert_digest.
std::string grid_csv(const StratumGrid& grid);
// <chart>_<params>_<nx>x<ny>.csv
std::string grid_filename(const SliceSpec& spec);

struct AdjacencyReport {
  std::map<std::pair<std::string, std::string>, int> counts;  // tag pairs, sorted
  bool w1_w2_direct = false;  // any 4-neighbor W1|W2 contact
  std::vector<std::string> warnings;
};

AdjacencyReport adjacency_report(const StratumGrid& grid);
std::string adjacency_json(const AdjacencyReport& rep);

struct KnotSample {
  double theta = 0.0;
  Params p;       // on the chart constraint, Delta = 0
  bool marked = false;  // codimension-3 point: simple-root eigenvalue on axis
};

struct KnotTrace {
  std::vector<KnotSample> samples;
  std::array<Params, 4> marks;  // the exact codimension-3 points on the chart
};

// Delta = 0 parametrized by (e1, e0) = (-3a^2, 2a^3); |a| fixed by the chart.
KnotTrace trace_delta_knot(int n, Chart chart, const Tolerances& tol = {});
std::string knot_csv(const KnotTrace& knot);

struct F8Segments {
  // Interior samples of the two segments on |e1| = 1, endpoints last.
  std::vector<Params> seg1, seg2;
  std::array<Params, 2> ends1, ends2;  // root-collision limits on Delta = 0
};

// Two-root family a = alpha(1+i), b = beta(1+i): sweep t = beta/alpha over
// (1/2, 2); all three eigenvalues stay on the imaginary axis.
F8Segments figure_eight_segments(int n, const Tolerances& tol = {});

}  // namespace cubicstrata
