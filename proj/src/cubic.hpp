// Root and spectrum arithmetic for P(z) = z^3 + e1*z + e0, plus the
// parameter-space symmetries (cone scaling, quarter rotation, reflection)
// and the normalization charts.
#pragma once

#include "types.hpp"

namespace cubicstrata {

enum class MultPattern { simple, double_root, triple };  // 1+1+1, 2+1, 3

struct CubicRoots {
  std::array<Complex, 3> z{};  // canonical order, duplicates repeated
  MultPattern pattern = MultPattern::simple;
  int dup = -1;  // first index of the repeated pair when pattern is 2+1
};

struct Spectrum {
  std::array<Complex, 3> lambda{};  // P'(z_j), aligned with CubicRoots::z
};

Complex discriminant(const Params& p);  // -4*e1^3 - 27*e0^2

// Closed-form solve (Cardano, trigonometric branch handling) with a short
// Newton polish per root, stable near multiple roots.  Deterministic and
// total: identical input gives bit-identical output.
CubicRoots solve_cubic(const Params& p, const Tolerances& tol = {});

Spectrum spectrum(const Params& p, const CubicRoots& roots);
Spectrum spectrum(const Params& p, const Tolerances& tol = {});

// |Re(lambda)| / |lambda|; the multiple-root case (lambda == 0) is the
// caller's business and is rejected here.
double axis_distance(Complex lambda);

Params scale_params(const Params& p, double delta);  // (d^2 e1, d^3 e0), d > 0
Params rotate_params(const Params& p);               // (-e1, -i*e0); roots turn by i
Params reflect_params(const Params& p);              // (e1, -e0);  roots negate

enum class Chart { sphere, e1_unit };

struct ChartPoint {
  Params p;
  double delta = 1.0;  // the applied cone factor: p_out = scale_params(p_in, delta)
};

// sphere: delta^2|e1| + delta^3|e0| = 1.  e1_unit: delta^2|e1| = 1.
ChartPoint normalize_chart(const Params& p, Chart chart);

// max(1, |z_1|, |z_2|, |z_3|): the length scale most tolerances are
// relative to.
double root_scale(const CubicRoots& roots);

}  // namespace cubicstrata
