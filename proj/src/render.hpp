// Static SVG output: phase portraits of single fields and colored stratum
// maps of sampled slices.  Documents are deterministic byte for byte.
#pragma once

#include "atlas.hpp"

namespace cubicstrata {

struct PortraitStyle {
  int size = 640;            // square canvas, px
  double view_radius = 0.0;  // 0: fitted to the roots and loop geometry
  int orbit_seeds = 0;       // extra sample trajectories per root
};

std::string portrait_svg(const Params& p,
                         const std::array<SeparatrixTrace, 4>& traces,
                         const PortraitStyle& style = {},
                         const Tolerances& tol = {});

// One rect per cell colored by tag, hatch over Unresolved, legend for every
// tag present.
std::string slice_svg(const StratumGrid& grid, int cell_px = 4);

}  // namespace cubicstrata
