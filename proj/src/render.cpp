#include "render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "flow.hpp"

namespace cubicstrata {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Emitted coordinates are rounded to 1/100 px so identical inputs give
// identical bytes on any libm.
std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct TagStyle {
  const char* code;
  const char* fill;
};

// Indexed by StratumTag; every tag has a color.
constexpr TagStyle kTagStyle[8] = {
    {"E0", "#9467bd"}, {"W1", "#aec7e8"}, {"W2", "#ffbb78"},
    {"H", "#d62728"},  {"F8", "#2ca02c"}, {"PR", "#8c564b"},
    {"PC", "#e377c2"}, {"U", "#c7c7c7"},
};

const char* outcome_color(SepOutcome o) {
  switch (o) {
    case SepOutcome::lands: return "#1f77b4";
    case SepOutcome::homoclinic: return "#d62728";
    default: return "#7f7f7f";
  }
}

struct Frame {
  double size = 0.0;
  double radius = 0.0;  // world radius mapped onto the canvas
  double scale = 0.0;

  double x(Complex z) const { return size / 2.0 + z.real() * scale; }
  double y(Complex z) const { return size / 2.0 - z.imag() * scale; }
};

// Finite-chart position of a sample; w = 0 is the pole itself.
bool sample_z(const Sample& s, Complex& z) {
  if (s.chart == ChartFlag::finite) {
    z = s.u;
    return true;
  }
  if (std::abs(s.u) < 1e-12) return false;
  z = 1.0 / s.u;
  return true;
}

std::string polyline_path(const std::vector<Sample>& samples, const Frame& f) {
  // Split into subpaths at pole passages and far-outside gaps; the clip
  // circle trims the rest.
  std::string d;
  bool pen_down = false;
  for (const Sample& s : samples) {
    Complex z;
    if (!sample_z(s, z) || std::abs(z) > 3.0 * f.radius) {
      pen_down = false;
      continue;
    }
    d += pen_down ? 'L' : 'M';
    d += px(f.x(z));
    d += ' ';
    d += px(f.y(z));
    pen_down = true;
  }
  return d;
}

void draw_root_marker(std::string& svg, const Frame& f, Complex z,
                      Complex lambda, const Tolerances& tol) {
  const double cx = f.x(z), cy = f.y(z);
  if (std::abs(lambda) == 0.0 || axis_distance(lambda) <= tol.axis) {
    // center or multiple root: diamond
    svg += "<path class=\"root center\" d=\"M" + px(cx) + " " + px(cy - 6.0) +
           "L" + px(cx + 6.0) + " " + px(cy) + "L" + px(cx) + " " +
           px(cy + 6.0) + "L" + px(cx - 6.0) + " " + px(cy) +
           "Z\" fill=\"#ffffff\" stroke=\"#2ca02c\" stroke-width=\"2\"/>\n";
  } else if (lambda.real() < 0.0) {
    svg += "<circle class=\"root attracting\" cx=\"" + px(cx) + "\" cy=\"" +
           px(cy) + "\" r=\"5\" fill=\"#1f77b4\"/>\n";
  } else {
    svg += "<circle class=\"root repelling\" cx=\"" + px(cx) + "\" cy=\"" +
           px(cy) + "\" r=\"5\" fill=\"#ffffff\" stroke=\"#d62728\" "
           "stroke-width=\"2\"/>\n";
  }
}

}  // namespace

std::string portrait_svg(const Params& p,
                         const std::array<SeparatrixTrace, 4>& traces,
                         const PortraitStyle& style, const Tolerances& tol) {
  const CubicRoots roots = solve_cubic(p, tol);
  const Spectrum spec = spectrum(p, roots);

  Frame f;
  f.size = style.size;
  if (style.view_radius > 0.0) {
    f.radius = style.view_radius;
  } else {
    double r = 0.4;
    for (const Complex& z : roots.z) r = std::max(r, std::abs(z));
    f.radius = 2.2 * r;
  }
  f.scale = (f.size / 2.0 - 10.0) / f.radius;

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
      std::to_string(style.size) + "\" height=\"" + std::to_string(style.size) +
      "\" viewBox=\"0 0 " + std::to_string(style.size) + " " +
      std::to_string(style.size) + "\">\n";
  const std::string r_view = px(f.radius * f.scale);
  svg += "<defs><clipPath id=\"disk\"><circle cx=\"" + px(f.size / 2.0) +
         "\" cy=\"" + px(f.size / 2.0) + "\" r=\"" + r_view +
         "\"/></clipPath></defs>\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  svg += "<circle cx=\"" + px(f.size / 2.0) + "\" cy=\"" + px(f.size / 2.0) +
         "\" r=\"" + r_view +
         "\" fill=\"#fafafa\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";

  svg += "<g clip-path=\"url(#disk)\" fill=\"none\" stroke-linejoin=\"round\">\n";

  // sample orbits, behind the separatrices
  if (style.orbit_seeds > 0) {
    for (int j = 0; j < 3; ++j) {
      const Complex lambda = spec.lambda[j];
      if (std::abs(lambda) == 0.0 || axis_distance(lambda) <= tol.axis)
        continue;  // closed orbits around a center add nothing legible
      double d_min = f.radius;
      for (int k = 0; k < 3; ++k)
        if (k != j)
          d_min = std::min(d_min, std::abs(roots.z[j] - roots.z[k]));
      const int dir = lambda.real() > 0.0 ? +1 : -1;
      for (int m = 0; m < style.orbit_seeds; ++m) {
        const double th = 2.0 * kPi * m / style.orbit_seeds + 0.2;
        const Complex z0 = roots.z[j] + 0.35 * d_min *
                           Complex(std::cos(th), std::sin(th));
        Trajectory orbit = integrate(p, z0, dir, tol, true, 40.0);
        const std::string d = polyline_path(orbit.samples, f);
        if (!d.empty())
          svg += "<path class=\"orbit\" d=\"" + d +
                 "\" stroke=\"#bbbbbb\" stroke-width=\"0.8\"/>\n";
      }
    }
  }

  for (const SeparatrixTrace& tr : traces) {
    const std::string d = polyline_path(tr.traj.samples, f);
    if (d.empty()) continue;
    const bool loop = tr.outcome == SepOutcome::homoclinic;
    svg += "<path class=\"separatrix s" + std::to_string(tr.index) +
           (loop ? " homoclinic" : "") + "\" d=\"" + d + "\" stroke=\"" +
           outcome_color(tr.outcome) + "\" stroke-width=\"" +
           (loop ? "3" : "1.5") + "\"/>\n";
  }
  svg += "</g>\n";

  std::array<Complex, 3> drawn;
  int n_drawn = 0;
  for (int j = 0; j < 3; ++j) {
    bool dup = false;
    for (int k = 0; k < n_drawn; ++k)
      if (std::abs(roots.z[j] - drawn[k]) <=
          tol.root_merge * root_scale(roots))
        dup = true;
    if (dup) continue;
    drawn[n_drawn++] = roots.z[j];
    draw_root_marker(svg, f, roots.z[j], spec.lambda[j], tol);
  }

  for (int j = 1; j <= 4; ++j) {
    const double th = (2.0 * j - 3.0) * kPi / 4.0;
    const Complex pos = 0.9 * f.radius * Complex(std::cos(th), std::sin(th));
    svg += "<text class=\"quadrant\" x=\"" + px(f.x(pos)) + "\" y=\"" +
           px(f.y(pos) + 4.0) +
           "\" font-family=\"sans-serif\" font-size=\"14\" fill=\"#888888\" "
           "text-anchor=\"middle\">" + std::to_string(j) + "</text>\n";
  }

  svg += "</svg>\n";
  return svg;
}

std::string slice_svg(const StratumGrid& grid, int cell_px) {
  const int nx = grid.spec.nx, ny = grid.spec.ny;
  const int legend_w = 96;
  const int plot_w = nx * cell_px, plot_h = ny * cell_px;

  bool present[8] = {};
  for (const Cell& c : grid.cells) present[static_cast<int>(c.stratum.tag)] = true;
  int n_present = 0;
  for (bool b : present) n_present += b;

  const int width = plot_w + legend_w;
  const int height = std::max(plot_h, 10 + 18 * n_present);

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
      std::to_string(width) + "\" height=\"" + std::to_string(height) +
      "\" viewBox=\"0 0 " + std::to_string(width) + " " +
      std::to_string(height) + "\">\n";
  svg += "<defs><pattern id=\"hatch\" patternUnits=\"userSpaceOnUse\" "
         "width=\"4\" height=\"4\"><path d=\"M0 4L4 0\" stroke=\"#555555\" "
         "stroke-width=\"1\"/></pattern></defs>\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  // cells row-major with y up: grid row 0 is the bottom pixel row; equal
  // neighbors merge into one rect per run
  for (int iy = 0; iy < ny; ++iy) {
    const int y = (ny - 1 - iy) * cell_px;
    for (int ix = 0; ix < nx;) {
      const StratumTag tag = grid.cells[iy * nx + ix].stratum.tag;
      int run = 1;
      while (ix + run < nx &&
             grid.cells[iy * nx + ix + run].stratum.tag == tag)
        ++run;
      const std::string rect = "x=\"" + std::to_string(ix * cell_px) +
                               "\" y=\"" + std::to_string(y) + "\" width=\"" +
                               std::to_string(run * cell_px) +
                               "\" height=\"" + std::to_string(cell_px) + "\"";
      svg += "<rect " + rect + " fill=\"" +
             kTagStyle[static_cast<int>(tag)].fill + "\"/>\n";
      if (tag == StratumTag::unresolved)
        svg += "<rect " + rect + " fill=\"url(#hatch)\"/>\n";
      ix += run;
    }
  }

  int row = 0;
  for (int t = 0; t < 8; ++t) {
    if (!present[t]) continue;
    const int y = 10 + 18 * row++;
    const std::string rect = "x=\"" + std::to_string(plot_w + 10) +
                             "\" y=\"" + std::to_string(y) +
                             "\" width=\"14\" height=\"14\"";
    svg += "<rect " + rect + " fill=\"" + std::string(kTagStyle[t].fill) +
           "\" stroke=\"#888888\" stroke-width=\"0.5\"/>\n";
    if (t == static_cast<int>(StratumTag::unresolved))
      svg += "<rect " + rect + " fill=\"url(#hatch)\"/>\n";
    svg += "<text x=\"" + std::to_string(plot_w + 30) + "\" y=\"" +
           std::to_string(y + 11) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">" +
           kTagStyle[t].code + "</text>\n";
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace cubicstrata
