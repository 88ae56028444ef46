#include "atlas.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace cubicstrata {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

const char* chart_name(Chart chart) {
  return chart == Chart::e1_unit ? "e1_unit" : "sphere";
}

Cell classify_cell(const Params& p, const Tolerances& tol) {
  Cell cell;
  cell.p = p;
  try {
    ClassifyResult res = classify(p, tol, ClassifyMode::grid);
    cell.stratum = res.stratum;
    cell.digest = certificate_digest(res.cert);
  } catch (const std::exception& e) {
    Certificate c;
    c.p = p;
    c.delta = discriminant(p);
    c.stratum = Stratum{StratumTag::unresolved};
    c.mode = ClassifyMode::grid;
    c.diagnostic = e.what();
    c.tol = tol;
    cell.stratum = c.stratum;
    cell.digest = certificate_digest(c);
  }
  return cell;
}

// |a| on the chart constraint of the knot: |e1| = 3r^2, |e0| = 2r^3.
double knot_radius(Chart chart) {
  if (chart == Chart::e1_unit) return 1.0 / std::sqrt(3.0);
  double lo = 0.0, hi = 1.0;  // 3r^2 + 2r^3 = 1 has one positive root
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (3.0 * mid * mid + 2.0 * mid * mid * mid < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

StratumGrid sample_slice(const SliceSpec& spec, const Tolerances& tol,
                         int threads) {
  if (spec.nx < 2 || spec.ny < 2)
    throw std::invalid_argument("sample_slice: grid needs at least 2x2 cells");
  if (!(std::isfinite(spec.x0) && std::isfinite(spec.x1) &&
        std::isfinite(spec.y0) && std::isfinite(spec.y1)))
    throw std::invalid_argument("sample_slice: bounds must be finite");
  Tolerances run = tol;
  run.band = spec.band;

  StratumGrid grid;
  grid.spec = spec;
  grid.cells.resize(static_cast<size_t>(spec.nx) * spec.ny);
  const int nthreads = std::max(1, std::min(threads, spec.ny));
  const auto rows = [&](int first) {
    for (int iy = first; iy < spec.ny; iy += nthreads) {
      const double y = spec.y0 + (spec.y1 - spec.y0) * iy / (spec.ny - 1);
      for (int ix = 0; ix < spec.nx; ++ix) {
        const double x = spec.x0 + (spec.x1 - spec.x0) * ix / (spec.nx - 1);
        grid.cells[static_cast<size_t>(iy) * spec.nx + ix] =
            classify_cell(Params{spec.e1, Complex(x, y)}, run);
      }
    }
  };
  if (nthreads == 1) {
    rows(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(rows, t);
    for (auto& th : pool) th.join();
  }
  return grid;
}

std::string grid_csv(const StratumGrid& grid) {
  std::string csv = "re_e1,im_e1,re_e0,im_e0,tag,index1,index2,cert_digest\n";
  for (const Cell& c : grid.cells) {
    csv += format_double(c.p.e1.real(), 17) + ',' +
           format_double(c.p.e1.imag(), 17) + ',' +
           format_double(c.p.e0.real(), 17) + ',' +
           format_double(c.p.e0.imag(), 17) + ',';
    csv += tag_code(c.stratum.tag);
    csv += ',' + std::to_string(c.stratum.index1) + ',' +
           std::to_string(c.stratum.index2) + ',' + c.digest + '\n';
  }
  return csv;
}

std::string grid_filename(const SliceSpec& spec) {
  return std::string(chart_name(spec.chart)) + "_" + format_complex(spec.e1) +
         "_" + std::to_string(spec.nx) + "x" + std::to_string(spec.ny) +
         ".csv";
}

AdjacencyReport adjacency_report(const StratumGrid& grid) {
  AdjacencyReport rep;
  const int nx = grid.spec.nx, ny = grid.spec.ny;
  const auto tag_at = [&](int ix, int iy) {
    return std::string(tag_code(grid.cells[static_cast<size_t>(iy) * nx + ix]
                                    .stratum.tag));
  };
  const auto touch = [&](const std::string& a, const std::string& b) {
    if (a == b) return;
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    ++rep.counts[key];
    if (key.first == "W1" && key.second == "W2") rep.w1_w2_direct = true;
  };
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      if (ix + 1 < nx) touch(tag_at(ix, iy), tag_at(ix + 1, iy));
      if (iy + 1 < ny) touch(tag_at(ix, iy), tag_at(ix, iy + 1));
    }
  }
  if (rep.w1_w2_direct)
    rep.warnings.push_back(
        "W1 cells touch W2 cells with no banded wall cell between them; "
        "the grid resolution does not resolve the codimension-1 wall");
  return rep;
}

std::string adjacency_json(const AdjacencyReport& rep) {
  std::string s = "{\"counts\":{";
  bool first = true;
  for (const auto& [key, n] : rep.counts) {
    if (!first) s += ',';
    first = false;
    s += '"' + key.first + '|' + key.second + "\":" + std::to_string(n);
  }
  s += "},\"w1_w2_direct\":";
  s += rep.w1_w2_direct ? "true" : "false";
  s += ",\"warnings\":[";
  for (size_t i = 0; i < rep.warnings.size(); ++i) {
    if (i) s += ',';
    s += '"' + rep.warnings[i] + '"';
  }
  s += "]}";
  return s;
}

KnotTrace trace_delta_knot(int n, Chart chart, const Tolerances& tol) {
  if (n < 8)
    throw std::invalid_argument("trace_delta_knot: need at least 8 samples");
  const double r = knot_radius(chart);
  KnotTrace knot;
  knot.samples.resize(n);
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * kPi * k / n;
    const Complex a = r * Complex(std::cos(theta), std::sin(theta));
    KnotSample& s = knot.samples[k];
    s.theta = theta;
    s.p = Params{-3.0 * a * a, 2.0 * a * a * a};
    const double t4 = 4.0 * std::pow(std::abs(s.p.e1), 3);
    const double t27 = 27.0 * std::pow(std::abs(s.p.e0), 2);
    if (std::abs(discriminant(s.p)) > 1e-12 * (t4 + t27) ||
        std::abs(t4 - t27) > 1e-12 * (t4 + t27))
      throw std::runtime_error("trace_delta_knot: sample left the torus");
  }
  // Codimension-3 points: the simple-root eigenvalue 9a^2 is on the axis at
  // arg a = pi/4 + k*pi/2.  The first mark is computed, the rest are its
  // exact rotations.
  const double h = r * std::sqrt(0.5);
  const Complex a0 = Complex(h, h);
  knot.marks[0] = Params{-3.0 * a0 * a0, 2.0 * a0 * a0 * a0};
  for (int k = 1; k < 4; ++k) knot.marks[k] = rotate_params(knot.marks[k - 1]);
  for (int k = 0; k < 4; ++k) {
    const double theta = kPi / 4.0 + k * kPi / 2.0;
    const int j =
        static_cast<int>(std::lround(theta * n / (2.0 * kPi))) % n;
    knot.samples[j].marked = true;
  }
  (void)tol;
  return knot;
}

std::string knot_csv(const KnotTrace& knot) {
  std::string csv = "theta,re_e1,im_e1,re_e0,im_e0,marked\n";
  for (const KnotSample& s : knot.samples) {
    csv += format_double(s.theta, 17) + ',' +
           format_double(s.p.e1.real(), 17) + ',' +
           format_double(s.p.e1.imag(), 17) + ',' +
           format_double(s.p.e0.real(), 17) + ',' +
           format_double(s.p.e0.imag(), 17) + ',';
    csv += s.marked ? '1' : '0';
    csv += '\n';
  }
  return csv;
}

F8Segments figure_eight_segments(int n, const Tolerances& tol) {
  if (n < 1)
    throw std::invalid_argument("figure_eight_segments: need a sample count");
  F8Segments seg;
  for (int k = 0; k < n; ++k) {
    // roots a, -b, b-a with a = 1+i, b = t(1+i); collisions at t = 1/2, 2
    const double t = 0.5 + 1.5 * (k + 1) / (n + 1.0);
    const Params raw{Complex(0.0, 2.0 * (t - 1.0 - t * t)),
                     t * (t - 1.0) * Complex(-2.0, 2.0)};
    const Params p = normalize_chart(raw, Chart::e1_unit).p;
    const CubicRoots roots = solve_cubic(p, tol);
    const Spectrum spec = spectrum(p, roots);
    for (const Complex& lambda : spec.lambda)
      if (axis_distance(lambda) > 1e-10 * std::abs(lambda))
        throw std::runtime_error(
            "figure_eight_segments: eigenvalue left the axis");
    seg.seg1.push_back(p);
    seg.seg2.push_back(rotate_params(p));
  }
  const double s227 = std::sqrt(2.0 / 27.0);
  seg.ends1 = {Params{Complex(0.0, -1.0), s227 * Complex(1.0, -1.0)},
               Params{Complex(0.0, -1.0), s227 * Complex(-1.0, 1.0)}};
  seg.ends2 = {rotate_params(seg.ends1[0]), rotate_params(seg.ends1[1])};
  return seg;
}

}  // namespace cubicstrata
