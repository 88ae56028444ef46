#include "verify.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "atlas.hpp"
#include "ds_invariants.hpp"

namespace cubicstrata {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

struct Knob {
  const char* name;
  double Tolerances::* member;
};

// extrap_k is the one integer knob and is handled separately.
constexpr Knob kKnobs[] = {
    {"root_merge", &Tolerances::root_merge},
    {"root_round", &Tolerances::root_round},
    {"zero_norm", &Tolerances::zero_norm},
    {"axis", &Tolerances::axis},
    {"band", &Tolerances::band},
    {"locate", &Tolerances::locate},
    {"rel", &Tolerances::rel},
    {"abs", &Tolerances::abs},
    {"max_time", &Tolerances::max_time},
    {"landing", &Tolerances::landing},
    {"match", &Tolerances::match},
    {"chart_factor", &Tolerances::chart_factor},
    {"quad_rel", &Tolerances::quad_rel},
    {"d0", &Tolerances::d0},
    {"crossing", &Tolerances::crossing},
    {"grid_rel", &Tolerances::grid_rel},
    {"grid_abs", &Tolerances::grid_abs},
    {"grid_landing", &Tolerances::grid_landing},
};

}  // namespace

bool set_tolerance(Tolerances& tol, const std::string& name, double value) {
  if (name == "extrap_k") {
    tol.extrap_k = static_cast<int>(value);
    return true;
  }
  for (const Knob& k : kKnobs) {
    if (name == k.name) {
      tol.*(k.member) = value;
      return true;
    }
  }
  return false;
}

std::string tolerances_json(const Tolerances& tol) {
  std::string s = "{";
  for (const Knob& k : kKnobs) {
    s += '"';
    s += k.name;
    s += "\":";
    s += format_double(tol.*(k.member), 17);
    s += ',';
  }
  s += "\"extrap_k\":" + std::to_string(tol.extrap_k) + "}";
  return s;
}

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void push(std::vector<CheckResult>& out, const std::string& name, bool pass,
          const std::string& detail) {
  out.push_back({name, pass, detail});
}

Params random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  const double a = box(rng), b = box(rng), c = box(rng), d = box(rng);
  return {{a, b}, {c, d}};
}

double min_gap(const CubicRoots& r) {
  return std::min({std::abs(r.z[0] - r.z[1]), std::abs(r.z[0] - r.z[2]),
                   std::abs(r.z[1] - r.z[2])});
}

bool same_stratum(const Stratum& s, StratumTag tag, int i1, int i2) {
  return s.tag == tag && s.index1 == i1 && s.index2 == i2;
}

}  // namespace

std::vector<CheckResult> run_verification(std::uint64_t seed,
                                          const Tolerances& tol) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(seed);

  {
    double worst_p = 0.0, worst_sum = 0.0, worst_disc = 0.0, worst_res = 0.0;
    for (int i = 0; i < 200; ++i) {
      const Params p = random_params(rng);
      const CubicRoots r = solve_cubic(p, tol);
      const double scale = root_scale(r);
      for (const Complex& z : r.z) {
        const Complex pz = z * z * z + p.e1 * z + p.e0;
        worst_p = std::max(worst_p, std::abs(pz) / (scale * scale * scale));
      }
      worst_sum = std::max(
          worst_sum, std::abs(r.z[0] + r.z[1] + r.z[2]) / scale);

      const Complex prod = (r.z[0] - r.z[1]) * (r.z[0] - r.z[1]) *
                           (r.z[0] - r.z[2]) * (r.z[0] - r.z[2]) *
                           (r.z[1] - r.z[2]) * (r.z[1] - r.z[2]);
      const double s6 = std::pow(scale, 6);
      worst_disc = std::max(
          worst_disc, std::abs(discriminant(p) - prod) / s6);

      if (min_gap(r) > 1e-3 * scale) {
        const Spectrum sp = spectrum(p, r);
        Complex sum = 0.0;
        double mag = 0.0;
        for (const Complex& l : sp.lambda) {
          sum += 1.0 / l;
          mag += std::abs(1.0 / l);
        }
        worst_res = std::max(worst_res, std::abs(sum) / mag);
      }
    }
    push(out, "roots_satisfy_cubic", worst_p <= 1e-10 && worst_sum <= 1e-10,
         "max scaled residual " + short_num(std::max(worst_p, worst_sum)));
    push(out, "discriminant_is_root_product", worst_disc <= 1e-9,
         "max scaled mismatch " + short_num(worst_disc));
    push(out, "residue_sum_vanishes", worst_res <= 1e-9,
         "max relative sum " + short_num(worst_res));
  }

  {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const Params p = random_params(rng);
      const Spectrum sp = spectrum(p, tol);
      for (double delta : {0.5, 2.0}) {
        const Spectrum sps = spectrum(scale_params(p, delta), tol);
        // scaled spectra align up to root order; compare as sorted sets
        for (const Complex& l : sp.lambda) {
          double best = 1e300;
          for (const Complex& ls : sps.lambda)
            best = std::min(best, std::abs(ls - delta * delta * l));
          worst = std::max(worst, best / (delta * delta * std::abs(l)));
        }
      }
      const Spectrum spr = spectrum(rotate_params(p), tol);
      for (const Complex& l : sp.lambda) {
        double best = 1e300;
        for (const Complex& lr : spr.lambda)
          best = std::min(best, std::abs(lr + l));
        worst = std::max(worst, best / std::abs(l));
      }
    }
    push(out, "spectrum_equivariance", worst <= 1e-9,
         "max relative mismatch " + short_num(worst));
  }

  {
    const Params kHom{{-3.0, 1.0}, {2.0, -1.0}};
    const Params kF8a{{0.0, -14.0}, {-12.0, 12.0}};
    const Params kPR{{-3.0, 0.0}, {2.0, 0.0}};
    const Params kPC{Complex(0.0, -1.0),
                     std::sqrt(2.0 / 27.0) * Complex(-1.0, 1.0)};
    bool ok = true;
    std::string detail;
    const auto expect = [&](const Params& p, StratumTag tag, int i1, int i2) {
      const Stratum s = classify(p, tol).stratum;
      if (!same_stratum(s, tag, i1, i2)) {
        ok = false;
        if (!detail.empty()) detail += "; ";
        detail += "got " + stratum_label(s);
      }
    };
    expect(kHom, StratumTag::homoclinic, 2, -1);
    expect(rotate_params(kHom), StratumTag::homoclinic, 3, -1);
    expect(rotate_params(rotate_params(kHom)), StratumTag::homoclinic, 4, -1);
    expect(rotate_params(rotate_params(rotate_params(kHom))),
           StratumTag::homoclinic, 1, -1);
    expect(kF8a, StratumTag::figure_eight, 2, 4);
    expect(rotate_params(kF8a), StratumTag::figure_eight, 1, 3);
    expect(kPR, StratumTag::parabolic_regular, 1, 2);
    expect(rotate_params(kPR), StratumTag::parabolic_regular, 2, 3);
    expect(kPC, StratumTag::parabolic_center, 4, -1);
    expect(rotate_params(kPC), StratumTag::parabolic_center, 1, -1);
    push(out, "stratum_rotation_cycle", ok,
         ok ? "H, F8, PR, PC fixtures cycle under the quarter turn" : detail);
  }

  {
    bool ok = true;
    double worst = 0.0;
    for (const Params p : {Params{{-1.0, 0.0}, {0.0, 0.0}},
                           Params{{1.0, 0.0}, {0.0, 0.0}}}) {
      const DsInvariant inv = tau_pair(p, tol);
      worst = std::max({worst, std::abs(inv.tau_a - Complex(0.0, kPi)),
                        std::abs(inv.tau_b - Complex(0.0, kPi))});
    }
    ok = worst <= 1e-8;

    const Params kGen{{-1.0, 0.3}, {0.2, -0.1}};
    const DsInvariant g = tau_pair(kGen, tol);
    const Complex oracle_a(-0.683602351318, 2.23415237466);
    const Complex oracle_b(-1.27188947819, 4.52995140242);
    const double dev = std::max(std::abs(g.tau_a - oracle_a),
                                std::abs(g.tau_b - oracle_b));
    ok = ok && dev <= 1e-6;

    double worst_scale = 0.0;
    for (double delta : {0.5, 2.0}) {
      const DsInvariant gs = tau_pair(scale_params(kGen, delta), tol);
      worst_scale = std::max(
          {worst_scale, std::abs(gs.tau_a - g.tau_a / (delta * delta)),
           std::abs(gs.tau_b - g.tau_b / (delta * delta))});
    }
    ok = ok && worst_scale <= 1e-9;
    push(out, "tau_oracles_and_scaling", ok,
         "symmetric dev " + short_num(worst) + ", oracle dev " +
             short_num(dev) + ", scaling dev " + short_num(worst_scale));
  }

  {
    bool ok = true;
    std::string detail;
    try {
      const Params pi_field{{0.0, 1.0}, {0.0, 0.0}};
      const CubicRoots r = solve_cubic(pi_field, tol);
      int j0 = 0;
      for (int j = 1; j < 3; ++j)
        if (std::abs(r.z[j]) < std::abs(r.z[j0])) j0 = j;
      const double t1 = center_period(pi_field, r, j0, tol);
      ok = std::abs(t1 - 2.0 * kPi) <= 1e-6 * 2.0 * kPi;

      const Params kHom{{-3.0, 1.0}, {2.0, -1.0}};
      const double t2 = homoclinic_period(kHom, 1, tol);
      ok = ok && std::abs(t2 - 2.0 * kPi) <= 1e-6 * 2.0 * kPi;
      detail = "periods " + short_num(t1) + ", " + short_num(t2);
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    push(out, "center_and_loop_periods", ok, detail);
  }

  {
    const KnotTrace k = trace_delta_knot(256, Chart::e1_unit, tol);
    double w1 = 0.0, w0 = 0.0;
    const size_t n = k.samples.size();
    for (size_t i = 1; i <= n; ++i) {
      const Params& a = k.samples[i - 1].p;
      const Params& b = k.samples[i % n].p;
      w1 += std::arg(b.e1 / a.e1);
      w0 += std::arg(b.e0 / a.e0);
    }
    w1 /= 2.0 * kPi;
    w0 /= 2.0 * kPi;
    int marked = 0;
    for (const KnotSample& s : k.samples) marked += s.marked;
    const bool ok = std::abs(w1 - 2.0) <= 1e-9 && std::abs(w0 - 3.0) <= 1e-9 &&
                    marked == 4;
    push(out, "knot_windings_2_3", ok,
         "windings (" + short_num(w1) + ", " + short_num(w0) + "), " +
             std::to_string(marked) + " marks");
  }

  {
    bool ok = true;
    std::string detail;
    try {
      const Params a{{-3.02, 1.0}, {2.0, -1.0}};
      const Params b{{-2.98, 1.0}, {2.0, -1.0}};
      const CrossingReport rep = crossing_table(a, b, tol);
      ok = rep.pass && rep.table_row == 2 && rep.h_index == 2;
      const CrossingReport rev = verify_limits(b, a, tol);
      ok = ok && rev.pass && rev.table_row == 2;
      detail = "row " + std::to_string(rep.table_row) + ", residuals " +
               short_num(std::max({rep.residual_period, rep.residual_reversal,
                                   rep.residual_shift}));
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    push(out, "wall_crossing_relations", ok, detail);
  }

  return out;
}

std::string verification_json(const std::vector<CheckResult>& results) {
  bool all = true;
  std::string s = "{\"checks\":[";
  for (size_t i = 0; i < results.size(); ++i) {
    const CheckResult& c = results[i];
    all = all && c.pass;
    if (i) s += ',';
    std::string detail;
    for (char ch : c.detail) {
      if (ch == '"' || ch == '\\') detail += '\\';
      detail += ch;
    }
    s += "{\"name\":\"" + c.name + "\",\"pass\":" +
         (c.pass ? "true" : "false") + ",\"detail\":\"" + detail + "\"}";
  }
  s += "],\"pass\":";
  s += all ? "true" : "false";
  s += '}';
  return s;
}

}  // namespace cubicstrata
