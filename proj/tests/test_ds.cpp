#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "classify.hpp"
#include "cubic.hpp"
#include "ds_invariants.hpp"
#include "flow.hpp"

using namespace cubicstrata;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

const Params kW1{-1.0, 0.0};
const Params kW2{1.0, 0.0};
const Params kGen{Complex(-1.0, 0.3), Complex(0.2, -0.1)};
const Params kHom{Complex(-3.0, 1.0), Complex(2.0, -1.0)};
const Params kF8a{Complex(0.0, -14.0), Complex(-12.0, 12.0)};
const Params kCrossA{Complex(-3.02, 1.0), Complex(2.0, -1.0)};
const Params kCrossB{Complex(-2.98, 1.0), Complex(2.0, -1.0)};

int root_nearest(const Params& p, Complex target) {
    const CubicRoots r = solve_cubic(p);
    int best = 0;
    for (int j = 1; j < 3; ++j)
        if (std::abs(r.z[j] - target) < std::abs(r.z[best] - target)) best = j;
    return best;
}

Complex quadrature_tau(const Params& p, int root) {
    const CubicRoots r = solve_cubic(p);
    double rad = 1e300;
    for (int j = 0; j < 3; ++j)
        if (j != root) rad = std::min(rad, 0.3 * std::abs(r.z[j] - r.z[root]));
    std::vector<Complex> path;
    for (int k = 0; k <= 256; ++k) {
        const double th = 2.0 * kPi * k / 256.0;
        path.push_back(r.z[root] + rad * Complex(std::cos(th), std::sin(th)));
    }
    const Complex q = path_time(p, path);
    return q.imag() > 0.0 ? q : -q;
}

}  // namespace

TEST_CASE("the symmetric wall fixtures carry tau = pi i on both loops") {
    const DsInvariant a = tau_pair(kW1);
    CHECK(std::abs(a.tau_a - Complex(0.0, kPi)) <= 1e-8);
    CHECK(std::abs(a.tau_b - Complex(0.0, kPi)) <= 1e-8);
    CHECK(a.quadrant_pairs[0] == std::array<int, 2>{2, 3});
    CHECK(a.quadrant_pairs[1] == std::array<int, 2>{1, 4});
    // the enclosed roots are the two simple equilibria at +-1
    const CubicRoots r = solve_cubic(kW1);
    CHECK(std::abs(std::abs(r.z[a.enclosed_roots[0]]) - 1.0) <= 1e-12);
    CHECK(std::abs(std::abs(r.z[a.enclosed_roots[1]]) - 1.0) <= 1e-12);
    CHECK(a.enclosed_roots[0] != a.enclosed_roots[1]);

    const DsInvariant b = tau_pair(kW2);
    CHECK(std::abs(b.tau_a - Complex(0.0, kPi)) <= 1e-8);
    CHECK(std::abs(b.tau_b - Complex(0.0, kPi)) <= 1e-8);
    CHECK(b.quadrant_pairs[0] == std::array<int, 2>{1, 2});
    CHECK(b.quadrant_pairs[1] == std::array<int, 2>{3, 4});
}

TEST_CASE("quadrature around the enclosed roots reproduces the residue times") {
    for (const Params& p : {kW1, kW2, kGen}) {
        CAPTURE(format_complex(p.e1));
        const DsInvariant inv = tau_pair(p);
        CHECK(std::abs(quadrature_tau(p, inv.enclosed_roots[0]) - inv.tau_a) <= 1e-6);
        CHECK(std::abs(quadrature_tau(p, inv.enclosed_roots[1]) - inv.tau_b) <= 1e-6);
    }
}

TEST_CASE("tau scales like the reciprocal square of the cone factor") {
    for (const Params& p : {kW1, kGen}) {
        const DsInvariant base = tau_pair(p);
        for (double delta : {0.5, 2.0}) {
            CAPTURE(delta);
            const DsInvariant s = tau_pair(scale_params(p, delta));
            const double d2 = delta * delta;
            CHECK(std::abs(s.tau_a * d2 - base.tau_a) <= 1e-9 * std::abs(base.tau_a));
            CHECK(std::abs(s.tau_b * d2 - base.tau_b) <= 1e-9 * std::abs(base.tau_b));
            CHECK(s.quadrant_pairs == base.quadrant_pairs);
        }
    }
}

TEST_CASE("every invariant lies in the upper half plane across the generic strata") {
    std::mt19937_64 rng(20260822u);
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    int found = 0, attempts = 0;
    while (found < 200 && attempts < 4000) {
        ++attempts;
        const Params p{Complex(box(rng), box(rng)), Complex(box(rng), box(rng))};
        const ClassifyResult c = classify(p);
        if (c.stratum.tag != StratumTag::generic_w1 &&
            c.stratum.tag != StratumTag::generic_w2)
            continue;
        ++found;
        const DsInvariant inv = tau_pair(p);
        CHECK(inv.tau_a.imag() > 0.0);
        CHECK(inv.tau_b.imag() > 0.0);
        const bool w1 = c.stratum.tag == StratumTag::generic_w1;
        CHECK(inv.quadrant_pairs[0] == (w1 ? std::array<int, 2>{2, 3}
                                           : std::array<int, 2>{1, 2}));
    }
    CHECK(found == 200);
}

TEST_CASE("tau pairs separate a grid inside one wall component") {
    std::vector<std::pair<Complex, Complex>> taus;
    for (int iy = 0; iy < 20; ++iy) {
        for (int ix = 0; ix < 20; ++ix) {
            const Params p{-1.0, Complex(-0.15 + 0.3 * ix / 19.0,
                                         -0.15 + 0.3 * iy / 19.0)};
            const ClassifyResult c = classify(p);
            if (c.stratum.tag != StratumTag::generic_w1) continue;
            const DsInvariant inv = tau_pair(p);
            taus.emplace_back(inv.tau_a, inv.tau_b);
        }
    }
    CHECK(taus.size() >= 300);  // the component fills most of the window
    double closest = 1e300;
    for (size_t i = 0; i < taus.size(); ++i)
        for (size_t j = i + 1; j < taus.size(); ++j)
            closest = std::min(closest,
                               std::max(std::abs(taus[i].first - taus[j].first),
                                        std::abs(taus[i].second - taus[j].second)));
    CHECK(closest > 1e-6);
}

TEST_CASE("center periods match the eigenvalue formula on the fixtures") {
    const Params f8b{Complex(0.0, 1.0), 0.0};
    CHECK(homoclinic_period(f8b, root_nearest(f8b, 0.0)) ==
          doctest::Approx(2.0 * kPi).epsilon(1e-6));
    CHECK(homoclinic_period(kHom, 1) == doctest::Approx(2.0 * kPi).epsilon(1e-6));
    CHECK(homoclinic_period(kF8a, root_nearest(kF8a, Complex(1.0, 1.0))) ==
          doctest::Approx(kPi / 4.0).epsilon(1e-6));
    // the period picks up the delta^-2 factor of the cone action
    CHECK(homoclinic_period(scale_params(kHom, 0.5), 1) ==
          doctest::Approx(8.0 * kPi).epsilon(1e-6));

    CHECK_THROWS_AS(homoclinic_period(kW1, root_nearest(kW1, 1.0)),
                    std::invalid_argument);  // eigenvalue 2 is off the axis
    CHECK_THROWS_AS(homoclinic_period(kHom, 5), std::invalid_argument);
}

TEST_CASE("the fixture crossing reproduces the frozen wall data") {
    const CrossingReport rep = crossing_table(kCrossA, kCrossB);
    CHECK(std::abs(rep.wall.e1 - Complex(-3.0, 1.0)) <= 1e-8);
    CHECK(std::abs(rep.wall.e0 - Complex(2.0, -1.0)) <= 1e-12);
    CHECK(rep.h_index == 2);
    CHECK(rep.center_root == 1);
    CHECK(rep.tau1 == doctest::Approx(2.0 * kPi).epsilon(1e-9));

    CHECK(std::abs(rep.side_w2.deg - Complex(-2.0 * kPi, 0.0)) <= 1e-9);
    CHECK(std::abs(rep.side_w1.deg - Complex(2.0 * kPi, 0.0)) <= 1e-9);
    CHECK(std::abs(rep.side_w2.nd -
                   Complex(6.0793287632, 0.623430054065)) <= 1e-8);
    CHECK(std::abs(rep.side_w1.nd -
                   Complex(-0.203856543978, 0.623430054066)) <= 1e-8);
    CHECK(rep.deg_label_w2 == std::array<int, 2>{1, 2});
    CHECK(rep.deg_label_w1 == std::array<int, 2>{1, 4});
    CHECK(rep.table_row == 2);

    CHECK(rep.residual_period <= 1e-10);
    CHECK(rep.residual_reversal <= 1e-10);
    CHECK(rep.residual_shift <= 1e-10);
    CHECK(rep.side_w2.extrap_residual <= 1e-10);
    CHECK(rep.side_w1.extrap_residual <= 1e-10);
    CHECK(rep.pass);

    // either orientation feeds the limit check; the report is side-sorted
    const CrossingReport rev = verify_limits(kCrossB, kCrossA);
    CHECK(rev.table_row == 2);
    CHECK(rev.pass);
    CHECK(std::abs(rev.side_w2.deg - rep.side_w2.deg) <= 1e-10);
}

TEST_CASE("rotations walk the crossing through all four table rows") {
    Params a = kCrossA, b = kCrossB;
    const int expected_row[4] = {2, 1, 3, 4};
    const int expected_h[4] = {2, 3, 4, 1};
    for (int r = 0; r < 4; ++r) {
        CAPTURE(r);
        // odd rotations start on the W1 side, so they go through the
        // orientation-agnostic entry point
        const CrossingReport rep =
            r % 2 == 0 ? crossing_table(a, b) : verify_limits(a, b);
        CHECK(rep.h_index == expected_h[r]);
        CHECK(rep.table_row == expected_row[r]);
        CHECK(rep.pass);
        // tau itself is rotation invariant; only the labels move
        CHECK(std::abs(std::abs(rep.side_w2.deg) - 2.0 * kPi) <= 1e-9);
        CHECK(rep.residual_reversal <= 1e-8);
        CHECK(rep.residual_shift <= 1e-8);
        a = rotate_params(a);
        b = rotate_params(b);
    }
}

TEST_CASE("degenerate paths are refused") {
    // no wall along a segment interior to W1
    CHECK_THROWS_AS(verify_limits(kW1, Params{-1.0, 0.1}), std::runtime_error);
    // the wide segment collects the H(1) wall near Re e1 = -3.037 as well
    CHECK_THROWS_AS(verify_limits(Params{Complex(-3.1, 1.0), Complex(2.0, -1.0)},
                                  Params{Complex(-2.9, 1.0), Complex(2.0, -1.0)}),
                    std::runtime_error);
    // case (V) runs from W2 to W1, not the other way
    CHECK_THROWS_AS(crossing_table(kCrossB, kCrossA), std::invalid_argument);
    // tau pairs only exist off the walls
    CHECK_THROWS_AS(tau_pair(kHom), std::invalid_argument);
}

TEST_CASE("the reports serialize their decision data") {
    const std::string inv = ds_invariant_json(tau_pair(kW1));
    CHECK(inv.find("\"tau_a\"") != std::string::npos);
    CHECK(inv.find("\"quadrant_pairs\":[[2,3],[1,4]]") != std::string::npos);
    CHECK(inv.find("\"enclosed_roots\"") != std::string::npos);

    const std::string rep = crossing_report_json(crossing_table(kCrossA, kCrossB));
    CHECK(rep.find("\"table_row\":2") != std::string::npos);
    CHECK(rep.find("\"h_index\":2") != std::string::npos);
    CHECK(rep.find("\"pass\":true") != std::string::npos);
    CHECK(rep.find("\"residual_reversal\"") != std::string::npos);
}
