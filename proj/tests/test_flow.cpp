#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "flow.hpp"

#include <cmath>
#include <sstream>

using namespace cubicstrata;

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap(double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a < -kPi) a += 2.0 * kPi;
    return a;
}

// Outcome table of one fixture: landing root per separatrix (-1 where the
// trace is homoclinic or unresolved), plus the homoclinic pair data.
struct Pattern {
    std::array<int, 4> root{-1, -1, -1, -1};
    int hom_a = 0, hom_b = 0;  // 0 when no homoclinic pair expected
    int quadrant = 0;
    int enclosed = -1;
};

Pattern pattern_of(const std::array<SeparatrixTrace, 4>& tr) {
    Pattern p;
    for (int i = 0; i < 4; ++i)
        if (tr[i].outcome == SepOutcome::lands) p.root[i] = tr[i].root;
    for (int i = 0; i < 4; ++i) {
        if (tr[i].outcome != SepOutcome::homoclinic) continue;
        if (p.hom_a == 0) {
            p.hom_a = tr[i].index;
            p.hom_b = tr[i].partner;
            p.quadrant = tr[i].quadrant;
            p.enclosed = tr[i].enclosed_root;
        }
    }
    if (p.hom_a > p.hom_b) std::swap(p.hom_a, p.hom_b);
    return p;
}

bool same(const Pattern& a, const Pattern& b) {
    return a.root == b.root && a.hom_a == b.hom_a && a.hom_b == b.hom_b &&
           a.quadrant == b.quadrant && a.enclosed == b.enclosed;
}

}  // namespace

TEST_CASE("chart radius") {
    CHECK(chart_radius(Params{{0, 0}, {0, 0}}) == doctest::Approx(10.0));
    // |e1|^(1/2) = sqrt(14) dominates |e0|^(1/3) = (12 sqrt 2)^(1/3).
    CHECK(chart_radius(Params{{0, -14}, {-12, 12}}) ==
          doctest::Approx(10.0 * std::sqrt(14.0)).epsilon(1e-12));
}

TEST_CASE("pole time series closed form for the pure cube") {
    // P = z^3 integrates to t = 1/(2 z^2) exactly; every other series term
    // carries a factor of e1 or e0.
    Params p{{0, 0}, {0, 0}};
    Complex z{3, 4};
    CHECK(std::abs(pole_time_series(p, z) - 1.0 / (2.0 * z * z)) < 1e-15);
}

TEST_CASE("blow-up time from z=2 under z^3-z") {
    // 1/(z^3-z) = -1/z + (1/2)/(z-1) + (1/2)/(z+1), so the escape time from
    // 2 along the real axis is [ln(sqrt(z^2-1)/z)] from 2 to infinity
    // = (1/2) ln(4/3).
    const double tstar = 0.5 * std::log(4.0 / 3.0);
    Params p{{-1, 0}, {0, 0}};
    auto tr = integrate(p, Complex{2, 0}, +1);
    REQUIRE(tr.event == TerminalEvent::reached_infinity);
    CHECK(tr.t_end == doctest::Approx(tstar).epsilon(1e-9));
    CHECK(std::abs(wrap(tr.direction)) < 1e-6);

    // The same time assembled from quadrature up to |z| = 10 plus the
    // asymptotic tail ties path_time and the series together.
    Complex via = path_time(p, {Complex{2, 0}, Complex{10, 0}}) +
                  pole_time_series(p, Complex{10, 0});
    CHECK(std::abs(via - Complex{tstar, 0}) < 1e-9);
}

TEST_CASE("triple root approach never certifies") {
    // Backward flow of z^3 from 1 is z(t) = 1/sqrt(1+2t): algebraic decay
    // reaches the landing radius only around t = 5e11, far past the budget.
    auto tr = integrate(Params{{0, 0}, {0, 0}}, Complex{1, 0}, -1);
    CHECK(tr.event == TerminalEvent::time_exhausted);
    CHECK(tr.diagnostic == "time budget exhausted");
    CHECK(tr.chart_end == ChartFlag::finite);
    CHECK(std::abs(tr.u_end) < 1e-3);
    CHECK(std::abs(tr.u_end) > 1e-4);
}

TEST_CASE("immediate landing at a root") {
    Params p{{-1, 0}, {0, 0}};
    // Origin has lambda = -1: attracting for forward time.
    auto tr = integrate(p, Complex{0, 0}, +1);
    CHECK(tr.event == TerminalEvent::landed);
    CHECK(tr.t_end == 0.0);
    CHECK(tr.root == 1);
}

TEST_CASE("seed angles sit on the axes for real e1") {
    // With e0 = 0 and real e1 the series Im t(R e^{i theta}) vanishes on
    // the half-axes exactly.
    Params p{{-1, 0}, {0, 0}};
    const double R = chart_radius(p);
    for (int i = 1; i <= 4; ++i)
        CHECK(std::abs(wrap(seed_angle(p, i, R) - (i - 1) * kPi / 2.0)) <
              1e-12);
}

TEST_CASE("sector_of quadrant convention") {
    CHECK(sector_of(0.1) == 2);
    CHECK(sector_of(-0.1) == 1);
    CHECK(sector_of(1.6) == 3);
    CHECK(sector_of(3.0) == 3);
    CHECK(sector_of(-3.0) == 4);
    CHECK(sector_of(-1.6) == 4);
    // Left-closed at each axis.
    CHECK(sector_of(0.0) == 2);
    CHECK(sector_of(kPi / 2.0) == 3);
}

TEST_CASE("generic landing pattern of the two wall fixtures") {
    auto w1 = trace_separatrices(Params{{-1, 0}, {0, 0}});
    CHECK(pattern_of(w1).root == std::array<int, 4>{2, 1, 0, 1});
    for (const auto& t : w1) CHECK(t.outcome == SepOutcome::lands);
    CHECK(w1[0].traj.t_end == doctest::Approx(-6.584).epsilon(2e-3));
    CHECK(w1[1].traj.t_end == doctest::Approx(13.82).epsilon(2e-3));

    auto g1 = build_connecting_graph(w1);
    CHECK(g1.w_class == WClass::w1);
    CHECK(g1.shared_root == 1);
    CHECK(g1.diagnostic.empty());

    auto w2 = trace_separatrices(Params{{1, 0}, {0, 0}});
    CHECK(pattern_of(w2).root == std::array<int, 4>{1, 2, 1, 0});
    auto g2 = build_connecting_graph(w2);
    CHECK(g2.w_class == WClass::w2);
    CHECK(g2.shared_root == 1);
}

TEST_CASE("homoclinic fixture pairs s1 s2 around the middle root") {
    Params p{{-3, 1}, {2, -1}};
    auto tr = trace_separatrices(p);
    Pattern got = pattern_of(tr);
    CHECK(got.root == std::array<int, 4>{-1, -1, 0, 2});
    CHECK(got.hom_a == 1);
    CHECK(got.hom_b == 2);
    CHECK(got.quadrant == 2);
    CHECK(got.enclosed == 1);
    // Both partners agree on the pair.
    CHECK(tr[0].partner == 2);
    CHECK(tr[1].partner == 1);
    // The loop winds once around the enclosed root and the exit happens
    // within the matching tolerance of the partner seed.
    CHECK(std::abs(tr[0].traj.winding[1]) > 3.0);
    CHECK(std::abs(tr[0].traj.winding[0]) < 3.0);
    CHECK(std::abs(tr[0].traj.winding[2]) < 3.0);
    REQUIRE(tr[0].traj.excursions.size() == 1);
    CHECK(std::abs(wrap(tr[0].traj.excursions[0].theta_out -
                        tr[1].theta_seed)) < 1e-6);
}

TEST_CASE("rotation advances the homoclinic quadrant by one") {
    Params base{{-3, 1}, {2, -1}};
    Params r1 = rotate_params(base);
    Params r2 = rotate_params(r1);

    Pattern q1 = pattern_of(trace_separatrices(r1));
    CHECK(q1.hom_a == 2);
    CHECK(q1.hom_b == 3);
    CHECK(q1.quadrant == 3);
    CHECK(q1.enclosed == 1);
    CHECK(q1.root == std::array<int, 4>{2, -1, -1, 0});

    Pattern q2 = pattern_of(trace_separatrices(r2));
    CHECK(q2.hom_a == 3);
    CHECK(q2.hom_b == 4);
    CHECK(q2.quadrant == 4);
    CHECK(q2.enclosed == 1);
    CHECK(q2.root == std::array<int, 4>{2, 0, -1, -1});
}

TEST_CASE("figure eight fixtures carry two opposite loops") {
    auto f = trace_separatrices(Params{{0, -14}, {-12, 12}});
    for (const auto& t : f) CHECK(t.outcome == SepOutcome::homoclinic);
    CHECK(f[0].partner == 2);
    CHECK(f[0].quadrant == 2);
    CHECK(f[0].enclosed_root == 2);
    CHECK(f[2].partner == 4);
    CHECK(f[2].quadrant == 4);
    CHECK(f[2].enclosed_root == 0);

    // (i, 0) pairs across the other diagonal: {4,1} and {2,3}.
    auto g = trace_separatrices(Params{{0, 1}, {0, 0}});
    for (const auto& t : g) CHECK(t.outcome == SepOutcome::homoclinic);
    CHECK(g[0].partner == 4);
    CHECK(g[0].quadrant == 1);
    CHECK(g[0].enclosed_root == 2);
    CHECK(g[1].partner == 3);
    CHECK(g[1].quadrant == 3);
    CHECK(g[1].enclosed_root == 0);
}

TEST_CASE("parabolic fixtures") {
    // Regular: three traces crawl into the double root (algebraic rate, so
    // t_end is large), one lands at the simple root.
    auto pr = trace_separatrices(Params{{-3, 0}, {2, 0}});
    CHECK(pattern_of(pr).root == std::array<int, 4>{1, 1, 0, 1});
    CHECK(std::abs(pr[0].traj.t_end) > 1e4);
    auto gpr = build_connecting_graph(pr);
    CHECK_FALSE(gpr.diagnostic.empty());

    // Center: the persistent loop through the pole is the pair {3,4} and
    // encloses the simple center; the other two land at the double root.
    const double c = std::sqrt(2.0 / 27.0);
    auto pc = trace_separatrices(Params{{0, -1}, {-c, c}});
    Pattern got = pattern_of(pc);
    CHECK(got.root == std::array<int, 4>{1, 1, -1, -1});
    CHECK(got.hom_a == 3);
    CHECK(got.hom_b == 4);
    CHECK(got.quadrant == 4);
    CHECK(got.enclosed == 0);
}

TEST_CASE("wall sides around the homoclinic fixture") {
    // Shifting Re e1 by +-0.005 off the wall resolves to the two generic
    // classes; the slow trace near the broken loop lands within budget.
    auto a = trace_separatrices(Params{{-2.995, 1}, {2, -1}});
    auto ga = build_connecting_graph(a);
    CHECK(ga.w_class == WClass::w1);
    CHECK(ga.shared_root == 2);

    auto b = trace_separatrices(Params{{-3.005, 1}, {2, -1}});
    auto gb = build_connecting_graph(b);
    CHECK(gb.w_class == WClass::w2);
    CHECK(gb.shared_root == 0);
}

TEST_CASE("zero field separatrices are the half axes") {
    auto tr = trace_separatrices(Params{{0, 0}, {0, 0}});
    for (int i = 0; i < 4; ++i) {
        CHECK(tr[i].outcome == SepOutcome::lands);
        CHECK(tr[i].root == 0);
        CHECK(tr[i].theta_seed == doctest::Approx(i * kPi / 2.0));
    }
}

TEST_CASE("early exit reproduces the full trace on a generic point") {
    Params p{{-1, 0}, {0, 0}};
    auto full = trace_separatrices(p);
    auto fast = trace_separatrices(p, {}, TraceOptions{false, true});
    // Repelling pair suffices: attracting traces are skipped.
    CHECK(fast[1].outcome == SepOutcome::lands);
    CHECK(fast[1].root == full[1].root);
    CHECK(fast[3].root == full[3].root);
    CHECK(fast[0].outcome == SepOutcome::unresolved);
    CHECK(fast[0].diagnostic == "skipped");

    // On the homoclinic fixture the shortcut does not apply and the full
    // pattern comes back unchanged.
    Params h{{-3, 1}, {2, -1}};
    CHECK(same(pattern_of(trace_separatrices(h, {}, TraceOptions{false, true})),
               pattern_of(trace_separatrices(h))));
}

TEST_CASE("scaling covariance of traces") {
    // Roots scale by delta and keep their canonical order for real
    // delta > 0, so landing indices are invariant and times scale by
    // delta^-2.  t_end of a landing carries the step quantization of the
    // landing-radius check, so the sharp time comparison runs in t_limit
    // mode: z(t) for the scaled field must equal delta * z(delta^2 t).
    Params p{{-1, 0}, {0, 0}};
    auto base = trace_separatrices(p);
    auto sc = trace_separatrices(scale_params(p, 2.0));
    for (int i = 0; i < 4; ++i) {
        CHECK(sc[i].outcome == SepOutcome::lands);
        CHECK(sc[i].root == base[i].root);
        CHECK(sc[i].traj.t_end ==
              doctest::Approx(base[i].traj.t_end / 4.0).epsilon(0.05));
    }

    auto zb = integrate(p, Complex{3, 2}, -1, {}, false, 4.0);
    auto zs = integrate(scale_params(p, 2.0), Complex{6, 4}, -1, {}, false,
                        1.0);
    REQUIRE(zb.event == TerminalEvent::time_exhausted);
    REQUIRE(zs.event == TerminalEvent::time_exhausted);
    REQUIRE(zb.chart_end == ChartFlag::finite);
    CHECK(std::abs(zs.u_end - 2.0 * zb.u_end) < 1e-7);

    Params h{{-3, 1}, {2, -1}};
    Pattern want = pattern_of(trace_separatrices(h));
    Pattern got = pattern_of(trace_separatrices(scale_params(h, 0.5)));
    CHECK(same(got, want));
}

TEST_CASE("chart factor does not change the classification") {
    Tolerances wide;
    wide.chart_factor = 20.0;
    Params h{{-3, 1}, {2, -1}};
    CHECK(same(pattern_of(trace_separatrices(h, wide)),
               pattern_of(trace_separatrices(h))));
    Params p{{-1, 0}, {0, 0}};
    CHECK(pattern_of(trace_separatrices(p, wide)).root ==
          std::array<int, 4>{2, 1, 0, 1});
}

TEST_CASE("traces are bit deterministic") {
    Params h{{-3, 1}, {2, -1}};
    auto a = trace_separatrices(h);
    auto b = trace_separatrices(h);
    for (int i = 0; i < 4; ++i) {
        CHECK(a[i].traj.t_end == b[i].traj.t_end);
        CHECK(a[i].traj.winding == b[i].traj.winding);
        CHECK(a[i].partner == b[i].partner);
    }
}

TEST_CASE("center periods against 2 pi over |lambda|") {
    struct Case {
        Params p;
        int root;
        double want;
    };
    const Case cases[] = {
        {{{0, 1}, {0, 0}}, 1, 2.0 * kPi},          // lambda = i at the origin
        {{{0, -14}, {-12, 12}}, 1, kPi / 4.0},     // lambda = -8i at 1+i
        {{{-3, 1}, {2, -1}}, 1, 2.0 * kPi},        // lambda = i at 1
    };
    for (const auto& c : cases) {
        auto roots = solve_cubic(c.p);
        const double T = center_period(c.p, roots, c.root);
        CHECK(std::abs(T - c.want) < 1e-6);
        const double lam = std::abs(spectrum(c.p, roots).lambda[c.root]);
        CHECK(std::abs(T - 2.0 * kPi / lam) < 1e-6);
    }
    // A root off the imaginary axis is rejected.
    auto r = solve_cubic(Params{{-1, 0}, {0, 0}});
    CHECK_THROWS_AS(center_period(Params{{-1, 0}, {0, 0}}, r, 1),
                    std::invalid_argument);
}

TEST_CASE("path_time residues and path independence") {
    Params p{{-3, 1}, {2, -1}};
    // Square loop around the root at 1 (lambda = i): the residue of 1/P
    // there is 1/lambda, so the loop integral is 2 pi i / i = 2 pi.
    std::vector<Complex> loop = {{1.3, 0.3}, {0.7, 0.3}, {0.7, -0.3},
                                 {1.3, -0.3}, {1.3, 0.3}};
    CHECK(std::abs(path_time(p, loop) - Complex{2.0 * kPi, 0}) < 1e-8);

    // Reversal negates, and a deformed route between the same endpoints in
    // the same homotopy class gives the same time.
    std::vector<Complex> ab = {{2, 2}, {3, -1}};
    std::vector<Complex> ba = {{3, -1}, {2, 2}};
    CHECK(std::abs(path_time(p, ab) + path_time(p, ba)) < 1e-10);
    std::vector<Complex> detour = {{2, 2}, {4, 2}, {4, -1}, {3, -1}};
    CHECK(std::abs(path_time(p, ab) - path_time(p, detour)) < 1e-8);

    CHECK_THROWS_AS(path_time(p, {Complex{0, 0}, Complex{2, 0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(path_time(p, {Complex{1, 1}}), std::invalid_argument);
}

TEST_CASE("trajectory csv shape") {
    auto tr = integrate(Params{{-1, 0}, {0, 0}}, Complex{2, 0}, +1, {}, true);
    std::istringstream in(trajectory_csv(tr));
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "t,re_z,im_z,chart");
    double tprev = -1.0;
    int rows = 0, infinity_rows = 0;
    double last_abs = 0.0;
    while (std::getline(in, line)) {
        double t, re, im;
        int chart;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%d", &t, &re, &im,
                            &chart) == 4);
        CHECK(t >= tprev);
        tprev = t;
        if (chart == 1) ++infinity_rows;
        last_abs = std::hypot(re, im);
        ++rows;
    }
    CHECK(rows == static_cast<int>(tr.samples.size()));
    CHECK(infinity_rows > 0);
    // Infinity-chart rows are written as z = 1/z_w, so the run into the
    // pole ends past twice the chart radius where the analytic completion
    // takes over.
    CHECK(tr.event == TerminalEvent::reached_infinity);
    CHECK(last_abs > 19.0);
}
