#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "atlas.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "cubic.hpp"

using namespace cubicstrata;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::map<std::string, int> tally(const StratumGrid& g) {
    std::map<std::string, int> n;
    for (const Cell& c : g.cells) n[tag_code(c.stratum.tag)]++;
    return n;
}

// total turning of a closed parameter loop, in 2*pi units
double winding(const KnotTrace& k, bool of_e1) {
    double w = 0.0;
    const size_t n = k.samples.size();
    for (size_t i = 1; i <= n; ++i) {
        const Params& a = k.samples[i - 1].p;
        const Params& b = k.samples[i % n].p;
        w += of_e1 ? std::arg(b.e1 / a.e1) : std::arg(b.e0 / a.e0);
    }
    return w / (2.0 * kPi);
}

}  // namespace

TEST_CASE("coarse e1=-1 slice is W1 with a W2 pocket") {
    SliceSpec s;
    s.e1 = -1.0;
    s.nx = s.ny = 11;
    StratumGrid g = sample_slice(s);
    CHECK(g.cells.size() == 121);

    auto n = tally(g);
    CHECK(n["W1"] == 109);
    CHECK(n["W2"] == 12);

    // row-major, y outer: the center cell sits at e0 = 0
    const Cell& center = g.cells[5 * 11 + 5];
    CHECK(center.p.e0 == Complex(0.0, 0.0));
    CHECK(center.stratum.tag == StratumTag::generic_w1);
    CHECK(center.digest == "4654e6fb01a16ee1");

    // 11x11 cannot resolve the wall between the pocket and the bulk
    AdjacencyReport rep = adjacency_report(g);
    CHECK(rep.w1_w2_direct);
    CHECK(rep.counts.at({"W1", "W2"}) == 22);
    REQUIRE(rep.warnings.size() == 1);
}

TEST_CASE("tight e1=i slice crosses the figure eight locus") {
    SliceSpec s;
    s.e1 = Complex(0.0, 1.0);
    s.x0 = s.y0 = -0.2;
    s.x1 = s.y1 = 0.2;
    s.nx = s.ny = 5;
    StratumGrid g = sample_slice(s);

    auto n = tally(g);
    CHECK(n["F8"] == 5);
    CHECK(n["H"] == 4);
    CHECK(n["W1"] == 8);
    CHECK(n["W2"] == 8);
    CHECK(g.cells[2 * 5 + 2].stratum.tag == StratumTag::figure_eight);
    CHECK(g.cells[2 * 5 + 2].stratum.index1 == 1);
    CHECK(g.cells[2 * 5 + 2].stratum.index2 == 3);
}

TEST_CASE("wall slice resolves every banded cell and is thread stable") {
    SliceSpec s;
    s.e1 = Complex(-3.0, 1.0);
    s.x0 = 1.5;
    s.x1 = 2.5;
    s.y0 = -1.5;
    s.y1 = -0.5;
    s.nx = s.ny = 51;

    StratumGrid g1 = sample_slice(s, {}, 1);
    StratumGrid g4 = sample_slice(s, {}, 4);
    CHECK(grid_csv(g1) == grid_csv(g4));

    auto n = tally(g1);
    CHECK(n["H"] == 6);
    CHECK(n["W1"] == 2406);
    CHECK(n["W2"] == 189);
    CHECK(n.count("U") == 0);

    AdjacencyReport rep = adjacency_report(g1);
    CHECK(rep.counts.at({"H", "W1"}) == 11);
    CHECK(rep.counts.at({"H", "W2"}) == 11);

    CHECK(grid_filename(s) == "e1_unit_-3+1i_51x51.csv");

    const std::string csv = grid_csv(g1);
    CHECK(csv.compare(0, 47, "re_e1,im_e1,re_e0,im_e0,tag,index1,index2,cert_") == 0);
}

TEST_CASE("constant slice has no adjacency contacts") {
    SliceSpec s;
    s.e1 = -1.0;
    s.x0 = s.y0 = -0.05;
    s.x1 = s.y1 = 0.05;
    s.nx = s.ny = 3;
    StratumGrid g = sample_slice(s);
    AdjacencyReport rep = adjacency_report(g);
    CHECK(rep.counts.empty());
    CHECK_FALSE(rep.w1_w2_direct);
    CHECK(rep.warnings.empty());
}

TEST_CASE("slice specs are validated") {
    SliceSpec s;
    s.e1 = -1.0;
    s.nx = 1;
    CHECK_THROWS_AS(sample_slice(s), std::invalid_argument);
    s.nx = 11;
    s.x1 = std::nan("");
    CHECK_THROWS_AS(sample_slice(s), std::invalid_argument);
}

TEST_CASE("the discriminant knot closes with windings 2 and 3") {
    KnotTrace k = trace_delta_knot(256, Chart::e1_unit);
    REQUIRE(k.samples.size() == 256);

    for (const KnotSample& s : k.samples) {
        const double scale =
            4.0 * std::pow(std::abs(s.p.e1), 3) + 27.0 * std::norm(s.p.e0);
        CHECK(std::abs(discriminant(s.p)) <= 1e-12 * scale);
    }

    CHECK(winding(k, true) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(winding(k, false) == doctest::Approx(3.0).epsilon(1e-12));

    int marked = 0;
    for (const KnotSample& s : k.samples) marked += s.marked;
    CHECK(marked == 4);

    for (const Params& m : k.marks) CHECK(std::abs(discriminant(m)) <= 1e-14);

    // the four marks are one exact rotation apart and close up
    Params r = k.marks[0];
    for (int j = 1; j < 4; ++j) {
        r = rotate_params(r);
        CHECK(r.e1 == k.marks[j].e1);
        CHECK(r.e0 == k.marks[j].e0);
    }
    r = rotate_params(r);
    CHECK(r.e1 == k.marks[0].e1);
    CHECK(r.e0 == k.marks[0].e0);

    CHECK_THROWS_AS(trace_delta_knot(4, Chart::e1_unit), std::invalid_argument);

    const std::string csv = knot_csv(k);
    CHECK(csv.compare(0, 39, "theta,re_e1,im_e1,re_e0,im_e0,marked\n0,") == 0);
}

TEST_CASE("figure eight segments stay on the locus and end in collisions") {
    F8Segments f = figure_eight_segments(9);
    REQUIRE(f.seg1.size() == 9);
    REQUIRE(f.seg2.size() == 9);

    Tolerances tol;
    for (int k : {0, 4, 8}) {
        ClassifyResult c = classify(f.seg1[k], tol, ClassifyMode::grid);
        CHECK(c.stratum.tag == StratumTag::figure_eight);
        CHECK(c.stratum.index1 == 2);
        CHECK(c.stratum.index2 == 4);
    }
    ClassifyResult c2 = classify(f.seg2[4], tol, ClassifyMode::grid);
    CHECK(c2.stratum.tag == StratumTag::figure_eight);
    CHECK(c2.stratum.index1 == 1);
    CHECK(c2.stratum.index2 == 3);

    const double s227 = std::sqrt(2.0 / 27.0);
    CHECK(f.ends1[0].e1 == Complex(0.0, -1.0));
    CHECK(f.ends1[0].e0 == s227 * Complex(1.0, -1.0));
    CHECK(f.ends1[1].e0 == s227 * Complex(-1.0, 1.0));
    CHECK(std::abs(discriminant(f.ends1[0])) == 0.0);
    CHECK(std::abs(discriminant(f.ends1[1])) == 0.0);

    // the second segment is the exact rotation image of the first
    for (size_t i = 0; i < f.seg1.size(); ++i) {
        Params r = rotate_params(f.seg1[i]);
        CHECK(r.e1 == f.seg2[i].e1);
        CHECK(r.e0 == f.seg2[i].e0);
    }
    for (int i : {0, 1}) {
        Params r = rotate_params(f.ends1[i]);
        CHECK(r.e1 == f.ends2[i].e1);
        CHECK(r.e0 == f.ends2[i].e0);
    }

    CHECK_THROWS_AS(figure_eight_segments(0), std::invalid_argument);
}
