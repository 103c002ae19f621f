#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"

using namespace rof;
using namespace rof::test;

TEST_CASE("interval mesh from nodes") {
    const std::vector<double> p{-1, 0, 1};
    const Mesh m = make_interval_mesh(-1, 1, p);
    CHECK(m.num_cells() == 2);
    const MeshStats st = mesh_stats(m);
    CHECK(st.h_min == doctest::Approx(1.0));
    CHECK(st.h_max == doctest::Approx(1.0));

    const std::vector<double> q{0, 0.25, 1};
    const Mesh m2 = make_interval_mesh(0, 1, q);
    CHECK(m2.measure(0) + m2.measure(1) == doctest::Approx(1.0));
    CHECK(std::min(m2.measure(0), m2.measure(1)) == doctest::Approx(0.25));
    CHECK(std::max(m2.measure(0), m2.measure(1)) == doctest::Approx(0.75));

    const std::vector<double> bad{0, 0.5, 0.25, 1};
    CHECK_THROWS(make_interval_mesh(0, 1, bad));
}

TEST_CASE("square meshes") {
    const Mesh four = make_square_mesh(1.0, SquareLayout::FourCells);
    CHECK(four.num_cells() == 4);
    CHECK(four.num_vertices() == 5);
    const Mesh two = make_square_mesh(1.0, SquareLayout::TwoCells);
    CHECK(two.num_cells() == 2);
    CHECK(two.num_vertices() == 4);
    for (const Mesh* m : {&four, &two}) {
        double area = 0;
        for (Index c = 0; c < m->num_cells(); ++c) area += m->measure(c);
        CHECK(area == doctest::Approx(4.0).epsilon(1e-14));
        CHECK(m->audit().empty());
    }
    CHECK(mesh_stats(two).h_max == doctest::Approx(2 * std::sqrt(2.0)));
    const Mesh half = make_square_mesh(0.5);
    CHECK(half.domain_measure() == doctest::Approx(1.0));
}

TEST_CASE("red refinement") {
    const Mesh m = make_square_mesh(0.5);
    const Refinement r = refine_uniform(m);
    CHECK(r.mesh.num_cells() == 8);
    CHECK(r.mesh.num_vertices() == 9);
    CHECK(r.mesh.audit().empty());
    CHECK(mesh_stats(refined_square(1)).h_avg == doctest::Approx(std::sqrt(4.0 / 9.0)));

    const std::vector<double> p{0, 0.5};
    const Mesh line = make_interval_mesh(0, 0.5, p);
    const Refinement rl = refine(line, RefinementMarks({0}));
    CHECK(rl.mesh.num_cells() == 2);
    CHECK(rl.mesh.measure(0) == doctest::Approx(0.25));
    CHECK(rl.mesh.measure(1) == doctest::Approx(0.25));

    const Refinement same = refine(m, RefinementMarks{});
    CHECK(same.mesh.vertices() == m.vertices());
    CHECK(same.mesh.cells() == m.cells());
}

TEST_CASE("closure removes hanging nodes") {
    const Mesh m = make_square_mesh(1.0);
    const HangingMesh hm = red_refine(m, RefinementMarks({0}));
    CHECK_FALSE(hm.hanging_nodes().empty());
    const Refinement r = rgb_close(hm);
    CHECK(r.mesh.audit().empty());
    CHECK(r.mesh.num_cells() > 4);

    const HangingMesh all = red_refine(m, RefinementMarks::all(m));
    CHECK(all.hanging_nodes().empty());
    CHECK(rgb_close(all).mesh.num_cells() == 8);

    std::mt19937 rng(7);
    Mesh cur = refined_square(2);
    for (int round = 0; round < 6; ++round) {
        std::vector<Index> marks;
        std::bernoulli_distribution pick(0.15);
        for (Index c = 0; c < cur.num_cells(); ++c)
            if (pick(rng)) marks.push_back(c);
        cur = refine(cur, RefinementMarks(marks)).mesh;
        REQUIRE(cur.audit().empty());
        CHECK(cur.min_angle() > 0.3);
    }
}

TEST_CASE("uniform refinement keeps the minimum angle") {
    Mesh m = make_square_mesh(1.0, SquareLayout::FourCells);
    const double a0 = m.min_angle();
    for (int k = 0; k < 5; ++k) {
        m = refine_uniform(m).mesh;
        CHECK(m.min_angle() >= a0 - 1e-12);
    }
}

TEST_CASE("beta graded interval") {
    const auto xi = beta_graded_interval(4, 2.0);
    REQUIRE(xi.size() == 5);
    const double expect[] = {0, 1.0 / 16, 0.25, 9.0 / 16, 1};
    for (int j = 0; j < 5; ++j) CHECK(xi[j] == doctest::Approx(expect[j]).epsilon(1e-15));
    double largest = 0;
    for (int j = 0; j < 4; ++j) largest = std::max(largest, xi[j + 1] - xi[j]);
    CHECK(largest == doctest::Approx(7.0 / 16));
    CHECK(largest <= 2.0 / 4);
    const auto uni = beta_graded_interval(5, 1.0);
    for (int j = 0; j <= 5; ++j) CHECK(uni[j] == doctest::Approx(j / 5.0));

    const Mesh m = graded_interval_mesh(1.0, 4, 2.0);
    CHECK(m.num_cells() == 8);
    CHECK(mesh_stats(m).h_min == doctest::Approx(1.0 / 16));
    CHECK(m.audit().empty());
}

TEST_CASE("grading towards a set") {
    const Mesh m0 = make_square_mesh(1.0);
    JumpSet circle;
    circle.circles.push_back({Vec2::Zero(), 0.5});
    const auto seq = grade_towards_set(m0, circle, 6);
    REQUIRE(seq.size() == 7);
    CHECK(seq[0].cells() == m0.cells());
    CHECK(grade_towards_set(m0, circle, 0).size() == 1);
    for (int k = 1; k <= 6; ++k) {
        CHECK(seq[k].audit().empty());
        const double hmax0 = mesh_stats(m0).h_max;
        double worst = 0;
        for (Index c = 0; c < seq[k].num_cells(); ++c)
            if (cell_meets(seq[k], c, circle)) worst = std::max(worst, seq[k].diameter(c));
        CHECK(worst <= hmax0 * std::pow(0.5, k) * 1.0001);
    }

    JumpSet band;
    band.segments.push_back({Vec2(0, 0), Vec2(0, 1)});
    const auto graded = grade_towards_set(make_square_mesh(1.0), band, 3);
    CHECK(graded.back().audit().empty());
    const double h0 = mesh_stats(make_square_mesh(1.0)).h_max;
    for (Index c = 0; c < graded.back().num_cells(); ++c)
        if (cell_meets(graded.back(), c, band)) CHECK(graded.back().diameter(c) <= h0 / 8 * 1.0001);
}

TEST_CASE("grading strength") {
    std::vector<MeshStats> quad, uni;
    for (int k = 3; k <= 8; ++k) {
        const double h = std::pow(2.0, -k);
        MeshStats s;
        s.h_avg = h;
        s.h_min = h * h;
        quad.push_back(s);
        s.h_min = 0.3 * h;
        uni.push_back(s);
    }
    CHECK(grading_strength(quad) == doctest::Approx(2.0).epsilon(0.025));
    CHECK(grading_strength(uni) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(grading_ratio(quad.back()) == doctest::Approx(2.0).epsilon(1e-12));
    MeshStats flat;
    flat.h_avg = flat.h_min = 0.01;
    CHECK(grading_ratio(flat) == doctest::Approx(1.0));
    flat.h_avg = 1.5;
    CHECK(std::isnan(grading_ratio(flat)));
    CHECK_THROWS(grading_strength(std::span<const MeshStats>(quad.data(), 1)));

    JumpSet circle;
    circle.circles.push_back({Vec2::Zero(), 0.5});
    const auto ring = grade_towards_set(make_square_mesh(1.0), circle, 8);
    std::vector<MeshStats> rs;
    for (const auto& m : ring) rs.push_back(mesh_stats(m));
    CHECK(grading_strength(rs) == doctest::Approx(2.0).epsilon(0.075));

    JumpSet edge;
    edge.segments.push_back({Vec2(-1, -1), Vec2(-1, 1)});
    const auto seq = grade_towards_set(make_square_mesh(1.0), edge, 9);
    std::vector<MeshStats> st;
    for (const auto& m : seq) st.push_back(mesh_stats(m));
    const double b = grading_strength(st);
    CHECK(b > 1.6);
    CHECK(b < 2.2);
}

TEST_CASE("mesh text round trip") {
    const Mesh m = refined_square(2);
    std::stringstream ss;
    write_mesh(ss, m);
    const Mesh back = read_mesh(ss);
    CHECK(back.vertices() == m.vertices());
    CHECK(back.cells() == m.cells());
    std::stringstream bad("2 3 1 0\n0 0\n1 0\n");
    CHECK_THROWS_AS(read_mesh(bad), ParseError);
}
