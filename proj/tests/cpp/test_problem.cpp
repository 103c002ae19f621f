#include <doctest.h>

#include <cmath>

#include "helpers.hpp"

using namespace rof;
using namespace rof::test;

TEST_CASE("closed form coefficients") {
    CHECK(coefficient(0.5, 10, 2, ExactVariant::BallD) == doctest::Approx(0.6));
    CHECK(coefficient(2.0, 10, 1, ExactVariant::Sign1D) == doctest::Approx(0.95));
    CHECK(coefficient(0.2, 10, 2, ExactVariant::TwoDisc) == 0.0);
    CHECK(coefficient(0.1, 10, 2, ExactVariant::TwoDisc) == 0.0);
    CHECK(coefficient(0.4, 10, 2, ExactVariant::TwoDisc) == doctest::Approx(0.5));
    CHECK(coefficient(5.0, 10, 2, ExactVariant::TwoDisc) == doctest::Approx(0.96));
    CHECK_THROWS(coefficient(-1.0, 10, 2, ExactVariant::BallD));
}

TEST_CASE("single disc dual field") {
    const ExactSolution ex = exact_single_disc(0.5, 10, 2);
    REQUIRE(ex.z.has_value());
    REQUIRE(ex.div_z.has_value());
    CHECK(ex.c == doctest::Approx(0.6));
    CHECK((*ex.z)(Vec2(1.0, 0.0)).norm() == doctest::Approx(0.5));
    CHECK((*ex.z)(Vec2(0.3, 0.4)).norm() == doctest::Approx(1.0));
    const double h = 1e-5;
    for (const Vec2& x : {Vec2(0.1, 0.2), Vec2(-0.3, 0.05), Vec2(0.7, 0.1), Vec2(-0.4, -0.6)}) {
        const auto& z = *ex.z;
        const double fd = ((z(x + Vec2(h, 0)) - z(x - Vec2(h, 0))).x() + (z(x + Vec2(0, h)) - z(x - Vec2(0, h))).y()) / (2 * h);
        CHECK(fd == doctest::Approx((*ex.div_z)(x)).epsilon(1e-6).scale(1));
        const double expect = x.norm() < 0.5 ? -1.0 * 2 / 0.5 : 0.0;
        CHECK((*ex.div_z)(x) == doctest::Approx(expect));
    }
}

TEST_CASE("two disc solution is antisymmetric") {
    const AffineMap phi = AffineMap::rotation(70.0 * M_PI / 180, Vec2(0.1, 0));
    const ExactSolution ex = exact_two_disc(0.4, 10, phi);
    CHECK(ex.c == doctest::Approx(0.5));
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 200; ++k) {
        const Vec2 y(u(rng), u(rng));
        CHECK(ex.u(phi.inverse(y)) == doctest::Approx(-ex.u(phi.inverse(Vec2(-y.x(), y.y())))));
    }
}

TEST_CASE("energies of simple functions") {
    const auto mesh = share(refined_square(3));
    RofProblem pb;
    pb.epsilon = 0.01;
    const FeFunction zero(Space::P1, mesh, Eigen::VectorXd::Zero(mesh->num_vertices()));
    const Energies e = energies(zero, pb);
    CHECK(e.I_eps() == doctest::Approx(0.01 * 4 + 5 * M_PI / 4).epsilon(1e-7));
    CHECK(e.tv == 0.0);
    CHECK(e.tv_eps == doctest::Approx(0.04));

    const ExactSolution ex = exact_single_disc(0.5, 10, 2);
    const auto fine = share(grade_towards_set(make_square_mesh(1.0), ex.jumps, 7).back());
    const FeFunction iu = nodal_interpolate(ex.u, fine);
    const Energies ei = energies(iu, pb);
    CHECK(ei.I_eps() >= 0.8 * M_PI - 0.01 * 4);
    CHECK(ei.tv_eps - ei.tv >= 0.0);
    CHECK(ei.tv_eps - ei.tv <= 0.01 * 4 + 1e-12);
}

TEST_CASE("continuous strong duality") {
    const ExactSolution ex = exact_single_disc(0.5, 10, 2);
    RofProblem pb;
    const Mesh mesh = refined_square(2);
    QuadratureOptions q;
    q.degree = 5;
    q.max_depth = 14;
    q.tolerance = 1e-10;
    const auto zero = [](const Vec2&) { return Vec2(0, 0); };
    const auto zero_div = [](const Vec2&) { return 0.0; };
    CHECK(std::abs(dual_energy(zero, zero_div, pb, mesh, q).value) < 1e-10);
    const DualEnergy d = dual_energy(*ex.z, *ex.div_z, pb, mesh, q);
    CHECK(d.admissible);
    CHECK(d.value == doctest::Approx(0.8 * M_PI).epsilon(1e-6));
}

TEST_CASE("discrete weak duality") {
    const auto mesh = share(grade_towards_set(make_square_mesh(1.0), DataFunction::char_ball(Vec2::Zero(), 0.5).jump_set(), 5).back());
    RofProblem pb;
    pb.epsilon = 1e-3;
    FlowSystem sys(mesh, Space::CR, pb);
    FlowConfig cfg;
    cfg.eps_stop = 1e-9;
    const FlowState st = run_flow(sys, sys.initial_iterate(), cfg);
    const DualField z = reconstruct_dual(st.u, pb);
    const DualEnergy d = dual_energy(z.z, pb);
    CHECK(d.admissible);
    const Energies e = energies(st.u, pb);
    CHECK(d.value <= e.I_h() + 1e-10);
    CHECK(d.regularized <= e.I_h_eps() + 1e-10);
    CHECK(e.I_h_eps() - d.regularized < 0.05);
}

TEST_CASE("Hoelder quotient") {
    const double r = 0.5;
    const double lim = std::sqrt(2.0) / std::sqrt(r);
    CHECK(std::abs(holder_quotient(1e-4, r, 0.5) - lim) / lim < 1e-4);
    const double ratio = holder_quotient(0.01, r, 1.0) / holder_quotient(0.1, r, 1.0);
    CHECK(ratio == doctest::Approx(10.0).epsilon(0.05));
    double prev = 0;
    for (double phi : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
        const double l = holder_quotient(phi, r, 1.0);
        CHECK(l > 5 * prev);
        prev = l;
    }
    CHECK(prev > 1e5);
    for (double theta : {0.25, 0.5, 0.75, 1.0})
        for (double phi : {1e-3, 0.1, 0.7, 1.5}) {
            const double direct = holder_quotient_direct(phi, r, theta);
            const double closed = holder_quotient(phi, r, theta);
            CHECK(direct == doctest::Approx(std::pow(2.0, 1 - theta) * closed).epsilon(1e-12));
        }
    CHECK_THROWS(holder_quotient(0.0, r, 0.5));
    CHECK_THROWS(holder_quotient(0.1, r, 1.5));
}
