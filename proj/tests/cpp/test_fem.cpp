#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"

using namespace rof;
using namespace rof::test;

TEST_CASE("P1 reference stiffness and mass") {
    const Mesh t = reference_triangle();
    const Eigen::Matrix3d K = local_stiffness(t, 0, Space::P1);
    Eigen::Matrix3d expect;
    expect << 2, -1, -1, -1, 1, 0, -1, 0, 1;
    expect *= 0.5;
    CHECK((K - expect).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(K.rowwise().sum().cwiseAbs().maxCoeff() < 1e-14);

    const Eigen::Matrix3d M = local_mass(t, 0, Space::P1, MassVariant::Full);
    Eigen::Matrix3d mexp;
    mexp << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    mexp *= 0.5 / 12.0;
    CHECK((M - mexp).cwiseAbs().maxCoeff() < 1e-15);

    const Eigen::Matrix3d P = local_mass(t, 0, Space::P1, MassVariant::Projected);
    CHECK((P - Eigen::Matrix3d::Constant(0.5 / 9.0)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("CR reference stiffness matches direct integration") {
    const Mesh t = reference_triangle();
    const Eigen::Matrix3d Kcr = local_stiffness(t, 0, Space::CR);
    const Eigen::Matrix3d Kp1 = local_stiffness(t, 0, Space::P1);
    CHECK((Kcr - 4.0 * Kp1).cwiseAbs().maxCoeff() < 1e-14);
    const auto g = local_basis_gradients(t, 0, Space::CR);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(Kcr(i, j) == doctest::Approx(0.5 * g[i].dot(g[j])));
    CHECK(Kcr.rowwise().sum().cwiseAbs().maxCoeff() < 1e-14);

    const Eigen::Matrix3d M = local_mass(t, 0, Space::CR, MassVariant::Full);
    double direct[3][3] = {};
    const QuadratureRule& rule = triangle_rule(2);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto phi = local_basis(t, Space::CR, rule.points[q]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) direct[i][j] += 0.5 * rule.weights[q] * phi[i] * phi[j];
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(M(i, j) == doctest::Approx(direct[i][j]).epsilon(1e-13));
}

TEST_CASE("global mass of constants") {
    const auto mesh = share(refined_square(3));
    for (Space s : {Space::P1, Space::CR})
        for (MassVariant v : {MassVariant::Full, MassVariant::Projected}) {
            const SparseOperator M = assemble_mass(*mesh, s, v);
            const Eigen::VectorXd one = Eigen::VectorXd::Ones(M.rows());
            CHECK(one.dot(M * one) == doctest::Approx(4.0).epsilon(1e-13));
        }
    const FeFunction w(Space::P0, mesh, Eigen::VectorXd::Ones(mesh->num_cells()));
    const SparseOperator K = assemble_weighted_stiffness(*mesh, w, Space::CR);
    CHECK((K * Eigen::VectorXd::Ones(K.rows())).cwiseAbs().maxCoeff() < 1e-12);
    const FeFunction bad(Space::P0, mesh, Eigen::VectorXd::Zero(mesh->num_cells()));
    CHECK_THROWS(assemble_weighted_stiffness(*mesh, bad, Space::P1));
}

TEST_CASE("piecewise constant projection") {
    const auto t = share(reference_triangle());
    const FeFunction p = project_p0([](const Vec2& x) { return x.x(); }, t);
    CHECK(p.dofs()[0] == doctest::Approx(1.0 / 3).epsilon(1e-14));
    const FeFunction c = project_p0([](const Vec2&) { return 2.5; }, t);
    CHECK(c.dofs()[0] == doctest::Approx(2.5));

    const auto mesh = share(refined_square(2));
    const DataFunction g = DataFunction::char_ball(Vec2::Zero(), 0.5);
    const FeFunction pg = project_p0(g, mesh, &g.jump_set());
    QuadratureOptions fine;
    fine.max_depth = 14;
    fine.tolerance = 1e-10;
    const FeFunction pf = project_p0(g, mesh, &g.jump_set(), fine);
    bool straddles = false;
    double area = 0;
    for (Index k = 0; k < mesh->num_cells(); ++k) {
        const double v = pg.dofs()[k];
        if (v > 0 && v < 1) straddles = true;
        CHECK(std::abs(v - pf.dofs()[k]) < 1e-6);
        area += pf.dofs()[k] * mesh->measure(k);
    }
    CHECK(straddles);
    CHECK(area == doctest::Approx(M_PI / 4).epsilon(1e-9));
}

TEST_CASE("nodal interpolation") {
    const auto mesh = share(refined_square(2));
    const auto affine = [](const Vec2& x) { return 1.0 + 2.0 * x.x() - 0.5 * x.y(); };
    const FeFunction u = nodal_interpolate(affine, mesh);
    for (Index c = 0; c < mesh->num_cells(); ++c) CHECK(u.value(c, mesh->barycenter(c)) == doctest::Approx(affine(mesh->barycenter(c))));
    CHECK(l2_error(u, affine).value < 1e-14);

    std::vector<double> err, h;
    for (int J : {8, 16, 32, 64}) {
        std::vector<double> nodes;
        for (int j = 0; j <= J; ++j) nodes.push_back(-1.0 + 2.0 * j / J);
        const auto line = share(make_interval_mesh(-1, 1, nodes));
        const FeFunction s = nodal_interpolate([](const Vec2& x) { return std::sin(3 * x.x()); }, line);
        const double l1 = integrate(*line, [&](Index c, const Vec2& x) { return std::abs(s.value(c, x) - std::sin(3 * x.x())); });
        err.push_back(l1);
        h.push_back(2.0 / J);
    }
    const auto rates = eoc(err, h);
    for (std::size_t i = 1; i < rates.size(); ++i) CHECK(rates[i] == doctest::Approx(2.0).epsilon(0.05));

    const std::vector<double> nodes{-1, 0, 1};
    const auto line = share(make_interval_mesh(-1, 1, nodes));
    const FeFunction sg = nodal_interpolate(DataFunction::sign_1d(), line);
    int at_zero = -1;
    for (Index v = 0; v < line->num_vertices(); ++v)
        if (line->vertex(v).x() == 0.0) at_zero = v;
    REQUIRE(at_zero >= 0);
    CHECK(sg.dofs()[at_zero] == 0.0);
}

TEST_CASE("CR interpolation reproduces affine functions") {
    const auto mesh = share(refined_square(2));
    const auto affine = [](const Vec2& x) { return -0.3 + x.x() + 4.0 * x.y(); };
    const FeFunction u = cr_interpolate(affine, mesh);
    for (Index c = 0; c < mesh->num_cells(); ++c)
        for (int k = 0; k < 3; ++k) {
            const Vec2 p = mesh->vertex(mesh->cell(c)[k]);
            CHECK(u.value(c, p) == doctest::Approx(affine(p)).epsilon(1e-13));
        }
    const FeFunction m = cr_midpoint_interpolate(affine, mesh);
    CHECK((m.dofs() - u.dofs()).cwiseAbs().maxCoeff() < 1e-13);
    const FeFunction p1 = nodal_interpolate(affine, mesh);
    CHECK((cr_interpolate(p1).dofs() - u.dofs()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("CR projection property on random polynomials") {
    for (unsigned seed = 1; seed <= 20; ++seed) {
        std::mt19937 rng(seed);
        const auto mesh = share(perturbed_square(2, rng));
        const Cubic v = Cubic::random(rng);
        const FeFunction jv = cr_interpolate(std::cref(v), mesh);
        std::vector<QuadPoint> pts;
        double l1_discrete = 0, l1_exact = 0;
        for (Index c = 0; c < mesh->num_cells(); ++c) {
            pts.clear();
            cell_quadrature(*mesh, c, nullptr, QuadratureOptions{5, 0, 1e-7}, pts);
            Vec2 mean = Vec2::Zero();
            for (const auto& q : pts) {
                mean += q.weight * v.gradient(q.x);
                l1_exact += q.weight * v.gradient(q.x).norm();
            }
            mean /= mesh->measure(c);
            CHECK((jv.gradient(c) - mean).norm() < 1e-12 * (1 + mean.norm()));
            l1_discrete += mesh->measure(c) * jv.gradient(c).norm();
        }
        CHECK(l1_discrete <= l1_exact * (1 + 1e-12));
    }
}

TEST_CASE("elementwise gradient") {
    const auto mesh = share(refined_square(1));
    const FeFunction u = nodal_interpolate([](const Vec2& x) { return x.x(); }, mesh);
    const FeFunction g = elementwise_gradient(u);
    for (Index c = 0; c < mesh->num_cells(); ++c) {
        CHECK(g.vector_value(c, mesh->barycenter(c)).x() == doctest::Approx(1.0));
        CHECK(std::abs(g.vector_value(c, mesh->barycenter(c)).y()) < 1e-14);
    }
    const FeFunction w = cr_midpoint_interpolate([](const Vec2& x) { return x.y(); }, mesh);
    for (Index c = 0; c < mesh->num_cells(); ++c) CHECK((w.gradient(c) - Vec2(0, 1)).norm() < 1e-13);
    const FeFunction k = nodal_interpolate([](const Vec2&) { return 3.0; }, mesh);
    for (Index c = 0; c < mesh->num_cells(); ++c) CHECK(k.gradient(c).norm() < 1e-14);
}

TEST_CASE("integration by parts between CR and RT0") {
    for (unsigned seed = 1; seed <= 20; ++seed) {
        std::mt19937 rng(100 + seed);
        std::normal_distribution<double> n;
        const auto mesh = share(perturbed_square(2, rng));
        Eigen::VectorXd vd(mesh->num_sides()), fluxes(mesh->num_sides());
        for (Index s = 0; s < mesh->num_sides(); ++s) {
            vd[s] = mesh->is_boundary_side(s) ? 0.0 : n(rng);
            fluxes[s] = n(rng);
        }
        const FeFunction v(Space::CR, mesh, vd);
        const FeFunction q = rt0_from_normal_components(mesh, fluxes);
        CHECK(normal_jumps(q).cwiseAbs().maxCoeff() < 1e-12);
        double sum = 0, scale = 0;
        for (Index c = 0; c < mesh->num_cells(); ++c) {
            const double a = mesh->measure(c) * v.cell_mean(c) * rt_divergence(q, c);
            const double b = mesh->measure(c) * v.gradient(c).dot(q.rt_constant(c));
            sum += a + b;
            scale += std::abs(a) + std::abs(b);
        }
        CHECK(std::abs(sum) < 1e-12 * std::max(1.0, scale));
    }
}

TEST_CASE("1D nodal interpolation is TV diminishing") {
    for (unsigned seed = 1; seed <= 20; ++seed) {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> u(-1, 1);
        std::vector<double> jumps_at, heights;
        for (int k = 0; k < 4; ++k) {
            jumps_at.push_back(u(rng));
            heights.push_back(2 * u(rng));
        }
        const double w = 1 + 4 * (u(rng) + 1);
        const auto v = [&](const Vec2& x) {
            double s = std::sin(w * x.x());
            for (int k = 0; k < 4; ++k) s += x.x() >= jumps_at[k] ? heights[k] : 0.0;
            return s;
        };
        std::vector<double> nodes{-1, 1};
        for (int k = 0; k < 12; ++k) nodes.push_back(u(rng));
        std::sort(nodes.begin(), nodes.end());
        const auto line = share(make_interval_mesh(-1, 1, nodes));
        const FeFunction iv = nodal_interpolate(v, line);
        double tv_h = 0;
        for (Index c = 0; c < line->num_cells(); ++c) tv_h += line->measure(c) * std::abs(iv.gradient(c).x());
        double tv = 0;
        for (double j : heights) tv += std::abs(j);
        tv += w * 2.0 * 1.0;
        double tv_sampled = 0;
        std::vector<double> fine = nodes;
        for (int k = 0; k <= 20000; ++k) fine.push_back(-1 + 2.0 * k / 20000);
        std::sort(fine.begin(), fine.end());
        for (std::size_t k = 1; k < fine.size(); ++k)
            tv_sampled += std::abs(v(Vec2(fine[k], 0)) - v(Vec2(fine[k - 1], 0)));
        CHECK(tv_h <= tv_sampled + 1e-12);
        CHECK(tv_sampled <= tv + 1e-9);
    }
}

TEST_CASE("L2 errors") {
    const auto mesh = share(refined_square(3));
    const FeFunction zero(Space::P1, mesh, Eigen::VectorXd::Zero(mesh->num_vertices()));
    const DataFunction g = DataFunction::char_ball(Vec2::Zero(), 0.5);
    CHECK(l2_error(zero, g, &g.jump_set()).value == doctest::Approx(std::sqrt(M_PI) / 2).epsilon(1e-6));
    const auto step = [](const Vec2& x) { return x.x() > 0 ? 1.0 : 0.0; };
    const FeFunction p(Space::P0, mesh, Eigen::VectorXd::Zero(mesh->num_cells()));
    CHECK(l2_error(p, step).value == doctest::Approx(l2_error(p, step, nullptr, {}, ErrorVariant::Projected).value));
    CHECK(integrate(*mesh, [](Index, const Vec2&) { return 1.0; }) == doctest::Approx(4.0));
}

TEST_CASE("function text round trip") {
    const auto mesh = share(refined_square(1));
    const FeFunction u = cr_midpoint_interpolate([](const Vec2& x) { return x.x() * 0.1 + 1.0 / 3; }, mesh);
    std::stringstream ss;
    write_function(ss, u);
    const FeFunction back = read_function(ss, mesh);
    CHECK(back.space() == Space::CR);
    CHECK(back.dofs() == u.dofs());
    std::stringstream bad("CR 3\n0\n1\n");
    CHECK_THROWS_AS(read_function(bad, mesh), ParseError);
    CHECK(space_from_string(to_string(Space::RT0Cell)) == Space::RT0Cell);
    CHECK_THROWS(space_from_string("Q2"));
}
