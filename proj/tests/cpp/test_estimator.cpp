#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "helpers.hpp"

using namespace rof;
using namespace rof::test;

namespace {

DualField zero_field(const MeshPtr& mesh) {
    const FeFunction z(Space::RT0Cell, mesh, Eigen::VectorXd::Zero(3 * mesh->num_cells()));
    DualField f{z, gamma_bounds(z), Scaling::Unscaled, 1.0, {}};
    return f;
}

}  // namespace

TEST_CASE("reconstruction of a constant state") {
    const auto t = share(reference_triangle());
    RofProblem pb;
    pb.alpha = 4.0;
    pb.g = DataFunction::custom([](const Vec2&) { return 0.25; });
    const FeFunction u(Space::CR, t, Eigen::VectorXd::Constant(3, 1.0));
    const DualField z = reconstruct_dual(u, pb);
    CHECK(z.z.rt_constant(0).norm() == 0.0);
    CHECK(z.z.rt_slope(0) == doctest::Approx(4.0 / 2 * 0.75).epsilon(1e-14));
    CHECK(rt_divergence(z.z, 0) == doctest::Approx(4.0 * 0.75).epsilon(1e-14));

    pb.g = DataFunction::custom([](const Vec2&) { return 1.0; });
    const DualField z1 = reconstruct_dual(u, pb);
    CHECK(z1.gamma[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("reconstruction identities on a converged CR solution") {
    const DataFunction g = DataFunction::char_ball(Vec2::Zero(), 0.5);
    const auto mesh = share(grade_towards_set(make_square_mesh(1.0), g.jump_set(), 5).back());
    RofProblem pb;
    pb.epsilon = 1e-3;
    FlowSystem sys(mesh, Space::CR, pb);
    FlowConfig cfg;
    cfg.eps_stop = 1e-9;
    const FlowState st = run_flow(sys, sys.initial_iterate(), cfg);
    const CellDataIntegrals data = integrate_data(*mesh, g, &g.jump_set());
    const DualField z = reconstruct_dual(st.u, pb, data);
    const DualField zg = scale_dual(z, Scaling::Global);
    for (Index c = 0; c < mesh->num_cells(); ++c) {
        CHECK(z.center_value(c).norm() <= 1 + 1e-12);
        CHECK(std::abs(rt_divergence(z.z, c) - pb.alpha * (st.u.cell_mean(c) - data.mean[c])) < 1e-14 * pb.alpha);
        for (int k = 0; k < 3; ++k) {
            const Vec2 p = mesh->vertex(mesh->cell(c)[k]);
            CHECK(z.value(c, p).norm() <= z.gamma[c] + 1e-12);
            CHECK(zg.value(c, p).norm() <= 1 + 1e-12);
        }
    }
}

TEST_CASE("gamma excess shrinks linearly with h at fixed misfit") {
    RofProblem pb;
    pb.alpha = 10;
    pb.g = DataFunction::custom([](const Vec2&) { return 0.0; });
    std::vector<double> excess, h;
    for (int k = 1; k <= 5; ++k) {
        const auto mesh = share(refined_square(k));
        const FeFunction u = cr_midpoint_interpolate([](const Vec2&) { return 0.3; }, mesh);
        const DualField z = reconstruct_dual(u, pb);
        excess.push_back(*std::max_element(z.gamma.begin(), z.gamma.end()) - 1);
        h.push_back(mesh_stats(*mesh).h_max);
    }
    CHECK(eoc_fit(excess, h, 5) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("scaling variants") {
    const auto mesh = share(make_square_mesh(1.0));
    DualField f = zero_field(mesh);
    CHECK(scale_dual(f, Scaling::Global).global_factor == 1.0);
    f.gamma = {1.0, 1.2};
    const DualField loc = scale_dual(f, Scaling::Local);
    for (Index v = 0; v < mesh->num_vertices(); ++v) {
        int in0 = 0, in1 = 0;
        for (int k = 0; k < 3; ++k) {
            in0 += mesh->cell(0)[k] == v;
            in1 += mesh->cell(1)[k] == v;
        }
        const double expect = in1 ? 1.2 : 1.0;
        CHECK(loc.nodal_gamma[v] == expect);
        (void)in0;
    }
    CHECK(scale_dual(f, Scaling::Global).global_factor == 1.2);
    CHECK(scaling_from_string(to_string(Scaling::Local)) == Scaling::Local);
}

TEST_CASE("cell indicators") {
    const auto t = share(reference_triangle());
    const DualField q = zero_field(t);
    const FeFunction c(Space::P1, t, Eigen::VectorXd::Constant(3, 0.7));
    CHECK(eta_cell(c, q, 3.0, 0.7, 0).total() == doctest::Approx(0.0));

    Eigen::VectorXd d(3);
    for (int k = 0; k < 3; ++k) d[k] = t->vertex(t->cell(0)[k]).x();
    const FeFunction x1(Space::P1, t, d);
    const EtaParts e = eta_cell(x1, q, 2.0, 0.0, 0);
    CHECK(e.tv == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(e.residual == doctest::Approx(1.0 / 12).epsilon(1e-14));
    CHECK(e.total() == doctest::Approx(7.0 / 12).epsilon(1e-14));

    Eigen::VectorXd a(3);
    a << 1.0, 0.0, 0.0;
    DualField aligned{FeFunction(Space::RT0Cell, t, a), {1.0}, Scaling::Unscaled, 1.0, {}};
    const EtaParts e2 = eta_cell(x1, aligned, 2.0, 1.0 / 3, 0);
    CHECK(std::abs(e2.tv) < 1e-15);
}

TEST_CASE("oscillation vanishes for mesh aligned data") {
    const auto mesh = share(refined_square(2));
    RofProblem pb;
    pb.g = DataFunction::custom([](const Vec2& x) { return x.x() > 0 ? 1.0 : -0.5; });
    const CellDataIntegrals data = integrate_data(*mesh, pb.g, nullptr);
    const FeFunction u(Space::P1, mesh, Eigen::VectorXd::Zero(mesh->num_vertices()));
    const EstimatorBreakdown b = estimate_total(u, zero_field(mesh), pb, data);
    CHECK(b.osc_total < 1e-7);
}

TEST_CASE("bulk marking") {
    const std::vector<double> v{4, 3, 2, 1};
    const RefinementMarks m = mark_cells(v, 0.5);
    CHECK(m.cells == std::vector<Index>{0, 1});
    const std::vector<double> w{0, 2, 0, 1};
    CHECK(mark_cells(w, 1.0).cells == std::vector<Index>{1, 3});
    CHECK_THROWS(mark_cells(v, 0.0));
    CHECK_THROWS(mark_cells(v, 1.5));
    const std::vector<double> neg{1, -1};
    CHECK_THROWS(mark_cells(neg, 0.5));

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + trial % 12;
        std::vector<double> ind(n);
        for (auto& x : ind) x = u(rng);
        const double theta = 0.2 + 0.7 * u(rng);
        const RefinementMarks mk = mark_cells(ind, theta);
        const double total = std::accumulate(ind.begin(), ind.end(), 0.0);
        double sum = 0;
        for (Index c : mk.cells) sum += ind[c];
        CHECK(sum >= theta * total * (1 - 1e-14));
        std::size_t best = n;
        for (int mask = 1; mask < (1 << n); ++mask) {
            double s = 0;
            for (int i = 0; i < n; ++i)
                if (mask >> i & 1) s += ind[i];
            if (s >= theta * total) best = std::min<std::size_t>(best, __builtin_popcount(mask));
        }
        CHECK(mk.size() == best);
        const double without_last = sum - ind[mk.cells.back()];
        CHECK(without_last < theta * total);
    }
}

TEST_CASE("estimator is reliable on graded meshes") {
    const ExactSolution ex = exact_single_disc(0.5, 10, 2);
    const auto seq = grade_towards_set(make_square_mesh(1.0), ex.jumps, 7);
    for (int k = 2; k <= 7; ++k) {
        const auto mesh = share(seq[k]);
        const double h = mesh_stats(*mesh).h_avg;
        RofProblem pb;
        pb.epsilon = h * h;
        FlowConfig cfg;
        cfg.eps_stop = h * h / 20;
        FlowSystem cr(mesh, Space::CR, pb), p1(mesh, Space::P1, pb);
        const FlowState scr = run_flow(cr, cr.initial_iterate(), cfg);
        const FlowState sp1 = run_flow(p1, p1.initial_iterate(), cfg);
        const CellDataIntegrals data = integrate_data(*mesh, pb.g, &ex.jumps);
        const DualField z = reconstruct_dual(scr.u, pb, data);
        const EstimatorBreakdown b = estimate_total(sp1.u, z, pb, data);
        CHECK(l2_error(sp1.u, ex.u, &ex.jumps).value <= b.E_est);
    }
}

TEST_CASE("adaptive loop concentrates refinement at the circle") {
    const ExactSolution ex = exact_single_disc(0.5, 10, 2);
    RofProblem pb;
    AdaptiveLoopConfig cfg;
    cfg.levels = 10;
    int streamed = 0;
    const auto levels = adaptive_loop(pb, cfg, make_square_mesh(1.0), ex, [&](const AdaptiveLevel&) { ++streamed; });
    REQUIRE(levels.size() == 10);
    CHECK(streamed == 10);
    for (std::size_t k = 4; k + 1 < levels.size(); ++k) CHECK(levels[k].marked_near_jump >= 0.8);
    for (std::size_t k = 1; k < levels.size(); ++k) {
        CHECK(levels[k].stats.num_cells > levels[k - 1].stats.num_cells);
        CHECK(levels[k].max_center_modulus <= 1 + 1e-12);
        CHECK(levels[k].max_divergence_defect <= 1e-13);
    }
    CHECK(levels.back().estimator.E_est < levels.front().estimator.E_est);

    AdaptiveLoopConfig full = cfg;
    full.levels = 3;
    full.fraction = 1.0;
    const auto uni = adaptive_loop(pb, full, make_square_mesh(1.0), ex);
    CHECK(uni[1].stats.num_cells == 8);
    CHECK(uni[2].stats.num_cells == 32);
}
