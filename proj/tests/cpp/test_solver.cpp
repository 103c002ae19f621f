#include <doctest.h>

#include <cmath>
#include <Eigen/Dense>
#include <sstream>

#include "helpers.hpp"

using namespace rof;
using namespace rof::test;

TEST_CASE("solve_spd") {
    Eigen::SparseMatrix<double> I(5, 5);
    I.setIdentity();
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(5, 1, 5);
    CHECK((solve_spd(I, b) - b).norm() < 1e-14);

    std::mt19937 rng(11);
    std::normal_distribution<double> n;
    Eigen::MatrixXd B(50, 50);
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j) B(i, j) = n(rng);
    const Eigen::MatrixXd A = B * B.transpose() + 50.0 * Eigen::MatrixXd::Identity(50, 50);
    Eigen::VectorXd rhs(50);
    for (int i = 0; i < 50; ++i) rhs[i] = n(rng);
    const Eigen::VectorXd oracle = A.llt().solve(rhs);
    const Eigen::SparseMatrix<double> As = A.sparseView();
    for (int threshold : {0, 500}) {
        SolveReport rep;
        const Eigen::VectorXd x = solve_spd(As, rhs, 1e-13, nullptr, &rep, threshold);
        CHECK((x - oracle).norm() / oracle.norm() < 1e-10);
        CHECK(rep.dense == (threshold == 500));
    }
    SparseCholesky chol;
    chol.analyze(As);
    chol.factorize(As);
    CHECK((chol.solve(rhs) - oracle).norm() / oracle.norm() < 1e-10);

    Eigen::SparseMatrix<double> S = As;
    S.prune([](Index i, Index j, double) { return i != 3 && j != 3; });
    CHECK_THROWS_AS(solve_spd(S, rhs), NumericalError);
    CHECK_THROWS_AS(solve_spd(S, rhs, 1e-12, nullptr, nullptr, 0), NumericalError);
}

TEST_CASE("flow fixed point and single step") {
    const std::vector<double> nodes{-1, 0, 1};
    const auto line = share(make_interval_mesh(-1, 1, nodes));
    RofProblem zero;
    zero.g = DataFunction::custom([](const Vec2&) { return 0.0; });
    zero.epsilon = 0.1;
    FlowConfig cfg;
    const FeFunction u0(Space::P1, line, Eigen::VectorXd::Zero(3));
    CHECK(flow_step(u0, zero, cfg).dofs().norm() == 0.0);

    RofProblem pb;
    pb.alpha = 3.0;
    pb.epsilon = 0.1;
    pb.g = DataFunction::custom([](const Vec2&) { return 1.0; });
    Eigen::VectorXd d = Eigen::VectorXd::Zero(3);
    Index mid = 0;
    for (Index v = 0; v < 3; ++v)
        if (line->vertex(v).x() == 0.0) mid = v;
    d[mid] = 0.5;
    cfg.tau = 0.7;
    const FeFunction u1 = flow_step(FeFunction(Space::P1, line, d), pb, cfg);
    const double m = 2.0 / 3.0;
    const double k = 2.0 / std::sqrt(0.25 + 0.01);
    const double expect = (m * 0.5 / 0.7 + 3.0 * 1.0) / (m / 0.7 + k + 3.0 * m);
    CHECK(u1.dofs()[mid] == doctest::Approx(expect).epsilon(1e-14));
    for (Index v = 0; v < 3; ++v)
        if (v != mid) CHECK(u1.dofs()[v] == 0.0);
}

TEST_CASE("large stopping tolerance returns after one step") {
    const auto mesh = share(refined_square(2));
    RofProblem pb;
    pb.epsilon = 0.1;
    FlowConfig cfg;
    cfg.eps_stop = 1e6;
    const FlowState st = run_flow(nodal_interpolate(pb.g, mesh), pb, cfg);
    CHECK(st.iterations == 1);
    CHECK(st.converged);
    std::stringstream ss;
    write_convergence_log(ss, st);
    std::string header;
    std::getline(ss, header);
    CHECK(header == "iteration,increment,energy");
}

TEST_CASE("flow energy decreases on random starts") {
    for (unsigned seed = 1; seed <= 20; ++seed) {
        std::mt19937 rng(seed);
        std::normal_distribution<double> n;
        const Space space = seed % 2 ? Space::CR : Space::P1;
        const auto mesh = share(perturbed_square(2 + seed % 2, rng));
        RofProblem pb;
        pb.epsilon = 0.01 + 0.1 * (seed % 3);
        pb.alpha = 1.0 + seed;
        FlowSystem sys(mesh, space, pb);
        Eigen::VectorXd d = sys.initial_iterate().dofs();
        for (Index i = 0; i < d.size(); ++i)
            if (!sys.dirichlet_mask()[i]) d[i] += n(rng);
        FeFunction u(space, mesh, d);
        FlowConfig cfg;
        cfg.tau = 0.5 + seed % 4;
        double e = sys.energy(u);
        for (int k = 0; k < 15; ++k) {
            u = sys.step(u, cfg);
            const double e1 = sys.energy(u);
            CHECK(e1 <= e + 1e-12 * std::abs(e));
            e = e1;
        }
    }
}

TEST_CASE("flow energy history is monotone on a graded mesh") {
    const DataFunction g = DataFunction::char_ball(Vec2::Zero(), 0.5);
    const auto mesh = share(grade_towards_set(make_square_mesh(1.0), g.jump_set(), 6).back());
    const double h = mesh_stats(*mesh).h_avg;
    RofProblem pb;
    pb.epsilon = h * h;
    for (Space s : {Space::P1, Space::CR}) {
        FlowSystem sys(mesh, s, pb);
        FlowConfig cfg;
        cfg.eps_stop = h * h / 20;
        const FlowState st = run_flow(sys, sys.initial_iterate(), cfg);
        CHECK(st.converged);
        for (std::size_t k = 1; k < st.energy.size(); ++k) CHECK(st.energy[k] <= st.energy[k - 1] + 1e-12);
    }
}

namespace {

/// Newton minimization of the regularized 1D P1 functional with dense Hessians.
Eigen::VectorXd newton_oracle(const Mesh& m, const RofProblem& pb, const FlowSystem& sys, Eigen::VectorXd u) {
    const SparseOperator M = assemble_mass(m, Space::P1);
    const CellDataIntegrals data = integrate_data(m, pb.g, &pb.g.jump_set());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m.num_vertices());
    for (Index c = 0; c < m.num_cells(); ++c)
        for (int i = 0; i < 2; ++i) b[m.cell(c)[i]] += data.p1_moments[c][i];
    const double e2 = pb.epsilon * pb.epsilon;
    for (int it = 0; it < 100; ++it) {
        Eigen::VectorXd grad = pb.alpha * (M * u - b);
        Eigen::MatrixXd H = pb.alpha * Eigen::MatrixXd(M);
        for (Index c = 0; c < m.num_cells(); ++c) {
            const Index a = m.cell(c)[0], bb = m.cell(c)[1];
            const double len = m.measure(c);
            const double s = (u[bb] - u[a]) / len;
            const double w = std::sqrt(s * s + e2);
            const double gs = s / w;
            const double hs = e2 / (w * w * w) / len;
            grad[bb] += gs;
            grad[a] -= gs;
            H(bb, bb) += hs;
            H(a, a) += hs;
            H(a, bb) -= hs;
            H(bb, a) -= hs;
        }
        for (Index i = 0; i < u.size(); ++i)
            if (sys.dirichlet_mask()[i]) {
                grad[i] = 0;
                H.row(i).setZero();
                H.col(i).setZero();
                H(i, i) = 1;
            }
        const Eigen::VectorXd step = H.ldlt().solve(grad);
        double t = 1.0;
        const auto energy = [&](const Eigen::VectorXd& v) { return sys.energy(FeFunction(Space::P1, sys.mesh_ptr(), v)); };
        const double e0 = energy(u);
        while (energy(u - t * step) > e0 && t > 1e-12) t *= 0.5;
        u -= t * step;
        if (step.norm() < 1e-14) break;
    }
    return u;
}

}  // namespace

TEST_CASE("1D flow limit matches direct minimization") {
    const ExactSolution ex = exact_sign_1d(2.0, 10.0);
    const auto mesh = share(graded_interval_mesh(1.0, 8, 2.0));
    RofProblem pb;
    pb.g = DataFunction::sign_1d();
    pb.dirichlet = ex.u;
    const double h = mesh_stats(*mesh).h_avg;
    pb.epsilon = h * h;
    FlowSystem sys(mesh, Space::P1, pb);
    FlowConfig cfg;
    cfg.eps_stop = h * h * h / 20;
    const FlowState st = run_flow(sys, sys.initial_iterate(), cfg);
    REQUIRE(st.converged);
    const Eigen::VectorXd oracle = newton_oracle(*mesh, pb, sys, st.u.dofs());
    CHECK(sys.increment_norm(oracle, st.u.dofs()) <= 10 * cfg.eps_stop);
}
