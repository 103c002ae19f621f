#include "rof/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rof {

void RofProblem::validate() const {
    if (!(alpha > 0)) throw std::invalid_argument("RofProblem: alpha must be positive");
    if (!(epsilon >= 0)) throw std::invalid_argument("RofProblem: epsilon must be nonnegative");
    if (!dirichlet) throw std::invalid_argument("RofProblem: Dirichlet data missing");
}

double coefficient(double r, double alpha, int d, ExactVariant variant) {
    if (!(r > 0) || !(alpha > 0)) throw std::invalid_argument("coefficient: r and alpha must be positive");
    switch (variant) {
        case ExactVariant::BallD: return std::max(1.0 - d / (alpha * r), 0.0);
        case ExactVariant::TwoDisc: return std::max(1.0 - 2.0 / (alpha * r), 0.0);
        case ExactVariant::Sign1D: return std::max(1.0 - 1.0 / (r * alpha), 0.0);
    }
    throw std::invalid_argument("coefficient: unknown variant");
}

ExactSolution exact_single_disc(double r, double alpha, int d) {
    ExactSolution ex;
    ex.c = coefficient(r, alpha, d, ExactVariant::BallD);
    ex.example = "single_disc";
    const double c = ex.c;
    const double cp = std::min(1.0, r * alpha / d);
    const Vec2 center = Vec2::Zero();
    ex.u = [c, r, d](const Vec2& x) {
        const double n = d == 1 ? std::abs(x.x()) : x.norm();
        return n <= r ? c : 0.0;
    };
    ex.z = [cp, r, d](const Vec2& x) -> Vec2 {
        const Vec2 y = d == 1 ? Vec2(x.x(), 0.0) : x;
        const double n = y.norm();
        if (n <= r) return -cp * y / r;
        return -cp * r * y / (n * n);
    };
    ex.div_z = [cp, r, d](const Vec2& x) {
        const double n = d == 1 ? std::abs(x.x()) : x.norm();
        if (n <= r) return -cp * d / r;
        return -cp * r * (d - 2) / (n * n);
    };
    if (d == 1) {
        ex.jumps.points = {-r, r};
    } else {
        ex.jumps.circles.push_back({center, r});
    }
    return ex;
}

ExactSolution exact_two_disc(double r, double alpha, const AffineMap& phi) {
    ExactSolution ex;
    ex.c = coefficient(r, alpha, 2, ExactVariant::TwoDisc);
    ex.example = "two_disc";
    const DataFunction g = DataFunction::two_balls(r).transformed(phi);
    const double c = ex.c;
    ex.u = [g, c](const Vec2& x) { return c * g(x); };
    ex.jumps = g.jump_set();
    return ex;
}

ExactSolution exact_sign_1d(double r, double alpha) {
    ExactSolution ex;
    ex.c = coefficient(r, alpha, 1, ExactVariant::Sign1D);
    ex.example = "sign_1d";
    const double c = ex.c;
    ex.u = [c](const Vec2& x) { return x.x() > 0 ? c : (x.x() < 0 ? -c : 0.0); };
    ex.jumps.points = {0.0};
    return ex;
}

Energies energies(const FeFunction& u_h, const RofProblem& problem, const QuadratureOptions& opts) {
    const Mesh& mesh = u_h.mesh();
    const JumpSet& jumps = problem.g.jump_set();
    Energies e;
    std::vector<QuadPoint> pts;
    const double eps2 = problem.epsilon * problem.epsilon;
    double fid = 0.0, fid_proj = 0.0;
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        const double grad2 = u_h.gradient(c).squaredNorm();
        e.tv += mesh.measure(c) * std::sqrt(grad2);
        e.tv_eps += mesh.measure(c) * std::sqrt(grad2 + eps2);
        pts.clear();
        cell_quadrature(mesh, c, &jumps, opts, pts);
        double mean_g = 0.0;
        for (const auto& q : pts) {
            const double gv = problem.g(q.x);
            const double diff = u_h.value(c, q.x) - gv;
            fid += q.weight * diff * diff;
            mean_g += q.weight * gv;
        }
        mean_g /= mesh.measure(c);
        const double dp = u_h.cell_mean(c) - mean_g;
        fid_proj += mesh.measure(c) * dp * dp;
    }
    e.fidelity = 0.5 * problem.alpha * fid;
    e.fidelity_projected = 0.5 * problem.alpha * fid_proj;
    return e;
}

namespace {

// int over the boundary of u_D z.n with a Gauss rule per boundary side.
double boundary_term(const Mesh& mesh, const RofProblem& problem,
                     const std::function<double(Index, int, const Vec2&)>& normal_component) {
    double acc = 0.0;
    const QuadratureRule& rule = interval_rule(7);
    for (Index s = 0; s < mesh.num_sides(); ++s) {
        if (!mesh.is_boundary_side(s) || mesh.side_label(s) != kDirichletLabel) continue;
        const Index c = mesh.side_cells(s)[0];
        const auto& cs = mesh.cell_sides(c);
        const int i = cs[0] == s ? 0 : (cs[1] == s ? 1 : 2);
        if (mesh.dim() == 1) {
            const Vec2 x = mesh.vertex(mesh.side(s)[0]);
            acc += problem.dirichlet(x) * normal_component(c, i, x);
            continue;
        }
        const Vec2& a = mesh.vertex(mesh.side(s)[0]);
        const Vec2& b = mesh.vertex(mesh.side(s)[1]);
        const double len = mesh.side_measure(s);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 x = rule.points[q][0] * a + rule.points[q][1] * b;
            acc += rule.weights[q] * len * problem.dirichlet(x) * normal_component(c, i, x);
        }
    }
    return acc;
}

}  // namespace

DualEnergy dual_energy(const VectorField& z, const ScalarField& div_z, const RofProblem& problem, const Mesh& mesh,
                       const QuadratureOptions& opts) {
    JumpSet jumps = problem.g.jump_set();
    DualEnergy out;
    std::vector<QuadPoint> pts;
    double res = 0.0, gg = 0.0;
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        pts.clear();
        cell_quadrature(mesh, c, &jumps, opts, pts);
        for (const auto& q : pts) {
            const double gv = problem.g(q.x);
            const double r = div_z(q.x) + problem.alpha * gv;
            res += q.weight * r * r;
            gg += q.weight * gv * gv;
            out.max_modulus = std::max(out.max_modulus, z(q.x).norm());
        }
        for (int i = 0; i <= mesh.dim(); ++i)
            out.max_modulus = std::max(out.max_modulus, z(mesh.vertex(mesh.cell(c)[i])).norm());
    }
    out.admissible = out.max_modulus <= 1.0 + 1e-12;
    out.value = -res / (2 * problem.alpha) + 0.5 * problem.alpha * gg +
                boundary_term(mesh, problem, [&](Index c, int i, const Vec2& x) {
                    return z(x).dot(mesh.outer_normal(c, i));
                });
    out.regularized = out.value;
    return out;
}

DualEnergy dual_energy(const FeFunction& z_h, const RofProblem& problem, const QuadratureOptions& opts) {
    if (z_h.space() != Space::RT0Cell) throw std::invalid_argument("dual_energy: RT0Cell field expected");
    const Mesh& mesh = z_h.mesh();
    const JumpSet& jumps = problem.g.jump_set();
    const CellDataIntegrals data = integrate_data(mesh, problem.g, &jumps, opts);
    DualEnergy out;
    double res = 0.0, gg = 0.0, reg = 0.0;
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        const double area = mesh.measure(c);
        const double r = rt_divergence(z_h, c) + problem.alpha * data.mean[c];
        res += area * r * r;
        gg += area * data.mean[c] * data.mean[c];
        const double m = z_h.rt_constant(c).norm();
        out.max_modulus = std::max(out.max_modulus, m);
        reg += area * std::sqrt(std::max(0.0, 1.0 - m * m));
    }
    out.admissible = out.max_modulus <= 1.0 + 1e-12;
    // Boundary pairing with the CR trace of u_D: |S| u_D(S-average) (z.n)_S.
    double bnd = 0.0;
    const QuadratureRule& rule = interval_rule(7);
    for (Index s = 0; s < mesh.num_sides(); ++s) {
        if (!mesh.is_boundary_side(s) || mesh.side_label(s) != kDirichletLabel) continue;
        const Index c = mesh.side_cells(s)[0];
        const auto& cs = mesh.cell_sides(c);
        const int i = cs[0] == s ? 0 : (cs[1] == s ? 1 : 2);
        double avg = 0.0;
        if (mesh.dim() == 1) {
            avg = problem.dirichlet(mesh.vertex(mesh.side(s)[0]));
        } else {
            const Vec2& a = mesh.vertex(mesh.side(s)[0]);
            const Vec2& b = mesh.vertex(mesh.side(s)[1]);
            for (std::size_t q = 0; q < rule.size(); ++q)
                avg += rule.weights[q] * problem.dirichlet(rule.points[q][0] * a + rule.points[q][1] * b);
        }
        bnd += mesh.side_measure(s) * avg * rt_normal_component(z_h, c, i);
    }
    out.value = -res / (2 * problem.alpha) + 0.5 * problem.alpha * gg + bnd;
    out.regularized = out.value + problem.epsilon * reg;
    const Eigen::VectorXd jumps_n = normal_jumps(z_h);
    out.max_normal_jump = jumps_n.size() ? jumps_n.cwiseAbs().maxCoeff() : 0.0;
    return out;
}

double holder_quotient(double phi, double r, double theta) {
    if (!(phi > 0) || !(phi < M_PI / 2)) throw std::invalid_argument("holder_quotient: phi must lie in (0, pi/2)");
    if (!(theta > 0) || theta > 1) throw std::invalid_argument("holder_quotient: theta must lie in (0, 1]");
    if (!(r > 0)) throw std::invalid_argument("holder_quotient: r must be positive");
    // 1 - cos(phi) = 2 sin^2(phi/2) avoids cancellation for small phi.
    const double s = std::sin(0.5 * phi);
    return std::sin(phi) / std::pow(r * 2.0 * s * s, theta);
}

double holder_quotient_direct(double phi, double r, double theta) {
    if (!(phi > 0) || !(phi < M_PI / 2)) throw std::invalid_argument("holder_quotient: phi must lie in (0, pi/2)");
    if (!(theta > 0) || theta > 1) throw std::invalid_argument("holder_quotient: theta must lie in (0, 1]");
    if (!(r > 0)) throw std::invalid_argument("holder_quotient: r must be positive");
    const double s = std::sin(0.5 * phi);
    const double one_minus_cos = 2.0 * s * s;
    const Vec2 xp(r * one_minus_cos, r * std::sin(phi));
    const Vec2 xm(-r * one_minus_cos, r * std::sin(phi));
    const Vec2 zp(std::cos(phi), -std::sin(phi));
    const Vec2 zm(std::cos(phi), std::sin(phi));
    return (zp - zm).norm() / std::pow((xp - xm).norm(), theta);
}

}  // namespace rof
