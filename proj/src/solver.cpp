#include "rof/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace rof {

void FlowConfig::validate() const {
    if (!(tau > 0)) throw std::invalid_argument("FlowConfig: tau must be positive");
    if (!(min_eps_stop >= 0)) throw std::invalid_argument("FlowConfig: min_eps_stop must be nonnegative");
    if (!(eps_stop > 0)) throw std::invalid_argument("FlowConfig: eps_stop must be positive");
    if (max_iterations < 1) throw std::invalid_argument("FlowConfig: max_iterations must be at least 1");
    if (!(linear_tolerance > 0)) throw std::invalid_argument("FlowConfig: linear_tolerance must be positive");
}

namespace {

double side_average(const Mesh& mesh, Index s, const ScalarField& f) {
    if (mesh.dim() == 1) return f(mesh.vertex(mesh.side(s)[0]));
    const QuadratureRule& rule = interval_rule(7);
    const Vec2& a = mesh.vertex(mesh.side(s)[0]);
    const Vec2& b = mesh.vertex(mesh.side(s)[1]);
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) acc += rule.weights[q] * f(rule.points[q][0] * a + rule.points[q][1] * b);
    return acc;
}

}  // namespace

FlowSystem::FlowSystem(MeshPtr mesh, Space space, const RofProblem& problem, const QuadratureOptions& opts)
    : mesh_(std::move(mesh)), space_(space), problem_(problem) {
    if (space_ != Space::P1 && space_ != Space::CR) throw std::invalid_argument("FlowSystem: P1 or CR expected");
    problem_.validate();
    const Mesh& m = *mesh_;
    const int d = m.dim();
    const int nl = d + 1;
    projected_ = space_ == Space::CR && problem_.projected_fidelity;
    const Index n = num_entities(m, space_);

    is_dirichlet_.assign(n, 0);
    dirichlet_values_ = Eigen::VectorXd::Zero(n);
    for (Index s = 0; s < m.num_sides(); ++s) {
        if (!m.is_boundary_side(s) || m.side_label(s) != kDirichletLabel) continue;
        if (space_ == Space::CR) {
            is_dirichlet_[s] = 1;
            dirichlet_values_[s] = side_average(m, s, problem_.dirichlet);
        } else {
            for (Index v : m.side(s))
                if (v != kNone) {
                    is_dirichlet_[v] = 1;
                    dirichlet_values_[v] = problem_.dirichlet(m.vertex(v));
                }
        }
    }
    free_index_.assign(n, -1);
    for (Index i = 0; i < n; ++i)
        if (!is_dirichlet_[i]) {
            free_index_[i] = static_cast<Index>(free_.size());
            free_.push_back(i);
        }

    mass_ = assemble_mass(m, space_, MassVariant::Full);
    fid_mass_ = projected_ ? assemble_mass(m, space_, MassVariant::Projected) : mass_;

    const JumpSet& jumps = problem_.g.jump_set();
    const CellDataIntegrals data = integrate_data(m, problem_.g, &jumps, opts);
    rhs_g_ = Eigen::VectorXd::Zero(n);
    for (Index c = 0; c < m.num_cells(); ++c) {
        const auto dofs = local_dofs(m, c, space_);
        const double area = m.measure(c);
        for (int i = 0; i < nl; ++i) {
            double v;
            if (projected_) {
                v = area * data.mean[c] / nl;
            } else if (space_ == Space::P1) {
                v = data.p1_moments[c][i];
            } else {
                v = area * data.mean[c] - d * data.p1_moments[c][i];
            }
            rhs_g_[dofs[i]] += v;
        }
        g_norm2_ += projected_ ? area * data.mean[c] * data.mean[c] : data.square[c];
    }

    // Pattern of the free block.
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(m.num_cells()) * nl * nl);
    for (Index c = 0; c < m.num_cells(); ++c) {
        const auto dofs = local_dofs(m, c, space_);
        for (int i = 0; i < nl; ++i)
            for (int j = 0; j < nl; ++j) {
                const Index fi = free_index_[dofs[i]], fj = free_index_[dofs[j]];
                if (fi >= 0 && fj >= 0) trip.emplace_back(fi, fj, 1.0);
            }
    }
    const Index nf = num_free();
    system_.resize(nf, nf);
    system_.setFromTriplets(trip.begin(), trip.end());
    system_.makeCompressed();
    slot_.assign(static_cast<std::size_t>(m.num_cells()) * 9, -1);
    const int* outer = system_.outerIndexPtr();
    const int* inner = system_.innerIndexPtr();
    for (Index c = 0; c < m.num_cells(); ++c) {
        const auto dofs = local_dofs(m, c, space_);
        for (int i = 0; i < nl; ++i)
            for (int j = 0; j < nl; ++j) {
                const Index fi = free_index_[dofs[i]], fj = free_index_[dofs[j]];
                if (fi < 0 || fj < 0) continue;
                const int* begin = inner + outer[fj];
                const int* end = inner + outer[fj + 1];
                const int* pos = std::lower_bound(begin, end, fi);
                slot_[9 * c + 3 * i + j] = static_cast<int>(pos - inner);
            }
    }
}

FeFunction FlowSystem::initial_iterate() const {
    const ScalarField g = [this](const Vec2& x) { return problem_.g(x); };
    FeFunction u0 = space_ == Space::P1 ? nodal_interpolate(g, mesh_) : cr_interpolate(g, mesh_);
    Eigen::VectorXd dofs = u0.dofs();
    for (Index i = 0; i < dofs.size(); ++i)
        if (is_dirichlet_[i]) dofs[i] = dirichlet_values_[i];
    return {space_, mesh_, std::move(dofs)};
}

double FlowSystem::energy(const FeFunction& u) const {
    const Mesh& m = *mesh_;
    const double eps2 = problem_.epsilon * problem_.epsilon;
    double tv = 0.0;
    for (Index c = 0; c < m.num_cells(); ++c) tv += m.measure(c) * std::sqrt(u.gradient(c).squaredNorm() + eps2);
    const Eigen::VectorXd& x = u.dofs();
    const double fid = x.dot(fid_mass_ * x) - 2.0 * x.dot(rhs_g_) + g_norm2_;
    return tv + 0.5 * problem_.alpha * std::max(fid, 0.0);
}

double FlowSystem::increment_norm(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    const Eigen::VectorXd d = a - b;
    return std::sqrt(std::max(0.0, d.dot(mass_ * d)));
}

FeFunction FlowSystem::step(const FeFunction& u, const FlowConfig& config) {
    config.validate();
    if (u.space() != space_ || &u.mesh() != mesh_.get()) throw std::invalid_argument("FlowSystem::step: iterate mismatch");
    const Mesh& m = *mesh_;
    const int nl = m.dim() + 1;
    const double alpha = problem_.alpha;
    const double eps2 = problem_.epsilon * problem_.epsilon;
    const double tau = config.tau;
    const Eigen::VectorXd& x = u.dofs();
    const Index n = static_cast<Index>(x.size());

    if (tau != cached_tau_) {
        constant_values_ = Eigen::VectorXd::Zero(system_.nonZeros());
        for (Index c = 0; c < m.num_cells(); ++c) {
            const Eigen::Matrix3d mloc = local_mass(m, c, space_, MassVariant::Full);
            const Eigen::Matrix3d floc = projected_ ? local_mass(m, c, space_, MassVariant::Projected) : mloc;
            for (int i = 0; i < nl; ++i)
                for (int j = 0; j < nl; ++j) {
                    const int s = slot_[9 * c + 3 * i + j];
                    if (s >= 0) constant_values_[s] += mloc(i, j) / tau + alpha * floc(i, j);
                }
        }
        cached_tau_ = tau;
    }

    Eigen::VectorXd rhs = (mass_ * x) / tau + alpha * rhs_g_;
    double* values = system_.valuePtr();
    std::copy(constant_values_.data(), constant_values_.data() + constant_values_.size(), values);
    for (Index c = 0; c < m.num_cells(); ++c) {
        const double w = std::sqrt(u.gradient(c).squaredNorm() + eps2);
        if (!(w > 0.0)) throw NumericalError("flow step: vanishing weight, epsilon must be positive");
        const auto dofs = local_dofs(m, c, space_);
        const Eigen::Matrix3d k = local_stiffness(m, c, space_) / w;
        bool has_dirichlet = false;
        for (int i = 0; i < nl; ++i) has_dirichlet |= is_dirichlet_[dofs[i]] != 0;
        Eigen::Matrix3d full = k;
        if (has_dirichlet) {
            const Eigen::Matrix3d mloc = local_mass(m, c, space_, MassVariant::Full);
            const Eigen::Matrix3d floc = projected_ ? local_mass(m, c, space_, MassVariant::Projected) : mloc;
            full += mloc / tau + alpha * floc;
        }
        for (int i = 0; i < nl; ++i)
            for (int j = 0; j < nl; ++j) {
                const int s = slot_[9 * c + 3 * i + j];
                if (s >= 0) {
                    values[s] += k(i, j);
                } else if (!is_dirichlet_[dofs[i]] && is_dirichlet_[dofs[j]]) {
                    rhs[dofs[i]] -= full(i, j) * x[dofs[j]];
                }
            }
    }

    const Index nf = num_free();
    Eigen::VectorXd b(nf);
    for (Index f = 0; f < nf; ++f) b[f] = rhs[free_[f]];
    Eigen::VectorXd sol;
    if (config.linear_solver == LinearSolver::Cholesky) {
        // Symmetric diagonal scaling keeps the factorization stable under
        // the large weight contrast of strongly graded meshes.
        Eigen::VectorXd scale(nf);
        const int* outer = system_.outerIndexPtr();
        const int* inner = system_.innerIndexPtr();
        for (Index col = 0; col < nf; ++col)
            for (int k = outer[col]; k < outer[col + 1]; ++k)
                if (inner[k] == col) scale[col] = 1.0 / std::sqrt(values[k]);
        for (Index col = 0; col < nf; ++col)
            for (int k = outer[col]; k < outer[col + 1]; ++k) values[k] *= scale[inner[k]] * scale[col];
        if (!cholesky_.analyzed()) cholesky_.analyze(system_);
        cholesky_.factorize(system_);
        sol = scale.cwiseProduct(cholesky_.solve(scale.cwiseProduct(b)));
    } else {
        Eigen::VectorXd guess(nf);
        for (Index f = 0; f < nf; ++f) guess[f] = x[free_[f]];
        sol = solve_spd(system_, b, config.linear_tolerance, &guess);
    }
    Eigen::VectorXd next = x;
    for (Index f = 0; f < nf; ++f) next[free_[f]] = sol[f];
    for (Index i = 0; i < n; ++i)
        if (!std::isfinite(next[i])) throw NumericalError("flow step: non-finite iterate");
    return {space_, mesh_, std::move(next)};
}

FeFunction flow_step(const FeFunction& u, const RofProblem& problem, const FlowConfig& config) {
    FlowSystem system(u.mesh_ptr(), u.space(), problem);
    return system.step(u, config);
}

FlowState run_flow(FlowSystem& system, const FeFunction& u0, const FlowConfig& config) {
    config.validate();
    FlowState state{u0, 0, 0.0, false, {}, {}};
    state.energy.push_back(system.energy(u0));
    while (state.iterations < config.max_iterations) {
        FeFunction next = system.step(state.u, config);
        state.last_increment = system.increment_norm(next.dofs(), state.u.dofs());
        state.u = std::move(next);
        ++state.iterations;
        state.energy.push_back(system.energy(state.u));
        state.increments.push_back(state.last_increment);
        if (state.last_increment <= std::max(config.eps_stop, config.min_eps_stop)) {
            state.converged = true;
            break;
        }
    }
    return state;
}

FlowState run_flow(const FeFunction& u0, const RofProblem& problem, const FlowConfig& config) {
    FlowSystem system(u0.mesh_ptr(), u0.space(), problem);
    return run_flow(system, u0, config);
}

void write_convergence_log(std::ostream& os, const FlowState& state) {
    os << "iteration,increment,energy\n";
    char buf[96];
    for (std::size_t k = 0; k < state.energy.size(); ++k) {
        const double inc = k == 0 ? 0.0 : state.increments[k - 1];
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", k, inc, state.energy[k]);
        os << buf;
    }
}

}  // namespace rof
