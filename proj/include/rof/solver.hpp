#pragma once

#include <iosfwd>
#include <vector>

#include "rof/fem.hpp"
#include "rof/linalg.hpp"
#include "rof/problem.hpp"

namespace rof {

enum class LinearSolver { Cholesky, ConjugateGradient };

struct FlowConfig {
    double tau = 1.0;
    double eps_stop = 1e-6;
    /// Lower bound on the effective stopping tolerance; increments below
    /// about 1e-11 are dominated by round-off.
    double min_eps_stop = 1e-10;
    int max_iterations = 100000;
    double linear_tolerance = 1e-12;
    LinearSolver linear_solver = LinearSolver::Cholesky;

    void validate() const;
};

struct FlowState {
    FeFunction u;
    int iterations = 0;
    double last_increment = 0.0;
    bool converged = false;
    std::vector<double> energy;
    std::vector<double> increments;
};

/// Matrices and data of the semi-implicit scheme on one mesh and space:
///   (u^{k+1} - u^k, v)/tau + int grad u^{k+1} . grad v / |grad u^k|_eps
///     + alpha (Pi (u^{k+1} - g), Pi v) = 0
/// for test functions v vanishing on the Dirichlet boundary. Pi is the
/// identity for P1 and Pi_h for CR (unless `projected_fidelity` is off).
class FlowSystem {
public:
    FlowSystem(MeshPtr mesh, Space space, const RofProblem& problem, const QuadratureOptions& opts = {});

    Space space() const { return space_; }
    const MeshPtr& mesh_ptr() const { return mesh_; }
    const RofProblem& problem() const { return problem_; }
    bool projected() const { return projected_; }
    const std::vector<char>& dirichlet_mask() const { return is_dirichlet_; }
    const Eigen::VectorXd& dirichlet_values() const { return dirichlet_values_; }
    Index num_free() const { return static_cast<Index>(free_.size()); }
    const SparseOperator& mass() const { return mass_; }

    /// Interpolant of g with the Dirichlet dofs overwritten by the boundary data.
    FeFunction initial_iterate() const;
    /// Discrete energy consistent with the scheme: tv_eps + alpha/2 ||Pi(u - g)||^2.
    double energy(const FeFunction& u) const;
    /// L^2 norm of the difference of two iterates.
    double increment_norm(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
    /// One step of the scheme.
    FeFunction step(const FeFunction& u, const FlowConfig& config);

private:
    MeshPtr mesh_;
    Space space_;
    RofProblem problem_;
    bool projected_;
    std::vector<char> is_dirichlet_;
    Eigen::VectorXd dirichlet_values_;
    std::vector<Index> free_;
    std::vector<Index> free_index_;
    SparseOperator mass_;
    SparseOperator fid_mass_;
    Eigen::VectorXd rhs_g_;
    double g_norm2_ = 0.0;
    // Free-block operator with fixed pattern; slot_ maps each local (i, j)
    // entry of each cell to its position in the value array, or -1.
    SparseOperator system_;
    Eigen::VectorXd constant_values_;
    double cached_tau_ = -1.0;
    std::vector<int> slot_;
    SparseCholesky cholesky_;
};

/// Single step from u^k (convenience wrapper that builds a FlowSystem).
FeFunction flow_step(const FeFunction& u, const RofProblem& problem, const FlowConfig& config);

/// Iterates until ||u^k - u^{k-1}|| <= eps_stop or max_iterations.
FlowState run_flow(FlowSystem& system, const FeFunction& u0, const FlowConfig& config);
FlowState run_flow(const FeFunction& u0, const RofProblem& problem, const FlowConfig& config);

/// `iteration,increment,energy` rows.
void write_convergence_log(std::ostream& os, const FlowState& state);

}  // namespace rof
