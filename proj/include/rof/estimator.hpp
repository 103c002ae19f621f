#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rof/fem.hpp"
#include "rof/problem.hpp"
#include "rof/refine.hpp"
#include "rof/solver.hpp"

namespace rof {

enum class Scaling { Unscaled, Global, Local };

std::string to_string(Scaling s);
Scaling scaling_from_string(std::string_view name);

/// Cellwise RT-form dual field with its gamma bounds and an optional scaling.
/// Global scaling divides the coefficients by max gamma_T; local scaling
/// divides pointwise by the P1 function with nodal values max gamma_T over
/// the cells sharing the node.
struct DualField {
    FeFunction z;
    std::vector<double> gamma;
    Scaling mode = Scaling::Unscaled;
    double global_factor = 1.0;
    Eigen::VectorXd nodal_gamma;

    const Mesh& mesh() const { return z.mesh(); }
    Vec2 value(Index c, const Vec2& x) const;
    /// Pi_h of the field: its value at the barycenter.
    Vec2 center_value(Index c) const { return value(c, mesh().barycenter(c)); }
    double divergence(Index c, const Vec2& x) const;
};

/// z_h = grad u_h / |grad u_h|_eps + (alpha/d) Pi_h(u_h - g) (x - x_T).
/// Intended for the CR minimizer; any P1 or CR function is accepted.
DualField reconstruct_dual(const FeFunction& u_h, const RofProblem& problem, const CellDataIntegrals& data);
DualField reconstruct_dual(const FeFunction& u_h, const RofProblem& problem, const QuadratureOptions& opts = {});

/// gamma_T = 1 + (alpha/d) |Pi_h(u_h - g)(x_T)| d/(d+1) h_T = 1 + |b_T| d/(d+1) h_T.
std::vector<double> gamma_bounds(const FeFunction& z);

DualField scale_dual(const DualField& field, Scaling mode);

struct EtaParts {
    double tv = 0.0;        // int_T |grad u_h| - grad u_h . Pi_h q
    double residual = 0.0;  // 1/(2 alpha) int_T (div q - alpha (u_h - g_h))^2
    double total() const { return tv + residual; }
};

/// Indicator eta_T^2 with g_h = Pi_h g given as the cell mean `g_mean`.
EtaParts eta_cell(const FeFunction& u_h, const DualField& q, double alpha, double g_mean, Index c);

struct EstimatorBreakdown {
    std::vector<double> eta2;
    std::vector<double> eta2_tv;
    std::vector<double> eta2_residual;
    std::vector<double> osc2;
    double eta_total = 0.0;  // (sum eta_T^2)^{1/2}
    double osc_total = 0.0;  // (sum ||g - Pi_h g||_T^2)^{1/2}
    double E_est = 0.0;      // (2/alpha)^{1/2} eta_total + osc_total
};

EstimatorBreakdown estimate_total(const FeFunction& u_h, const DualField& q, const RofProblem& problem,
                                  const CellDataIntegrals& data);

/// Minimal set of cells, taken in descending order of the indicators (ties by
/// index), whose sum reaches `fraction` of the total.
RefinementMarks mark_cells(std::span<const double> indicators, double fraction);

struct AdaptiveLoopConfig {
    double fraction = 0.5;
    int levels = 10;
    /// Squared (eta_T^2) or root (eta_T) indicators in the bulk criterion.
    bool mark_squared = true;
    /// Space of u_h inside the indicators; CR ignores side jump terms.
    Space indicator_space = Space::P1;
    /// Estimator variant that drives the marking.
    Scaling driver = Scaling::Unscaled;
    /// Regularization as eps = eps_factor h^eps_power, stop at eps_stop_factor h^stop_power.
    double eps_factor = 1.0;
    double eps_power = 2.0;
    double eps_stop_factor = 1.0 / 20.0;
    double eps_stop_power = 2.0;
    FlowConfig flow;
    QuadratureOptions quadrature;
};

struct AdaptiveLevel {
    int level = 0;
    MeshStats stats;
    double epsilon = 0.0;
    double eps_stop = 0.0;
    double error_cr = 0.0;
    double error_p1 = 0.0;
    double error_pi_cr = 0.0;
    double error_pi_p1 = 0.0;
    int iterations_cr = 0;
    int iterations_p1 = 0;
    bool converged_cr = false;
    bool converged_p1 = false;
    EstimatorBreakdown estimator;  // unscaled
    double E_est_global = 0.0;
    double E_est_local = 0.0;
    /// log h_min / log h_avg on this level.
    double beta_emergent = 0.0;
    /// grading_strength over the levels so far (NaN until two levels exist).
    double beta_slope = 0.0;
    Index marked = 0;
    /// Fraction of marked cells within 2 h_max of the jump set.
    double marked_near_jump = 0.0;
    double max_center_modulus = 0.0;
    double max_divergence_defect = 0.0;
};

/// Solve CR and P1, reconstruct from CR, estimate, mark, refine. The exact
/// solution is used for error reporting only.
std::vector<AdaptiveLevel> adaptive_loop(const RofProblem& problem, const AdaptiveLoopConfig& config,
                                         const Mesh& initial, const ExactSolution& exact,
                                         const std::function<void(const AdaptiveLevel&)>& progress = {});

/// Columns: level, N_cells, N_vertices, h_min, h_avg, error_L2, eta_total,
/// osc_total, E_est, beta_emergent.
void write_level_csv_header(std::ostream& os);
void write_level_csv_row(std::ostream& os, int level, const MeshStats& stats, double error_l2, double eta_total,
                         double osc_total, double e_est, double beta_emergent);

}  // namespace rof
