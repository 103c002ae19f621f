#include "rof/estimator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

namespace rof {

std::string to_string(Scaling s) {
    switch (s) {
        case Scaling::Unscaled: return "unscaled";
        case Scaling::Global: return "global";
        case Scaling::Local: return "local";
    }
    return "unscaled";
}

Scaling scaling_from_string(std::string_view name) {
    std::string lower(name);
    for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (lower == "unscaled") return Scaling::Unscaled;
    if (lower == "global") return Scaling::Global;
    if (lower == "local") return Scaling::Local;
    throw std::invalid_argument("unknown scaling `" + std::string(name) + "`");
}

namespace {

double local_gamma(const DualField& f, Index c, const Vec2& x) {
    const Mesh& mesh = f.mesh();
    const auto l = barycentric(mesh, c, x);
    double g = 0.0;
    for (int i = 0; i <= mesh.dim(); ++i) g += l[i] * f.nodal_gamma[mesh.cell(c)[i]];
    return g;
}

Vec2 local_gamma_gradient(const DualField& f, Index c) {
    const Mesh& mesh = f.mesh();
    Vec2 g = Vec2::Zero();
    for (int i = 0; i <= mesh.dim(); ++i) g += f.nodal_gamma[mesh.cell(c)[i]] * mesh.lambda_gradient(c, i);
    return g;
}

}  // namespace

Vec2 DualField::value(Index c, const Vec2& x) const {
    const Vec2 v = z.vector_value(c, x);
    switch (mode) {
        case Scaling::Unscaled: return v;
        case Scaling::Global: return v / global_factor;
        case Scaling::Local: return v / local_gamma(*this, c, x);
    }
    return v;
}

double DualField::divergence(Index c, const Vec2& x) const {
    const double div = rt_divergence(z, c);
    switch (mode) {
        case Scaling::Unscaled: return div;
        case Scaling::Global: return div / global_factor;
        case Scaling::Local: {
            const double g = local_gamma(*this, c, x);
            return div / g - z.vector_value(c, x).dot(local_gamma_gradient(*this, c)) / (g * g);
        }
    }
    return div;
}

std::vector<double> gamma_bounds(const FeFunction& z) {
    const Mesh& mesh = z.mesh();
    const int d = mesh.dim();
    std::vector<double> gamma(mesh.num_cells());
    for (Index c = 0; c < mesh.num_cells(); ++c)
        gamma[c] = 1.0 + std::abs(z.rt_slope(c)) * d / (d + 1.0) * mesh.diameter(c);
    return gamma;
}

DualField reconstruct_dual(const FeFunction& u_h, const RofProblem& problem, const CellDataIntegrals& data) {
    const Mesh& mesh = u_h.mesh();
    const int d = mesh.dim();
    const double eps2 = problem.epsilon * problem.epsilon;
    Eigen::VectorXd dofs((d + 1) * mesh.num_cells());
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        const Vec2 grad = u_h.gradient(c);
        const double w = std::sqrt(grad.squaredNorm() + eps2);
        const Vec2 a = w > 0 ? Vec2(grad / w) : Vec2::Zero();
        for (int k = 0; k < d; ++k) dofs[(d + 1) * c + k] = a[k];
        dofs[(d + 1) * c + d] = problem.alpha / d * (u_h.cell_mean(c) - data.mean[c]);
    }
    DualField f{FeFunction(Space::RT0Cell, u_h.mesh_ptr(), std::move(dofs)), {}, Scaling::Unscaled, 1.0, {}};
    f.gamma = gamma_bounds(f.z);
    return f;
}

DualField reconstruct_dual(const FeFunction& u_h, const RofProblem& problem, const QuadratureOptions& opts) {
    const JumpSet& jumps = problem.g.jump_set();
    return reconstruct_dual(u_h, problem, integrate_data(u_h.mesh(), problem.g, &jumps, opts));
}

DualField scale_dual(const DualField& field, Scaling mode) {
    DualField out = field;
    out.mode = mode;
    out.global_factor = 1.0;
    out.nodal_gamma.resize(0);
    const Mesh& mesh = field.mesh();
    if (mode == Scaling::Global) {
        out.global_factor = *std::max_element(field.gamma.begin(), field.gamma.end());
    } else if (mode == Scaling::Local) {
        out.nodal_gamma = Eigen::VectorXd::Ones(mesh.num_vertices());
        for (Index c = 0; c < mesh.num_cells(); ++c)
            for (int i = 0; i <= mesh.dim(); ++i) {
                double& g = out.nodal_gamma[mesh.cell(c)[i]];
                g = std::max(g, field.gamma[c]);
            }
    }
    return out;
}

EtaParts eta_cell(const FeFunction& u_h, const DualField& q, double alpha, double g_mean, Index c) {
    const Mesh& mesh = u_h.mesh();
    EtaParts parts;
    const Vec2 grad = u_h.gradient(c);
    parts.tv = mesh.measure(c) * (grad.norm() - grad.dot(q.center_value(c)));
    QuadratureOptions opts;
    opts.degree = q.mode == Scaling::Local ? 5 : 2;
    std::vector<QuadPoint> pts;
    cell_quadrature(mesh, c, nullptr, opts, pts);
    double acc = 0.0;
    for (const auto& p : pts) {
        const double r = q.divergence(c, p.x) - alpha * (u_h.value(c, p.x) - g_mean);
        acc += p.weight * r * r;
    }
    parts.residual = acc / (2.0 * alpha);
    return parts;
}

EstimatorBreakdown estimate_total(const FeFunction& u_h, const DualField& q, const RofProblem& problem,
                                  const CellDataIntegrals& data) {
    const Mesh& mesh = u_h.mesh();
    const Index n = mesh.num_cells();
    EstimatorBreakdown b;
    b.eta2.resize(n);
    b.eta2_tv.resize(n);
    b.eta2_residual.resize(n);
    b.osc2.resize(n);
    double eta_sum = 0.0, osc_sum = 0.0;
    for (Index c = 0; c < n; ++c) {
        const EtaParts p = eta_cell(u_h, q, problem.alpha, data.mean[c], c);
        b.eta2_tv[c] = p.tv;
        b.eta2_residual[c] = p.residual;
        b.eta2[c] = p.total();
        b.osc2[c] = std::max(0.0, data.square[c] - mesh.measure(c) * data.mean[c] * data.mean[c]);
        eta_sum += b.eta2[c];
        osc_sum += b.osc2[c];
    }
    b.eta_total = std::sqrt(std::max(0.0, eta_sum));
    b.osc_total = std::sqrt(osc_sum);
    b.E_est = std::sqrt(2.0 / problem.alpha * std::max(0.0, eta_sum)) + b.osc_total;
    return b;
}

RefinementMarks mark_cells(std::span<const double> indicators, double fraction) {
    if (!(fraction > 0) || fraction > 1) throw std::invalid_argument("mark_cells: fraction must lie in (0, 1]");
    for (double v : indicators)
        if (!std::isfinite(v) || v < 0) throw std::invalid_argument("mark_cells: indicators must be finite and nonnegative");
    std::vector<Index> order(indicators.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return indicators[a] > indicators[b]; });
    double total = 0.0;
    for (Index i : order) total += indicators[i];
    std::vector<Index> marked;
    if (total <= 0.0) return RefinementMarks(std::move(marked));
    double partial = 0.0;
    for (Index i : order) {
        if (partial >= fraction * total || indicators[i] <= 0.0) break;
        partial += indicators[i];
        marked.push_back(i);
    }
    return RefinementMarks(std::move(marked));
}

std::vector<AdaptiveLevel> adaptive_loop(const RofProblem& problem, const AdaptiveLoopConfig& config,
                                         const Mesh& initial, const ExactSolution& exact,
                                         const std::function<void(const AdaptiveLevel&)>& progress) {
    if (!(config.fraction > 0) || config.fraction > 1)
        throw std::invalid_argument("adaptive_loop: fraction must lie in (0, 1]");
    if (config.levels < 1) throw std::invalid_argument("adaptive_loop: at least one level required");
    std::vector<AdaptiveLevel> out;
    std::vector<MeshStats> history;
    auto mesh = std::make_shared<const Mesh>(initial);
    const JumpSet& jumps = problem.g.jump_set();
    for (int level = 0; level < config.levels; ++level) {
        AdaptiveLevel rec;
        rec.level = level;
        rec.stats = mesh_stats(*mesh);
        history.push_back(rec.stats);
        const double h = rec.stats.h_avg;
        rec.epsilon = config.eps_factor * std::pow(h, config.eps_power);
        rec.eps_stop = config.eps_stop_factor * std::pow(h, config.eps_stop_power);
        RofProblem pb = problem;
        pb.epsilon = rec.epsilon;
        FlowConfig flow = config.flow;
        flow.eps_stop = rec.eps_stop;

        const CellDataIntegrals data = integrate_data(*mesh, pb.g, &jumps, config.quadrature);

        FlowSystem cr(mesh, Space::CR, pb, config.quadrature);
        const FlowState s_cr = run_flow(cr, cr.initial_iterate(), flow);
        rec.iterations_cr = s_cr.iterations;
        rec.converged_cr = s_cr.converged;
        rec.error_cr = l2_error(s_cr.u, exact.u, &exact.jumps, config.quadrature).value;
        rec.error_pi_cr =
            l2_error(s_cr.u, exact.u, &exact.jumps, config.quadrature, ErrorVariant::Projected).value;

        const DualField z = reconstruct_dual(s_cr.u, pb, data);
        for (Index c = 0; c < mesh->num_cells(); ++c) {
            rec.max_center_modulus = std::max(rec.max_center_modulus, z.z.rt_constant(c).norm());
            const double defect =
                std::abs(rt_divergence(z.z, c) - pb.alpha * (s_cr.u.cell_mean(c) - data.mean[c]));
            rec.max_divergence_defect = std::max(rec.max_divergence_defect, defect);
        }

        FlowSystem p1(mesh, Space::P1, pb, config.quadrature);
        const FlowState s_p1 = run_flow(p1, p1.initial_iterate(), flow);
        rec.iterations_p1 = s_p1.iterations;
        rec.converged_p1 = s_p1.converged;
        rec.error_p1 = l2_error(s_p1.u, exact.u, &exact.jumps, config.quadrature).value;
        rec.error_pi_p1 =
            l2_error(s_p1.u, exact.u, &exact.jumps, config.quadrature, ErrorVariant::Projected).value;

        const FeFunction& u_ind = config.indicator_space == Space::CR ? s_cr.u : s_p1.u;
        rec.estimator = estimate_total(u_ind, z, pb, data);
        const EstimatorBreakdown global = estimate_total(u_ind, scale_dual(z, Scaling::Global), pb, data);
        const EstimatorBreakdown local = estimate_total(u_ind, scale_dual(z, Scaling::Local), pb, data);
        rec.E_est_global = global.E_est;
        rec.E_est_local = local.E_est;
        rec.beta_emergent = grading_ratio(rec.stats);
        rec.beta_slope =
            history.size() >= 2 ? grading_strength(history) : std::numeric_limits<double>::quiet_NaN();

        if (level + 1 < config.levels) {
            const EstimatorBreakdown& drive =
                config.driver == Scaling::Global ? global : (config.driver == Scaling::Local ? local : rec.estimator);
            std::vector<double> ind = drive.eta2;
            for (double& v : ind) {
                v = std::max(v, 0.0);
                if (!config.mark_squared) v = std::sqrt(v);
            }
            const RefinementMarks marks = mark_cells(ind, config.fraction);
            rec.marked = static_cast<Index>(marks.size());
            Index near = 0;
            for (Index c : marks.cells)
                if (jumps.distance(mesh->barycenter(c)) <= 2.0 * rec.stats.h_max) ++near;
            rec.marked_near_jump = marks.empty() ? 0.0 : static_cast<double>(near) / marks.size();
            out.push_back(rec);
            if (progress) progress(out.back());
            if (marks.empty()) break;
            mesh = std::make_shared<const Mesh>(refine(*mesh, marks).mesh);
        } else {
            out.push_back(rec);
            if (progress) progress(out.back());
        }
    }
    return out;
}

void write_level_csv_header(std::ostream& os) {
    os << "level,N_cells,N_vertices,h_min,h_avg,error_L2,eta_total,osc_total,E_est,beta_emergent\n";
}

void write_level_csv_row(std::ostream& os, int level, const MeshStats& stats, double error_l2, double eta_total,
                         double osc_total, double e_est, double beta_emergent) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", level, stats.num_cells,
                  stats.num_vertices, stats.h_min, stats.h_avg, error_l2, eta_total, osc_total, e_est, beta_emergent);
    os << buf;
}

}  // namespace rof
