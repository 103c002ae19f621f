#include "rof/fem.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace rof {

std::string to_string(Space space) {
    switch (space) {
        case Space::P0: return "P0";
        case Space::P0Vector: return "P0vec";
        case Space::P1: return "P1";
        case Space::CR: return "CR";
        case Space::RT0Cell: return "RT0cell";
    }
    return "P0";
}

Space space_from_string(std::string_view name) {
    std::string lower(name);
    for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (lower == "p0") return Space::P0;
    if (lower == "p0vec") return Space::P0Vector;
    if (lower == "p1") return Space::P1;
    if (lower == "cr") return Space::CR;
    if (lower == "rt0cell") return Space::RT0Cell;
    throw std::invalid_argument("unknown space `" + std::string(name) + "`");
}

Index num_entities(const Mesh& mesh, Space space) {
    switch (space) {
        case Space::P1: return mesh.num_vertices();
        case Space::CR: return mesh.num_sides();
        default: return mesh.num_cells();
    }
}

int components(const Mesh& mesh, Space space) {
    if (space == Space::P0Vector) return mesh.dim();
    if (space == Space::RT0Cell) return mesh.dim() + 1;
    return 1;
}

FeFunction::FeFunction(Space space, MeshPtr mesh)
    : space_(space), mesh_(std::move(mesh)), dofs_(Eigen::VectorXd::Zero(num_dofs(*mesh_, space))) {}

FeFunction::FeFunction(Space space, MeshPtr mesh, Eigen::VectorXd dofs)
    : space_(space), mesh_(std::move(mesh)), dofs_(std::move(dofs)) {
    if (dofs_.size() != num_dofs(*mesh_, space_))
        throw std::invalid_argument("FeFunction: dof vector length does not match the space");
}

std::array<Index, 3> local_dofs(const Mesh& mesh, Index c, Space space) {
    if (space == Space::P1) return mesh.cell(c);
    if (space == Space::CR) return mesh.cell_sides(c);
    throw std::invalid_argument("local_dofs: P1 or CR expected");
}

std::array<double, 3> barycentric(const Mesh& mesh, Index c, const Vec2& x) {
    const Vec2 dx = x - mesh.barycenter(c);
    const double base = 1.0 / (mesh.dim() + 1);
    std::array<double, 3> l{};
    for (int i = 0; i <= mesh.dim(); ++i) l[i] = base + mesh.lambda_gradient(c, i).dot(dx);
    return l;
}

std::array<double, 3> local_basis(const Mesh& mesh, Space space, const std::array<double, 3>& lambda) {
    if (space == Space::P1) return lambda;
    if (space != Space::CR) throw std::invalid_argument("local_basis: P1 or CR expected");
    const int d = mesh.dim();
    std::array<double, 3> phi{};
    for (int i = 0; i <= d; ++i) phi[i] = 1.0 - d * lambda[i];
    return phi;
}

std::array<Vec2, 3> local_basis_gradients(const Mesh& mesh, Index c, Space space) {
    std::array<Vec2, 3> g = {Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
    const double scale = space == Space::CR ? -mesh.dim() : 1.0;
    if (space != Space::P1 && space != Space::CR) throw std::invalid_argument("local_basis_gradients: P1 or CR expected");
    for (int i = 0; i <= mesh.dim(); ++i) g[i] = scale * mesh.lambda_gradient(c, i);
    return g;
}

double FeFunction::value(Index c, const Vec2& x) const {
    switch (space_) {
        case Space::P0: return dofs_[c];
        case Space::P1:
        case Space::CR: {
            const auto dofs = local_dofs(*mesh_, c, space_);
            const auto phi = local_basis(*mesh_, space_, barycentric(*mesh_, c, x));
            double v = 0.0;
            for (int i = 0; i <= mesh_->dim(); ++i) v += dofs_[dofs[i]] * phi[i];
            return v;
        }
        default: throw std::invalid_argument("FeFunction::value: scalar space expected");
    }
}

Vec2 FeFunction::vector_value(Index c, const Vec2& x) const {
    const int d = mesh_->dim();
    if (space_ == Space::P0Vector) return d == 1 ? Vec2(dofs_[c], 0.0) : Vec2(dofs_[2 * c], dofs_[2 * c + 1]);
    if (space_ == Space::RT0Cell) return rt_constant(c) + rt_slope(c) * (x - mesh_->barycenter(c));
    throw std::invalid_argument("FeFunction::vector_value: vector space expected");
}

Vec2 FeFunction::gradient(Index c) const {
    const auto dofs = local_dofs(*mesh_, c, space_);
    const auto grads = local_basis_gradients(*mesh_, c, space_);
    Vec2 g = Vec2::Zero();
    for (int i = 0; i <= mesh_->dim(); ++i) g += dofs_[dofs[i]] * grads[i];
    return g;
}

double FeFunction::cell_mean(Index c) const {
    if (space_ == Space::P0) return dofs_[c];
    if (space_ != Space::P1 && space_ != Space::CR) throw std::invalid_argument("cell_mean: scalar space expected");
    const auto dofs = local_dofs(*mesh_, c, space_);
    double s = 0.0;
    for (int i = 0; i <= mesh_->dim(); ++i) s += dofs_[dofs[i]];
    return s / (mesh_->dim() + 1);
}

Vec2 FeFunction::rt_constant(Index c) const {
    const int n = mesh_->dim() + 1;
    return mesh_->dim() == 1 ? Vec2(dofs_[n * c], 0.0) : Vec2(dofs_[n * c], dofs_[n * c + 1]);
}

double FeFunction::rt_slope(Index c) const {
    const int n = mesh_->dim() + 1;
    return dofs_[n * c + n - 1];
}

FeFunction project_p0(const FeFunction& v) {
    const Mesh& mesh = v.mesh();
    switch (v.space()) {
        case Space::P0:
        case Space::P0Vector: return v;
        case Space::P1:
        case Space::CR: {
            Eigen::VectorXd out(mesh.num_cells());
            for (Index c = 0; c < mesh.num_cells(); ++c) out[c] = v.cell_mean(c);
            return {Space::P0, v.mesh_ptr(), std::move(out)};
        }
        case Space::RT0Cell: {
            const int d = mesh.dim();
            Eigen::VectorXd out(d * mesh.num_cells());
            for (Index c = 0; c < mesh.num_cells(); ++c)
                for (int k = 0; k < d; ++k) out[d * c + k] = v.rt_constant(c)[k];
            return {Space::P0Vector, v.mesh_ptr(), std::move(out)};
        }
    }
    throw std::invalid_argument("project_p0: unsupported space");
}

FeFunction project_p0(const ScalarField& v, const MeshPtr& mesh, const JumpSet* jumps, const QuadratureOptions& opts) {
    Eigen::VectorXd out(mesh->num_cells());
    std::vector<QuadPoint> pts;
    for (Index c = 0; c < mesh->num_cells(); ++c) {
        pts.clear();
        cell_quadrature(*mesh, c, jumps, opts, pts);
        double s = 0.0;
        for (const auto& q : pts) s += q.weight * v(q.x);
        out[c] = s / mesh->measure(c);
    }
    return {Space::P0, mesh, std::move(out)};
}

FeFunction nodal_interpolate(const ScalarField& v, const MeshPtr& mesh) {
    Eigen::VectorXd out(mesh->num_vertices());
    for (Index i = 0; i < mesh->num_vertices(); ++i) out[i] = v(mesh->vertex(i));
    return {Space::P1, mesh, std::move(out)};
}

FeFunction cr_interpolate(const ScalarField& v, const MeshPtr& mesh, int degree) {
    Eigen::VectorXd out(mesh->num_sides());
    const QuadratureRule& rule = interval_rule(degree);
    for (Index s = 0; s < mesh->num_sides(); ++s) {
        const Side& sd = mesh->side(s);
        if (mesh->dim() == 1) {
            out[s] = v(mesh->vertex(sd[0]));
            continue;
        }
        const Vec2& a = mesh->vertex(sd[0]);
        const Vec2& b = mesh->vertex(sd[1]);
        double acc = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q)
            acc += rule.weights[q] * v(rule.points[q][0] * a + rule.points[q][1] * b);
        out[s] = acc;
    }
    return {Space::CR, mesh, std::move(out)};
}

FeFunction cr_interpolate(const FeFunction& p1) {
    if (p1.space() != Space::P1) throw std::invalid_argument("cr_interpolate: P1 function expected");
    const Mesh& mesh = p1.mesh();
    Eigen::VectorXd out(mesh.num_sides());
    for (Index s = 0; s < mesh.num_sides(); ++s) {
        const Side& sd = mesh.side(s);
        out[s] = mesh.dim() == 1 ? p1.dofs()[sd[0]] : 0.5 * (p1.dofs()[sd[0]] + p1.dofs()[sd[1]]);
    }
    return {Space::CR, p1.mesh_ptr(), std::move(out)};
}

FeFunction cr_midpoint_interpolate(const ScalarField& v, const MeshPtr& mesh) {
    Eigen::VectorXd out(mesh->num_sides());
    for (Index s = 0; s < mesh->num_sides(); ++s) out[s] = v(mesh->side_midpoint(s));
    return {Space::CR, mesh, std::move(out)};
}

FeFunction elementwise_gradient(const FeFunction& u) {
    const Mesh& mesh = u.mesh();
    const int d = mesh.dim();
    Eigen::VectorXd out(d * mesh.num_cells());
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        const Vec2 g = u.gradient(c);
        for (int k = 0; k < d; ++k) out[d * c + k] = g[k];
    }
    return {Space::P0Vector, u.mesh_ptr(), std::move(out)};
}

FeFunction rt0_from_normal_components(const MeshPtr& mesh, const Eigen::VectorXd& normal_components) {
    if (normal_components.size() != mesh->num_sides())
        throw std::invalid_argument("rt0_from_normal_components: one value per side expected");
    const int d = mesh->dim();
    Eigen::VectorXd out = Eigen::VectorXd::Zero((d + 1) * mesh->num_cells());
    for (Index c = 0; c < mesh->num_cells(); ++c) {
        Vec2 a = Vec2::Zero();
        double b = 0.0;
        for (int i = 0; i <= d; ++i) {
            const Index s = mesh->cell_sides(c)[i];
            const double sign = mesh->side_cells(s)[0] == c ? 1.0 : -1.0;
            // psi_S = |S| / (d |T|) (x - p_i) has unit normal component on S.
            const double scale = sign * normal_components[s] * mesh->side_measure(s) / (d * mesh->measure(c));
            a += scale * (mesh->barycenter(c) - mesh->vertex(mesh->cell(c)[i]));
            b += scale;
        }
        for (int k = 0; k < d; ++k) out[(d + 1) * c + k] = a[k];
        out[(d + 1) * c + d] = b;
    }
    return {Space::RT0Cell, mesh, std::move(out)};
}

double rt_normal_component(const FeFunction& y, Index c, int i) {
    const Mesh& mesh = y.mesh();
    const Index s = mesh.cell_sides(c)[i];
    const Vec2 n = mesh.outer_normal(c, i);
    return y.vector_value(c, mesh.side_midpoint(s)).dot(n);
}

Eigen::VectorXd normal_jumps(const FeFunction& y) {
    if (y.space() != Space::RT0Cell) throw std::invalid_argument("normal_jumps: RT0Cell field expected");
    const Mesh& mesh = y.mesh();
    Eigen::VectorXd jumps = Eigen::VectorXd::Zero(mesh.num_sides());
    auto local_index = [&](Index c, Index s) {
        const auto& cs = mesh.cell_sides(c);
        return cs[0] == s ? 0 : (cs[1] == s ? 1 : 2);
    };
    for (Index s = 0; s < mesh.num_sides(); ++s) {
        const auto& sc = mesh.side_cells(s);
        if (sc[1] == kNone) continue;
        // Outer normals of the two cells are opposite, so the sum is the jump.
        jumps[s] = rt_normal_component(y, sc[0], local_index(sc[0], s)) +
                   rt_normal_component(y, sc[1], local_index(sc[1], s));
    }
    return jumps;
}

double rt_divergence(const FeFunction& y, Index c) { return y.mesh().dim() * y.rt_slope(c); }

Eigen::Matrix3d local_stiffness(const Mesh& mesh, Index c, Space space) {
    const auto g = local_basis_gradients(mesh, c, space);
    Eigen::Matrix3d k = Eigen::Matrix3d::Zero();
    const int n = mesh.dim() + 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) k(i, j) = mesh.measure(c) * g[i].dot(g[j]);
    return k;
}

Eigen::Matrix3d local_mass(const Mesh& mesh, Index c, Space space, MassVariant variant) {
    const int d = mesh.dim();
    const int n = d + 1;
    const double area = mesh.measure(c);
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double delta = i == j ? 1.0 : 0.0;
            if (variant == MassVariant::Projected) {
                m(i, j) = area / (n * n);
            } else if (space == Space::P1) {
                m(i, j) = area * (1.0 + delta) / ((d + 1) * (d + 2));
            } else {
                // int (1 - d l_i)(1 - d l_j) over T.
                m(i, j) = area * (1.0 - 2.0 * d / (d + 1) + d * d * (1.0 + delta) / ((d + 1) * (d + 2)));
            }
        }
    return m;
}

namespace {

SparseOperator assemble(const Mesh& mesh, Space space, const std::function<Eigen::Matrix3d(Index)>& local) {
    const Index n = num_entities(mesh, space);
    const int nl = mesh.dim() + 1;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(mesh.num_cells()) * nl * nl);
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        const auto dofs = local_dofs(mesh, c, space);
        const Eigen::Matrix3d k = local(c);
        for (int i = 0; i < nl; ++i)
            for (int j = 0; j < nl; ++j) trip.emplace_back(dofs[i], dofs[j], k(i, j));
    }
    SparseOperator a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    return a;
}

}  // namespace

SparseOperator assemble_weighted_stiffness(const Mesh& mesh, const FeFunction& weight, Space space) {
    if (weight.space() != Space::P0) throw std::invalid_argument("assemble_weighted_stiffness: P0 weight expected");
    for (Index c = 0; c < mesh.num_cells(); ++c)
        if (!(weight.dofs()[c] > 0.0)) throw std::invalid_argument("assemble_weighted_stiffness: weight must be positive");
    return assemble(mesh, space, [&](Index c) { return Eigen::Matrix3d(local_stiffness(mesh, c, space) / weight.dofs()[c]); });
}

SparseOperator assemble_mass(const Mesh& mesh, Space space, MassVariant variant) {
    return assemble(mesh, space, [&](Index c) { return local_mass(mesh, c, space, variant); });
}

CellDataIntegrals integrate_data(const Mesh& mesh, const ScalarField& g, const JumpSet* jumps,
                                 const QuadratureOptions& opts) {
    CellDataIntegrals out;
    out.mean.resize(mesh.num_cells());
    out.square.resize(mesh.num_cells());
    out.p1_moments.assign(mesh.num_cells(), {0.0, 0.0, 0.0});
    std::vector<QuadPoint> pts;
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        pts.clear();
        out.max_misassigned = std::max(out.max_misassigned, cell_quadrature(mesh, c, jumps, opts, pts));
        double s = 0.0, s2 = 0.0;
        auto& mom = out.p1_moments[c];
        for (const auto& q : pts) {
            const double v = g(q.x);
            s += q.weight * v;
            s2 += q.weight * v * v;
            const auto l = barycentric(mesh, c, q.x);
            for (int i = 0; i <= mesh.dim(); ++i) mom[i] += q.weight * v * l[i];
        }
        out.mean[c] = s / mesh.measure(c);
        out.square[c] = s2;
    }
    return out;
}

L2Error l2_error(const FeFunction& u_h, const ScalarField& u, const JumpSet* jumps, const QuadratureOptions& opts,
                 ErrorVariant variant) {
    const Mesh& mesh = u_h.mesh();
    L2Error err;
    double acc = 0.0;
    std::vector<QuadPoint> pts;
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        pts.clear();
        err.achieved_tolerance = std::max(err.achieved_tolerance, cell_quadrature(mesh, c, jumps, opts, pts));
        if (variant == ErrorVariant::Plain) {
            for (const auto& q : pts) {
                const double e = u_h.value(c, q.x) - u(q.x);
                acc += q.weight * e * e;
            }
        } else {
            double mean_u = 0.0;
            for (const auto& q : pts) mean_u += q.weight * u(q.x);
            mean_u /= mesh.measure(c);
            const double e = u_h.cell_mean(c) - mean_u;
            acc += mesh.measure(c) * e * e;
        }
    }
    err.value = std::sqrt(acc);
    return err;
}

double integrate(const Mesh& mesh, const std::function<double(Index, const Vec2&)>& f, const JumpSet* jumps,
                 const QuadratureOptions& opts) {
    double acc = 0.0;
    std::vector<QuadPoint> pts;
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        pts.clear();
        cell_quadrature(mesh, c, jumps, opts, pts);
        for (const auto& q : pts) acc += q.weight * f(c, q.x);
    }
    return acc;
}

void write_function(std::ostream& os, const FeFunction& f) {
    const int nc = components(f.mesh(), f.space());
    const Index ne = num_entities(f.mesh(), f.space());
    os << to_string(f.space()) << ' ' << f.dofs().size() << '\n';
    char buf[64];
    for (Index e = 0; e < ne; ++e) {
        for (int k = 0; k < nc; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", f.dofs()[e * nc + k]);
            os << (k ? " " : "") << buf;
        }
        os << '\n';
    }
}

FeFunction read_function(std::istream& is, const MeshPtr& mesh) {
    std::string name;
    long n = 0;
    if (!(is >> name >> n)) throw ParseError("function dump: malformed header, expected `space N_dofs`");
    Space space;
    try {
        space = space_from_string(name);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("function dump: ") + e.what());
    }
    if (n != num_dofs(*mesh, space)) throw ParseError("function dump: dof count does not match the mesh");
    Eigen::VectorXd dofs(n);
    for (long i = 0; i < n; ++i) {
        std::string tok;
        if (!(is >> tok)) throw ParseError("function dump: truncated at value " + std::to_string(i));
        char* end = nullptr;
        dofs[i] = std::strtod(tok.c_str(), &end);
        if (*end != '\0') throw ParseError("function dump: invalid value `" + tok + "`");
    }
    return {space, mesh, std::move(dofs)};
}

}  // namespace rof
