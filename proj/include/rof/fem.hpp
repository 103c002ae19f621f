#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "rof/mesh.hpp"
#include "rof/quadrature.hpp"

namespace rof {

enum class Space { P0, P0Vector, P1, CR, RT0Cell };

std::string to_string(Space space);
Space space_from_string(std::string_view name);

/// Number of mesh entities carrying values (cells, vertices or sides).
Index num_entities(const Mesh& mesh, Space space);
/// Values per entity: d for P0Vector, d + 1 for RT0Cell (a_T then b_T), else 1.
int components(const Mesh& mesh, Space space);
inline Index num_dofs(const Mesh& mesh, Space space) { return num_entities(mesh, space) * components(mesh, space); }

using MeshPtr = std::shared_ptr<const Mesh>;
using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

/// Coefficient vector of a finite element function over a shared mesh.
///
/// P1 and CR functions hold one value per vertex or side. P0Vector stores d
/// values per cell, RT0Cell stores (a_T, b_T) for y|_T = a_T + b_T (x - x_T).
class FeFunction {
public:
    FeFunction(Space space, MeshPtr mesh);
    FeFunction(Space space, MeshPtr mesh, Eigen::VectorXd dofs);

    Space space() const { return space_; }
    const Mesh& mesh() const { return *mesh_; }
    const MeshPtr& mesh_ptr() const { return mesh_; }
    const Eigen::VectorXd& dofs() const { return dofs_; }

    /// Scalar value at x in (the closure of) cell c.
    double value(Index c, const Vec2& x) const;
    /// Vector value at x for P0Vector and RT0Cell.
    Vec2 vector_value(Index c, const Vec2& x) const;
    /// Piecewise gradient of a P1 or CR function on cell c.
    Vec2 gradient(Index c) const;
    /// Cell mean of a scalar function (its value at x_T for affine spaces).
    double cell_mean(Index c) const;
    /// RT0Cell accessors.
    Vec2 rt_constant(Index c) const;
    double rt_slope(Index c) const;

private:
    Space space_;
    MeshPtr mesh_;
    Eigen::VectorXd dofs_;
};

/// Global degrees of freedom of cell c for P1 (vertices) or CR (sides, local
/// side i opposite vertex i).
std::array<Index, 3> local_dofs(const Mesh& mesh, Index c, Space space);
/// Local basis function values at barycentric point lambda.
std::array<double, 3> local_basis(const Mesh& mesh, Space space, const std::array<double, 3>& lambda);
/// Local basis gradients on cell c.
std::array<Vec2, 3> local_basis_gradients(const Mesh& mesh, Index c, Space space);
/// Barycentric coordinates of x with respect to cell c.
std::array<double, 3> barycentric(const Mesh& mesh, Index c, const Vec2& x);

FeFunction project_p0(const FeFunction& v);
FeFunction project_p0(const ScalarField& v, const MeshPtr& mesh, const JumpSet* jumps = nullptr,
                      const QuadratureOptions& opts = {});
FeFunction nodal_interpolate(const ScalarField& v, const MeshPtr& mesh);
/// Side averages; the side integrals use a Gauss rule of the given degree.
FeFunction cr_interpolate(const ScalarField& v, const MeshPtr& mesh, int degree = 7);
/// Side averages of a P1 function (exact).
FeFunction cr_interpolate(const FeFunction& p1);
/// Values at side midpoints.
FeFunction cr_midpoint_interpolate(const ScalarField& v, const MeshPtr& mesh);
FeFunction elementwise_gradient(const FeFunction& u);

/// RT0 field with prescribed normal components on the sides. Normals point
/// out of side_cells(s)[0].
FeFunction rt0_from_normal_components(const MeshPtr& mesh, const Eigen::VectorXd& normal_components);
/// Normal component of a cellwise RT-form field on local side i of cell c
/// with respect to the outer normal of c.
double rt_normal_component(const FeFunction& y, Index c, int i);
/// Jump of the normal component across every side (zero on the boundary).
Eigen::VectorXd normal_jumps(const FeFunction& y);
/// Divergence of a cellwise RT-form field: d * b_T.
double rt_divergence(const FeFunction& y, Index c);

using SparseOperator = Eigen::SparseMatrix<double>;

/// Matrix of sum_T w_T^{-1} int_T grad u . grad v for P1 or CR.
SparseOperator assemble_weighted_stiffness(const Mesh& mesh, const FeFunction& weight, Space space);
/// Local stiffness |T| grad phi_i . grad phi_j for unit weight.
Eigen::Matrix3d local_stiffness(const Mesh& mesh, Index c, Space space);

enum class MassVariant { Full, Projected };
SparseOperator assemble_mass(const Mesh& mesh, Space space, MassVariant variant = MassVariant::Full);
Eigen::Matrix3d local_mass(const Mesh& mesh, Index c, Space space, MassVariant variant);

/// Per-cell integrals of the data needed by the discrete problems.
struct CellDataIntegrals {
    Eigen::VectorXd mean;         // Pi_h g
    Eigen::VectorXd square;       // int_T g^2
    std::vector<std::array<double, 3>> p1_moments;  // int_T g lambda_i
    double max_misassigned = 0.0;
};

CellDataIntegrals integrate_data(const Mesh& mesh, const ScalarField& g, const JumpSet* jumps,
                                 const QuadratureOptions& opts = {});

struct L2Error {
    double value = 0.0;
    /// Largest fraction of a cell measure whose integrand may be misattributed.
    double achieved_tolerance = 0.0;
};

enum class ErrorVariant { Plain, Projected };

/// ||u_h - u|| or ||Pi_h (u_h - u)||; cells meeting `jumps` are subdivided.
L2Error l2_error(const FeFunction& u_h, const ScalarField& u, const JumpSet* jumps = nullptr,
                 const QuadratureOptions& opts = {}, ErrorVariant variant = ErrorVariant::Plain);

/// Integral of an arbitrary field over the mesh (subdividing near jumps).
double integrate(const Mesh& mesh, const std::function<double(Index, const Vec2&)>& f, const JumpSet* jumps = nullptr,
                 const QuadratureOptions& opts = {});

/// `space entities` header followed by one line of values per entity.
void write_function(std::ostream& os, const FeFunction& f);
FeFunction read_function(std::istream& is, const MeshPtr& mesh);

}  // namespace rof
