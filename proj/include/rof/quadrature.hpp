#pragma once

#include <array>
#include <vector>

#include "rof/geometry.hpp"
#include "rof/types.hpp"

namespace rof {

class Mesh;

/// Quadrature on the reference simplex in barycentric coordinates. Weights are
/// fractions of the cell measure and sum to one.
struct QuadratureRule {
    int dim = 2;
    int degree = 0;
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
};

/// Symmetric triangle rules of degree 1, 2, 4, 5 and Gauss rules on intervals
/// of degree up to 9. The smallest available rule of at least the requested
/// degree is returned.
const QuadratureRule& triangle_rule(int degree);
const QuadratureRule& interval_rule(int degree);
const QuadratureRule& simplex_rule(int dim, int degree);

struct QuadPoint {
    Vec2 x;
    double weight;  // absolute: includes the measure of the integration region
};

struct QuadratureOptions {
    int degree = 4;
    /// Recursive subdivision depth for cells cut by a discontinuity.
    int max_depth = 12;
    /// A leaf of diameter s is accepted once the region misassigned by its
    /// chord cut is at most tolerance * |T| * s / (2 diam T), which keeps the
    /// total near tolerance * |T|.
    double tolerance = 1e-7;
};

/// Quadrature points for cell c. Cells that meet the jump set are subdivided
/// recursively; leaves that are crossed by a single circle or segment are cut
/// along the chord through the crossing points, so each piece lies on one side
/// of the discontinuity up to a lens of bounded area. Returns that bound as
/// a fraction of |T| (0 when the cell does not meet the set).
double cell_quadrature(const Mesh& mesh, Index c, const JumpSet* jumps, const QuadratureOptions& opts,
                       std::vector<QuadPoint>& out);

/// Points for an arbitrary triangle, without jump handling.
void triangle_points(const std::array<Vec2, 3>& tri, const QuadratureRule& rule, std::vector<QuadPoint>& out);

}  // namespace rof
