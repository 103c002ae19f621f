#pragma once

#include <span>
#include <vector>

#include "rof/types.hpp"

namespace rof {

class Mesh;

struct Circle {
    Vec2 center = Vec2::Zero();
    double radius = 0.0;
};

struct Segment {
    Vec2 a = Vec2::Zero();
    Vec2 b = Vec2::Zero();
};

/// Geometric description of the discontinuity set of a data function:
/// circles and segments in 2D, points on the real line in 1D.
struct JumpSet {
    std::vector<Circle> circles;
    std::vector<Segment> segments;
    std::vector<double> points;

    bool empty() const { return circles.empty() && segments.empty() && points.empty(); }
    /// Euclidean distance from x to the set (infinity for an empty set).
    double distance(const Vec2& x) const;
};

/// Closest distance from x to the closed triangle (a, b, c); zero inside.
double point_triangle_distance(const Vec2& x, const Vec2& a, const Vec2& b, const Vec2& c);
double point_segment_distance(const Vec2& x, const Vec2& a, const Vec2& b);
double segment_segment_distance(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1);

/// Closed-set intersection tests; `tol` absorbs round-off in coordinates.
bool triangle_meets_circle(std::span<const Vec2, 3> tri, const Circle& circle, double tol = 1e-12);
bool triangle_meets_segment(std::span<const Vec2, 3> tri, const Segment& seg, double tol = 1e-12);
bool triangle_meets(std::span<const Vec2, 3> tri, const JumpSet& set, double tol = 1e-12);
bool interval_meets(double a, double b, const JumpSet& set, double tol = 1e-12);

/// Whether cell c of the mesh intersects the jump set.
bool cell_meets(const Mesh& mesh, Index c, const JumpSet& set, double tol = 1e-12);

}  // namespace rof
