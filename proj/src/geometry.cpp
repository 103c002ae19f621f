#include "rof/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rof/mesh.hpp"

namespace rof {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool inside_triangle(const Vec2& x, const Vec2& a, const Vec2& b, const Vec2& c) {
    const double d0 = cross(b - a, x - a);
    const double d1 = cross(c - b, x - b);
    const double d2 = cross(a - c, x - c);
    const bool neg = d0 < 0 || d1 < 0 || d2 < 0;
    const bool pos = d0 > 0 || d1 > 0 || d2 > 0;
    return !(neg && pos);
}

bool segments_cross(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1) {
    const double d0 = cross(p1 - p0, q0 - p0);
    const double d1 = cross(p1 - p0, q1 - p0);
    const double d2 = cross(q1 - q0, p0 - q0);
    const double d3 = cross(q1 - q0, p1 - q0);
    return ((d0 > 0 && d1 < 0) || (d0 < 0 && d1 > 0)) && ((d2 > 0 && d3 < 0) || (d2 < 0 && d3 > 0));
}

}  // namespace

double point_segment_distance(const Vec2& x, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (x - (a + t * ab)).norm();
}

double point_triangle_distance(const Vec2& x, const Vec2& a, const Vec2& b, const Vec2& c) {
    if (inside_triangle(x, a, b, c)) return 0.0;
    return std::min({point_segment_distance(x, a, b), point_segment_distance(x, b, c),
                     point_segment_distance(x, c, a)});
}

double segment_segment_distance(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1) {
    if (segments_cross(p0, p1, q0, q1)) return 0.0;
    return std::min({point_segment_distance(p0, q0, q1), point_segment_distance(p1, q0, q1),
                     point_segment_distance(q0, p0, p1), point_segment_distance(q1, p0, p1)});
}

double JumpSet::distance(const Vec2& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : circles) d = std::min(d, std::abs((x - c.center).norm() - c.radius));
    for (const auto& s : segments) d = std::min(d, point_segment_distance(x, s.a, s.b));
    for (double p : points) d = std::min(d, std::abs(x.x() - p));
    return d;
}

bool triangle_meets_circle(std::span<const Vec2, 3> tri, const Circle& circle, double tol) {
    const double dmin = point_triangle_distance(circle.center, tri[0], tri[1], tri[2]);
    double dmax = 0.0;
    for (const Vec2& p : tri) dmax = std::max(dmax, (p - circle.center).norm());
    return dmin <= circle.radius + tol && dmax >= circle.radius - tol;
}

bool triangle_meets_segment(std::span<const Vec2, 3> tri, const Segment& seg, double tol) {
    if (point_triangle_distance(seg.a, tri[0], tri[1], tri[2]) <= tol) return true;
    for (int i = 0; i < 3; ++i)
        if (segment_segment_distance(seg.a, seg.b, tri[i], tri[(i + 1) % 3]) <= tol) return true;
    return false;
}

bool triangle_meets(std::span<const Vec2, 3> tri, const JumpSet& set, double tol) {
    for (const auto& c : set.circles)
        if (triangle_meets_circle(tri, c, tol)) return true;
    for (const auto& s : set.segments)
        if (triangle_meets_segment(tri, s, tol)) return true;
    return false;
}

bool interval_meets(double a, double b, const JumpSet& set, double tol) {
    for (double p : set.points)
        if (p >= a - tol && p <= b + tol) return true;
    return false;
}

bool cell_meets(const Mesh& mesh, Index c, const JumpSet& set, double tol) {
    const Cell& t = mesh.cell(c);
    if (mesh.dim() == 1) return interval_meets(mesh.vertex(t[0]).x(), mesh.vertex(t[1]).x(), set, tol);
    const std::array<Vec2, 3> tri = {mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2])};
    return triangle_meets(tri, set, tol);
}

}  // namespace rof
