#include "rof/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "rof/mesh.hpp"

namespace rof {

namespace {

QuadratureRule make_triangle_rule(int degree) {
    QuadratureRule r;
    r.dim = 2;
    r.degree = degree;
    auto add3 = [&](double a, double b, double w) {
        r.points.push_back({a, b, b});
        r.points.push_back({b, a, b});
        r.points.push_back({b, b, a});
        r.weights.insert(r.weights.end(), 3, w);
    };
    switch (degree) {
        case 1:
            r.points.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
            r.weights.push_back(1.0);
            break;
        case 2:
            add3(2.0 / 3, 1.0 / 6, 1.0 / 3);
            break;
        case 4:
            add3(0.108103018168070, 0.445948490915965, 0.223381589678011);
            add3(0.816847572980459, 0.091576213509771, 0.109951743655322);
            break;
        case 5:
            r.points.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
            r.weights.push_back(0.225);
            add3(0.059715871789770, 0.470142064105115, 0.132394152788506);
            add3(0.797426985353087, 0.101286507323456, 0.125939180544827);
            break;
        default:
            throw std::invalid_argument("triangle_rule: unsupported degree");
    }
    return r;
}

QuadratureRule make_interval_rule(int npts) {
    static const std::vector<std::vector<std::pair<double, double>>> gl = {
        {{0.0, 2.0}},
        {{-0.5773502691896257, 1.0}, {0.5773502691896257, 1.0}},
        {{-0.7745966692414834, 0.5555555555555556}, {0.0, 0.8888888888888888}, {0.7745966692414834, 0.5555555555555556}},
        {{-0.8611363115940526, 0.3478548451374538},
         {-0.3399810435848563, 0.6521451548625461},
         {0.3399810435848563, 0.6521451548625461},
         {0.8611363115940526, 0.3478548451374538}},
        {{-0.9061798459386640, 0.2369268850561891},
         {-0.5384693101056831, 0.4786286704993665},
         {0.0, 0.5688888888888889},
         {0.5384693101056831, 0.4786286704993665},
         {0.9061798459386640, 0.2369268850561891}}};
    QuadratureRule r;
    r.dim = 1;
    r.degree = 2 * npts - 1;
    for (const auto& [x, w] : gl[npts - 1]) {
        const double t = 0.5 * (x + 1.0);
        r.points.push_back({1.0 - t, t, 0.0});
        r.weights.push_back(0.5 * w);
    }
    return r;
}

struct LeafCut {
    bool ok = false;
    Vec2 p0, p1;
    double lens = 0.0;
};

double tri_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * std::abs((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

void add_unique(std::vector<Vec2>& pts, const Vec2& p, double scale) {
    for (const Vec2& q : pts)
        if ((q - p).norm() <= 1e-12 * scale) return;
    pts.push_back(p);
}

// Crossing points of the single feature meeting the leaf, if it is simple.
LeafCut analyse_leaf(const std::array<Vec2, 3>& tri, const JumpSet& jumps) {
    LeafCut cut;
    int meeting = 0;
    const Circle* circle = nullptr;
    const Segment* segment = nullptr;
    for (const auto& c : jumps.circles)
        if (triangle_meets_circle(tri, c)) {
            ++meeting;
            circle = &c;
        }
    for (const auto& s : jumps.segments)
        if (triangle_meets_segment(tri, s)) {
            ++meeting;
            segment = &s;
        }
    if (meeting != 1) return cut;
    const double scale = std::max({(tri[1] - tri[0]).norm(), (tri[2] - tri[1]).norm(), (tri[0] - tri[2]).norm()});
    std::vector<Vec2> pts;
    for (int i = 0; i < 3; ++i) {
        const Vec2& p = tri[i];
        const Vec2 e = tri[(i + 1) % 3] - p;
        if (circle) {
            const Vec2 f = p - circle->center;
            const double a = e.squaredNorm(), b = 2 * f.dot(e), c = f.squaredNorm() - circle->radius * circle->radius;
            const double disc = b * b - 4 * a * c;
            if (disc < 0) continue;
            const double sq = std::sqrt(disc);
            for (double t : {(-b - sq) / (2 * a), (-b + sq) / (2 * a)})
                if (t >= -1e-14 && t <= 1 + 1e-14) add_unique(pts, p + std::clamp(t, 0.0, 1.0) * e, scale);
        } else {
            const Vec2 d = segment->b - segment->a;
            const double denom = e.x() * d.y() - e.y() * d.x();
            if (std::abs(denom) < 1e-300) continue;
            const Vec2 w = segment->a - p;
            const double t = (w.x() * d.y() - w.y() * d.x()) / denom;
            const double u = (w.x() * e.y() - w.y() * e.x()) / denom;
            if (t >= -1e-14 && t <= 1 + 1e-14 && u >= -1e-14 && u <= 1 + 1e-14)
                add_unique(pts, p + std::clamp(t, 0.0, 1.0) * e, scale);
        }
    }
    if (pts.size() != 2) return cut;
    cut.ok = true;
    cut.p0 = pts[0];
    cut.p1 = pts[1];
    if (circle) {
        const double chord = (pts[1] - pts[0]).norm();
        const double theta = 2.0 * std::asin(std::min(1.0, chord / (2.0 * circle->radius)));
        cut.lens = 0.5 * circle->radius * circle->radius * (theta - std::sin(theta));
    }
    return cut;
}

// Splits the triangle along the line through p0, p1 and emits the pieces.
void emit_cut(const std::array<Vec2, 3>& tri, const Vec2& p0, const Vec2& p1, const QuadratureRule& rule,
              std::vector<QuadPoint>& out) {
    const Vec2 dir = p1 - p0;
    const Vec2 n(-dir.y(), dir.x());
    std::vector<Vec2> pos, neg;
    for (int i = 0; i < 3; ++i) {
        const Vec2& a = tri[i];
        const Vec2& b = tri[(i + 1) % 3];
        const double sa = n.dot(a - p0), sb = n.dot(b - p0);
        if (sa >= 0) pos.push_back(a);
        if (sa <= 0) neg.push_back(a);
        if ((sa > 0 && sb < 0) || (sa < 0 && sb > 0)) {
            const Vec2 x = a + (sa / (sa - sb)) * (b - a);
            pos.push_back(x);
            neg.push_back(x);
        }
    }
    for (const auto* poly : {&pos, &neg})
        for (std::size_t k = 1; k + 1 < poly->size(); ++k) {
            const std::array<Vec2, 3> piece = {(*poly)[0], (*poly)[k], (*poly)[k + 1]};
            if (tri_area(piece[0], piece[1], piece[2]) > 0) triangle_points(piece, rule, out);
        }
}

void recurse(const std::array<Vec2, 3>& tri, int depth, const JumpSet& jumps, const QuadratureRule& rule,
             const QuadratureOptions& opts, double budget, std::vector<QuadPoint>& out, double& misassigned) {
    if (!triangle_meets(tri, jumps)) {
        triangle_points(tri, rule, out);
        return;
    }
    const LeafCut cut = analyse_leaf(tri, jumps);
    const double diam = std::max({(tri[1] - tri[0]).norm(), (tri[2] - tri[1]).norm(), (tri[0] - tri[2]).norm()});
    if (cut.ok && (cut.lens <= budget * diam || depth >= opts.max_depth)) {
        emit_cut(tri, cut.p0, cut.p1, rule, out);
        misassigned += cut.lens;
        return;
    }
    if (depth >= opts.max_depth) {
        triangle_points(tri, rule, out);
        misassigned += tri_area(tri[0], tri[1], tri[2]);
        return;
    }
    const Vec2 m01 = 0.5 * (tri[0] + tri[1]), m12 = 0.5 * (tri[1] + tri[2]), m20 = 0.5 * (tri[2] + tri[0]);
    recurse({tri[0], m01, m20}, depth + 1, jumps, rule, opts, budget, out, misassigned);
    recurse({m01, tri[1], m12}, depth + 1, jumps, rule, opts, budget, out, misassigned);
    recurse({m20, m12, tri[2]}, depth + 1, jumps, rule, opts, budget, out, misassigned);
    recurse({m12, m20, m01}, depth + 1, jumps, rule, opts, budget, out, misassigned);
}

}  // namespace

const QuadratureRule& triangle_rule(int degree) {
    static const std::array<QuadratureRule, 4> rules = {make_triangle_rule(1), make_triangle_rule(2),
                                                        make_triangle_rule(4), make_triangle_rule(5)};
    for (const auto& r : rules)
        if (r.degree >= degree) return r;
    throw std::invalid_argument("triangle_rule: degree above 5 not available");
}

const QuadratureRule& interval_rule(int degree) {
    static const std::array<QuadratureRule, 5> rules = {make_interval_rule(1), make_interval_rule(2),
                                                        make_interval_rule(3), make_interval_rule(4),
                                                        make_interval_rule(5)};
    for (const auto& r : rules)
        if (r.degree >= degree) return r;
    throw std::invalid_argument("interval_rule: degree above 9 not available");
}

const QuadratureRule& simplex_rule(int dim, int degree) {
    return dim == 1 ? interval_rule(degree) : triangle_rule(degree);
}

void triangle_points(const std::array<Vec2, 3>& tri, const QuadratureRule& rule, std::vector<QuadPoint>& out) {
    const double area = tri_area(tri[0], tri[1], tri[2]);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& b = rule.points[q];
        out.push_back({b[0] * tri[0] + b[1] * tri[1] + b[2] * tri[2], rule.weights[q] * area});
    }
}

double cell_quadrature(const Mesh& mesh, Index c, const JumpSet* jumps, const QuadratureOptions& opts,
                       std::vector<QuadPoint>& out) {
    const Cell& t = mesh.cell(c);
    const QuadratureRule& rule = simplex_rule(mesh.dim(), opts.degree);
    if (mesh.dim() == 1) {
        const double a = mesh.vertex(t[0]).x(), b = mesh.vertex(t[1]).x();
        std::vector<double> cuts{a};
        if (jumps)
            for (double p : jumps->points)
                if (p > a && p < b) cuts.push_back(p);
        std::sort(cuts.begin() + 1, cuts.end());
        cuts.push_back(b);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double lo = cuts[k], hi = cuts[k + 1];
            for (std::size_t q = 0; q < rule.size(); ++q)
                out.push_back({Vec2(rule.points[q][0] * lo + rule.points[q][1] * hi, 0.0), rule.weights[q] * (hi - lo)});
        }
        return 0.0;
    }
    const std::array<Vec2, 3> tri = {mesh.vertex(t[0]), mesh.vertex(t[1]), mesh.vertex(t[2])};
    if (!jumps || jumps->empty()) {
        triangle_points(tri, rule, out);
        return 0.0;
    }
    double misassigned = 0.0;
    recurse(tri, 0, *jumps, rule, opts, 0.5 * opts.tolerance * mesh.measure(c) / mesh.diameter(c), out, misassigned);
    return misassigned / mesh.measure(c);
}

}  // namespace rof
