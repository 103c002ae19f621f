#include "rof/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rof {

namespace {

std::uint64_t edge_key(Index a, Index b) {
    if (b < a) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

struct MidpointRegistry {
    std::vector<Vec2>& vertices;
    std::unordered_map<std::uint64_t, Index>& table;

    Index get(Index a, Index b) {
        const auto key = edge_key(a, b);
        if (auto it = table.find(key); it != table.end()) return it->second;
        const auto id = static_cast<Index>(vertices.size());
        vertices.push_back(0.5 * (vertices[a] + vertices[b]));
        table.emplace(key, id);
        return id;
    }
    bool has(Index a, Index b) const { return table.count(edge_key(a, b)) != 0; }
};

void push_red(const Cell& t, MidpointRegistry& mid, std::vector<Cell>& out) {
    const Index a = t[0], b = t[1], c = t[2];
    const Index mab = mid.get(a, b), mbc = mid.get(b, c), mca = mid.get(c, a);
    out.push_back({a, mab, mca});
    out.push_back({mab, b, mbc});
    out.push_back({mca, mbc, c});
    out.push_back({mbc, mca, mab});
}

// Bisection of the refinement edge (t[0], t[1]); the new vertex is opposite the
// refinement edges of both children.
std::array<Cell, 2> bisect(const Cell& t, Index m) { return {Cell{t[2], t[0], m}, Cell{t[1], t[2], m}}; }

}  // namespace

RefinementMarks::RefinementMarks(std::vector<Index> c) : cells(std::move(c)) {
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
}

RefinementMarks RefinementMarks::all(const Mesh& mesh) {
    RefinementMarks m;
    m.cells.resize(mesh.num_cells());
    for (Index c = 0; c < mesh.num_cells(); ++c) m.cells[c] = c;
    return m;
}

HangingMesh::HangingMesh(const Mesh& base, std::vector<char> red)
    : base_(&base), red_(std::move(red)), vertices_(base.vertices()) {
    MidpointRegistry mid{vertices_, midpoints_};
    for (Index c = 0; c < base.num_cells(); ++c) {
        const Cell& t = base.cell(c);
        const auto before = cells_.size();
        if (!red_[c]) {
            cells_.push_back(t);
        } else if (base.dim() == 1) {
            const Index m = mid.get(t[0], t[1]);
            cells_.push_back({t[0], m, kNone});
            cells_.push_back({m, t[1], kNone});
        } else {
            push_red(t, mid, cells_);
        }
        parent_.insert(parent_.end(), cells_.size() - before, c);
    }
}

std::vector<Index> HangingMesh::hanging_nodes() const {
    std::vector<Index> out;
    if (base_->dim() == 1) return out;
    for (Index c = 0; c < base_->num_cells(); ++c) {
        if (red_[c]) continue;
        const Cell& t = base_->cell(c);
        for (int i = 0; i < 3; ++i) {
            const auto it = midpoints_.find(edge_key(t[i], t[(i + 1) % 3]));
            if (it != midpoints_.end()) out.push_back(it->second);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

HangingMesh red_refine(const Mesh& mesh, const RefinementMarks& marks) {
    std::vector<char> red(mesh.num_cells(), 0);
    for (Index c : marks.cells) {
        if (c < 0 || c >= mesh.num_cells()) throw std::invalid_argument("red_refine: mark out of range");
        red[c] = 1;
    }
    return HangingMesh(mesh, std::move(red));
}

Refinement rgb_close(const HangingMesh& hm) {
    const Mesh& base = hm.base();
    std::vector<Vec2> vertices = base.vertices();
    std::unordered_map<std::uint64_t, Index> table;
    MidpointRegistry mid{vertices, table};

    if (base.dim() == 1) {
        std::vector<Cell> cells;
        std::vector<Index> parent;
        for (Index c = 0; c < base.num_cells(); ++c) {
            const Cell& t = base.cell(c);
            if (hm.is_red(c)) {
                const Index m = mid.get(t[0], t[1]);
                cells.push_back({t[0], m, kNone});
                cells.push_back({m, t[1], kNone});
                parent.insert(parent.end(), 2, c);
            } else {
                cells.push_back(t);
                parent.push_back(c);
            }
        }
        const auto labels = base.boundary_sides();
        return {Mesh(1, std::move(vertices), std::move(cells), labels), std::move(parent)};
    }

    // Marked edges, keyed by sorted vertex pair. Midpoints are registered in
    // the same order as red_refine creates them, so vertex numbering agrees.
    std::vector<char> marked_side(base.num_sides(), 0);
    for (Index c = 0; c < base.num_cells(); ++c) {
        if (!hm.is_red(c)) continue;
        const Cell& t = base.cell(c);
        mid.get(t[0], t[1]);
        mid.get(t[1], t[2]);
        mid.get(t[2], t[0]);
        for (Index s : base.cell_sides(c)) marked_side[s] = 1;
    }

    // Closure: any cell with a marked edge needs its refinement edge marked.
    // The refinement edge (v0, v1) is local side 2.
    std::vector<Index> work;
    for (Index s = 0; s < base.num_sides(); ++s)
        if (marked_side[s])
            for (Index c : base.side_cells(s))
                if (c != kNone) work.push_back(c);
    std::size_t guard = 0;
    const std::size_t guard_limit = 4 * static_cast<std::size_t>(base.num_sides()) + 16;
    while (!work.empty()) {
        if (++guard > guard_limit) throw NumericalError("rgb_close: closure did not terminate");
        const Index c = work.back();
        work.pop_back();
        const auto& cs = base.cell_sides(c);
        const Index ref = cs[2];
        if (marked_side[ref]) continue;
        if (!marked_side[cs[0]] && !marked_side[cs[1]]) continue;
        marked_side[ref] = 1;
        for (Index n : base.side_cells(ref))
            if (n != kNone && n != c) work.push_back(n);
    }

    std::vector<Cell> cells;
    std::vector<Index> parent;
    cells.reserve(base.num_cells() * 2);
    for (Index c = 0; c < base.num_cells(); ++c) {
        const Cell& t = base.cell(c);
        const auto& cs = base.cell_sides(c);
        const bool on_bc = marked_side[cs[0]] != 0;  // edge (v1, v2)
        const bool on_ca = marked_side[cs[1]] != 0;  // edge (v2, v0)
        const bool on_ab = marked_side[cs[2]] != 0;  // refinement edge
        const auto before = cells.size();
        if (hm.is_red(c) || (on_ab && on_bc && on_ca)) {
            push_red(t, mid, cells);
        } else if (on_ab) {
            const Index m = mid.get(t[0], t[1]);
            const auto [left, right] = bisect(t, m);  // left = (v2, v0, m), right = (v1, v2, m)
            if (on_ca) {
                const auto halves = bisect(left, mid.get(left[0], left[1]));
                cells.push_back(halves[0]);
                cells.push_back(halves[1]);
            } else {
                cells.push_back(left);
            }
            if (on_bc) {
                const auto halves = bisect(right, mid.get(right[0], right[1]));
                cells.push_back(halves[0]);
                cells.push_back(halves[1]);
            } else {
                cells.push_back(right);
            }
        } else {
            if (on_bc || on_ca) throw NumericalError("rgb_close: refinement edge left unmarked");
            cells.push_back(t);
        }
        parent.insert(parent.end(), cells.size() - before, c);
    }

    std::vector<BoundarySide> labels;
    for (Index s = 0; s < base.num_sides(); ++s) {
        if (!base.is_boundary_side(s)) continue;
        const Side& e = base.side(s);
        const int label = base.side_label(s);
        if (marked_side[s]) {
            const Index m = mid.get(e[0], e[1]);
            labels.push_back({{e[0], m}, label});
            labels.push_back({{m, e[1]}, label});
        } else {
            labels.push_back({e, label});
        }
    }
    return {Mesh(2, std::move(vertices), std::move(cells), labels), std::move(parent)};
}

Refinement refine(const Mesh& mesh, const RefinementMarks& marks) { return rgb_close(red_refine(mesh, marks)); }

Refinement refine_uniform(const Mesh& mesh) { return refine(mesh, RefinementMarks::all(mesh)); }

std::vector<double> beta_graded_interval(int intervals, double beta) {
    if (intervals < 1) throw std::invalid_argument("beta_graded_interval: J must be >= 1");
    if (!(beta >= 1.0)) throw std::invalid_argument("beta_graded_interval: beta must be >= 1");
    std::vector<double> xi(intervals + 1);
    for (int j = 0; j <= intervals; ++j) xi[j] = std::pow(static_cast<double>(j) / intervals, beta);
    xi.back() = 1.0;
    return xi;
}

Mesh graded_interval_mesh(double half_width, int intervals_per_half, double beta) {
    const auto xi = beta_graded_interval(intervals_per_half, beta);
    std::vector<double> pts;
    pts.reserve(2 * xi.size() - 1);
    for (auto it = xi.rbegin(); it != xi.rend(); ++it) pts.push_back(-half_width * *it);
    for (std::size_t j = 1; j < xi.size(); ++j) pts.push_back(half_width * xi[j]);
    pts[intervals_per_half] = 0.0;
    return make_interval_mesh(-half_width, half_width, pts);
}

std::vector<Mesh> grade_towards_set(const Mesh& mesh, const JumpSet& set, int levels) {
    if (levels < 0) throw std::invalid_argument("grade_towards_set: levels must be >= 0");
    std::vector<Mesh> seq{mesh};
    for (int k = 0; k < levels; ++k) {
        const Mesh& cur = seq.back();
        std::vector<Index> marks;
        for (Index c = 0; c < cur.num_cells(); ++c)
            if (cell_meets(cur, c, set)) marks.push_back(c);
        if (marks.empty()) throw NumericalError("grade_towards_set: no cell meets the target set");
        seq.push_back(refine(cur, RefinementMarks(std::move(marks))).mesh);
    }
    return seq;
}

double grading_strength(std::span<const MeshStats> stats) {
    if (stats.size() < 2) throw std::invalid_argument("grading_strength: need at least two levels");
    const std::size_t n = std::min<std::size_t>(4, stats.size());
    const auto tail = stats.subspan(stats.size() - n);
    double mx = 0, my = 0;
    for (const auto& s : tail) {
        mx += std::log(s.h_avg);
        my += std::log(s.h_min);
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (const auto& s : tail) {
        const double dx = std::log(s.h_avg) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(s.h_min) - my);
    }
    if (!(sxx > 0)) throw std::invalid_argument("grading_strength: average mesh size does not vary");
    return sxy / sxx;
}

double grading_ratio(const MeshStats& stats) {
    if (!(stats.h_avg < 1.0) || !(stats.h_min > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return std::log(stats.h_min) / std::log(stats.h_avg);
}

}  // namespace rof
