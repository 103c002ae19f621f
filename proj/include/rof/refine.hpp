#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "rof/geometry.hpp"
#include "rof/mesh.hpp"

namespace rof {

/// Set of cell indices selected for red refinement.
struct RefinementMarks {
    std::vector<Index> cells;

    RefinementMarks() = default;
    explicit RefinementMarks(std::vector<Index> c);
    static RefinementMarks all(const Mesh& mesh);
    bool empty() const { return cells.empty(); }
    std::size_t size() const { return cells.size(); }
};

/// Outcome of a refinement step: the new mesh and, for each new cell, the
/// index of the cell of the previous mesh it was cut from.
struct Refinement {
    Mesh mesh;
    std::vector<Index> parent;
};

/// Intermediate state after red refinement of the marked cells: the marked
/// cells are split, their neighbours still carry hanging midpoints.
class HangingMesh {
public:
    HangingMesh(const Mesh& base, std::vector<char> red);

    const Mesh& base() const { return *base_; }
    bool is_red(Index c) const { return red_[c] != 0; }
    const std::vector<Vec2>& vertices() const { return vertices_; }
    const std::vector<Cell>& cells() const { return cells_; }
    const std::vector<Index>& parent() const { return parent_; }
    /// Vertices that lie in the interior of an edge of an unrefined cell.
    std::vector<Index> hanging_nodes() const;

private:
    friend Refinement rgb_close(const HangingMesh&);
    const Mesh* base_;
    std::vector<char> red_;
    std::vector<Vec2> vertices_;
    std::vector<Cell> cells_;
    std::vector<Index> parent_;
    std::unordered_map<std::uint64_t, Index> midpoints_;
};

/// Splits each marked triangle into four congruent children through its edge
/// midpoints (each marked interval into two halves). The base mesh must outlive
/// the result.
HangingMesh red_refine(const Mesh& mesh, const RefinementMarks& marks);

/// Removes hanging nodes by green (one bisection), blue (two bisections) or
/// red refinement of the remaining cells. Any cell with a marked edge also gets
/// its refinement edge marked, which keeps the family shape regular.
Refinement rgb_close(const HangingMesh& mesh);

/// red_refine followed by rgb_close.
Refinement refine(const Mesh& mesh, const RefinementMarks& marks);
Refinement refine_uniform(const Mesh& mesh);

/// Nodes xi_j = (j/J)^beta, j = 0..J, of the reference interval [0, 1].
std::vector<double> beta_graded_interval(int intervals, double beta);

/// Mesh of (-half_width, half_width) graded with strength beta towards 0:
/// the reference grid mapped onto both halves.
Mesh graded_interval_mesh(double half_width, int intervals_per_half, double beta);

/// k rounds of {mark cells meeting the set, red_refine, rgb_close}.
/// The returned vector holds T_0 ... T_k.
std::vector<Mesh> grade_towards_set(const Mesh& mesh, const JumpSet& set, int levels);

/// Least-squares slope of log h_min against log h_avg over the last
/// min(4, n) entries.
double grading_strength(std::span<const MeshStats> stats);
/// log h_min / log h_avg of a single mesh (NaN unless h_avg < 1).
double grading_ratio(const MeshStats& stats);

}  // namespace rof
