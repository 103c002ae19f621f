#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rof/types.hpp"

namespace rof {

/// Vertex indices of a simplex. Intervals use the first two entries.
using Cell = std::array<Index, 3>;
/// Vertex indices of a side: an edge in 2D, a single vertex in 1D (second entry -1).
using Side = std::array<Index, 2>;

inline constexpr Index kNone = -1;

/// Label stored for interior sides.
inline constexpr int kInteriorLabel = 0;
/// Default label of boundary sides; all boundary sides carry Dirichlet data unless relabeled.
inline constexpr int kDirichletLabel = 1;

struct BoundarySide {
    Side vertices;
    int label = kDirichletLabel;
};

/// Conforming simplicial triangulation of an interval (d = 1) or a polygon (d = 2).
///
/// Cells are stored positively oriented. In 2D the first two vertices of a cell
/// span its refinement edge; `red_refine` and `rgb_close` rely on this ordering.
/// Local side i of a cell is the side opposite local vertex i.
///
/// Instances are immutable once constructed.
class Mesh {
public:
    Mesh(int dim, std::vector<Vec2> vertices, std::vector<Cell> cells,
         std::span<const BoundarySide> boundary_labels = {});

    int dim() const { return dim_; }
    int vertices_per_cell() const { return dim_ + 1; }

    Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
    Index num_cells() const { return static_cast<Index>(cells_.size()); }
    Index num_sides() const { return static_cast<Index>(sides_.size()); }

    const std::vector<Vec2>& vertices() const { return vertices_; }
    const Vec2& vertex(Index v) const { return vertices_[v]; }
    const std::vector<Cell>& cells() const { return cells_; }
    const Cell& cell(Index c) const { return cells_[c]; }
    const std::vector<Side>& sides() const { return sides_; }
    const Side& side(Index s) const { return sides_[s]; }

    /// Adjacent cells of a side; the second entry is kNone on the boundary.
    const std::array<Index, 2>& side_cells(Index s) const { return side_cells_[s]; }
    /// Global side index of local side i (opposite local vertex i).
    const std::array<Index, 3>& cell_sides(Index c) const { return cell_sides_[c]; }

    bool is_boundary_side(Index s) const { return side_cells_[s][1] == kNone; }
    int side_label(Index s) const { return side_labels_[s]; }
    bool is_boundary_vertex(Index v) const { return boundary_vertex_[v] != 0; }

    double measure(Index c) const { return measures_[c]; }
    double diameter(Index c) const { return diameters_[c]; }
    const Vec2& barycenter(Index c) const { return barycenters_[c]; }
    /// Gradient of the barycentric coordinate of local vertex i.
    const Vec2& lambda_gradient(Index c, int i) const { return lambda_grads_[c][i]; }
    /// Side barycenter x_S.
    Vec2 side_midpoint(Index s) const;
    /// Side measure (edge length; 1 in 1D).
    double side_measure(Index s) const;
    /// Outer unit normal of cell c on its local side i.
    Vec2 outer_normal(Index c, int i) const;

    double domain_measure() const { return domain_measure_; }
    /// Smallest interior angle over all cells (radians); pi for 1D meshes.
    double min_angle() const;
    /// Largest diam(T)/inradius(T) over all cells (2D), or 2 in 1D.
    double max_shape_ratio() const;

    /// Boundary sides with their labels, in side order.
    std::vector<BoundarySide> boundary_sides() const;

    /// Exhaustive audit of the conformity and orientation invariants.
    /// Returns an empty string for a valid mesh, otherwise a description.
    std::string audit() const;

private:
    int dim_;
    std::vector<Vec2> vertices_;
    std::vector<Cell> cells_;
    std::vector<Side> sides_;
    std::vector<std::array<Index, 2>> side_cells_;
    std::vector<std::array<Index, 3>> cell_sides_;
    std::vector<int> side_labels_;
    std::vector<char> boundary_vertex_;
    std::vector<double> measures_;
    std::vector<double> diameters_;
    std::vector<Vec2> barycenters_;
    std::vector<std::array<Vec2, 3>> lambda_grads_;
    double domain_measure_ = 0.0;
};

struct MeshStats {
    Index num_vertices = 0;
    Index num_cells = 0;
    Index num_sides = 0;
    double h_min = 0.0;
    double h_max = 0.0;
    /// (|Omega| / N_vertices)^(1/d).
    double h_avg = 0.0;
};

MeshStats mesh_stats(const Mesh& mesh);

/// Interval mesh of [a, b] with the given strictly increasing nodes, whose
/// first and last entries must equal a and b.
Mesh make_interval_mesh(double a, double b, std::span<const double> points);

enum class SquareLayout { TwoCells, FourCells };

/// Triangulation of (-half_width, half_width)^2 with two right triangles
/// (diagonal from (-l,-l) to (l,l)) or four triangles meeting at the center.
Mesh make_square_mesh(double half_width, SquareLayout layout = SquareLayout::TwoCells);

/// Text format: `dim Nv Nc Nb`, vertex coordinates, cells, boundary sides with labels.
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

}  // namespace rof
