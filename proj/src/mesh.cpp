#include "rof/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace rof {

namespace {

std::uint64_t side_key(Index a, Index b) {
    if (b != kNone && b < a) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
}

Side local_side(int dim, const Cell& c, int i) {
    if (dim == 1) return {c[1 - i], kNone};
    return {c[(i + 1) % 3], c[(i + 2) % 3]};
}

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

}  // namespace

Mesh::Mesh(int dim, std::vector<Vec2> vertices, std::vector<Cell> cells,
           std::span<const BoundarySide> boundary_labels)
    : dim_(dim), vertices_(std::move(vertices)), cells_(std::move(cells)) {
    if (dim_ != 1 && dim_ != 2) throw std::invalid_argument("Mesh: dimension must be 1 or 2");
    if (cells_.empty()) throw std::invalid_argument("Mesh: no cells");
    const int nv = dim_ + 1;
    const auto num_v = static_cast<Index>(vertices_.size());
    for (auto& c : cells_) {
        for (int i = 0; i < nv; ++i)
            if (c[i] < 0 || c[i] >= num_v) throw std::invalid_argument("Mesh: vertex index out of range");
        if (dim_ == 1) c[2] = kNone;
    }

    // Sides by sorting (key, cell, local) triples.
    struct Entry {
        std::uint64_t key;
        Index cell;
        int local;
    };
    std::vector<Entry> entries;
    entries.reserve(cells_.size() * nv);
    for (Index c = 0; c < num_cells(); ++c)
        for (int i = 0; i < nv; ++i) {
            const Side s = local_side(dim_, cells_[c], i);
            entries.push_back({side_key(s[0], s[1]), c, i});
        }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return std::tie(a.key, a.cell, a.local) < std::tie(b.key, b.cell, b.local);
    });
    cell_sides_.assign(cells_.size(), {kNone, kNone, kNone});
    for (std::size_t k = 0; k < entries.size();) {
        std::size_t l = k;
        while (l < entries.size() && entries[l].key == entries[k].key) ++l;
        if (l - k > 2) throw std::invalid_argument("Mesh: side shared by more than two cells");
        const auto s = static_cast<Index>(sides_.size());
        Side sv = local_side(dim_, cells_[entries[k].cell], entries[k].local);
        if (sv[1] != kNone && sv[1] < sv[0]) std::swap(sv[0], sv[1]);
        sides_.push_back(sv);
        side_cells_.push_back({entries[k].cell, l - k == 2 ? entries[k + 1].cell : kNone});
        for (std::size_t m = k; m < l; ++m) cell_sides_[entries[m].cell][entries[m].local] = s;
        k = l;
    }

    std::unordered_map<std::uint64_t, int> labels;
    for (const auto& b : boundary_labels) labels[side_key(b.vertices[0], b.vertices[1])] = b.label;
    side_labels_.assign(sides_.size(), kInteriorLabel);
    boundary_vertex_.assign(vertices_.size(), 0);
    for (Index s = 0; s < num_sides(); ++s) {
        if (!is_boundary_side(s)) continue;
        const auto it = labels.find(side_key(sides_[s][0], sides_[s][1]));
        side_labels_[s] = it == labels.end() ? kDirichletLabel : it->second;
        for (Index v : sides_[s])
            if (v != kNone) boundary_vertex_[v] = 1;
    }

    measures_.resize(cells_.size());
    diameters_.resize(cells_.size());
    barycenters_.resize(cells_.size());
    lambda_grads_.resize(cells_.size());
    for (Index c = 0; c < num_cells(); ++c) {
        const Cell& t = cells_[c];
        if (dim_ == 1) {
            const double h = vertices_[t[1]].x() - vertices_[t[0]].x();
            if (!(h > 0.0)) throw std::invalid_argument("Mesh: interval cell with nonpositive length");
            measures_[c] = h;
            diameters_[c] = h;
            barycenters_[c] = 0.5 * (vertices_[t[0]] + vertices_[t[1]]);
            lambda_grads_[c] = {Vec2(-1.0 / h, 0.0), Vec2(1.0 / h, 0.0), Vec2::Zero()};
        } else {
            const Vec2& p0 = vertices_[t[0]];
            const Vec2& p1 = vertices_[t[1]];
            const Vec2& p2 = vertices_[t[2]];
            const double area = signed_area(p0, p1, p2);
            if (!(area > 0.0)) throw std::invalid_argument("Mesh: triangle not positively oriented");
            measures_[c] = area;
            diameters_[c] = std::max({(p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
            barycenters_[c] = (p0 + p1 + p2) / 3.0;
            const double inv = 1.0 / (2.0 * area);
            lambda_grads_[c] = {Vec2(p1.y() - p2.y(), p2.x() - p1.x()) * inv,
                                Vec2(p2.y() - p0.y(), p0.x() - p2.x()) * inv,
                                Vec2(p0.y() - p1.y(), p1.x() - p0.x()) * inv};
        }
        domain_measure_ += measures_[c];
    }
}

Vec2 Mesh::side_midpoint(Index s) const {
    const Side& sd = sides_[s];
    if (dim_ == 1) return vertices_[sd[0]];
    return 0.5 * (vertices_[sd[0]] + vertices_[sd[1]]);
}

double Mesh::side_measure(Index s) const {
    if (dim_ == 1) return 1.0;
    return (vertices_[sides_[s][1]] - vertices_[sides_[s][0]]).norm();
}

Vec2 Mesh::outer_normal(Index c, int i) const {
    const Cell& t = cells_[c];
    if (dim_ == 1) {
        // Side opposite vertex 0 is the right end point.
        return i == 0 ? Vec2(1.0, 0.0) : Vec2(-1.0, 0.0);
    }
    const Vec2 e = vertices_[t[(i + 2) % 3]] - vertices_[t[(i + 1) % 3]];
    return Vec2(e.y(), -e.x()).normalized();
}

double Mesh::min_angle() const {
    if (dim_ == 1) return std::numbers::pi;
    double best = std::numbers::pi;
    for (const Cell& t : cells_)
        for (int i = 0; i < 3; ++i) {
            const Vec2 a = vertices_[t[(i + 1) % 3]] - vertices_[t[i]];
            const Vec2 b = vertices_[t[(i + 2) % 3]] - vertices_[t[i]];
            const double cosv = a.dot(b) / (a.norm() * b.norm());
            best = std::min(best, std::acos(std::clamp(cosv, -1.0, 1.0)));
        }
    return best;
}

double Mesh::max_shape_ratio() const {
    if (dim_ == 1) return 2.0;
    double worst = 0.0;
    for (Index c = 0; c < num_cells(); ++c) {
        const Cell& t = cells_[c];
        const double perimeter = (vertices_[t[1]] - vertices_[t[0]]).norm() +
                                 (vertices_[t[2]] - vertices_[t[1]]).norm() +
                                 (vertices_[t[0]] - vertices_[t[2]]).norm();
        const double inradius = 2.0 * measures_[c] / perimeter;
        worst = std::max(worst, diameters_[c] / inradius);
    }
    return worst;
}

std::vector<BoundarySide> Mesh::boundary_sides() const {
    std::vector<BoundarySide> out;
    for (Index s = 0; s < num_sides(); ++s)
        if (is_boundary_side(s)) out.push_back({sides_[s], side_labels_[s]});
    return out;
}

std::string Mesh::audit() const {
    std::ostringstream msg;
    for (Index c = 0; c < num_cells(); ++c)
        if (!(measures_[c] > 0.0)) msg << "cell " << c << " has nonpositive measure\n";
    for (Index s = 0; s < num_sides(); ++s) {
        const auto& sc = side_cells_[s];
        if (sc[0] == kNone) msg << "side " << s << " without cells\n";
        if (sc[1] != kNone) {
            // The two cells must traverse the shared edge in opposite directions.
            if (dim_ == 2) {
                auto direction = [&](Index c) {
                    const int i = cell_sides_[c][0] == s ? 0 : cell_sides_[c][1] == s ? 1 : 2;
                    return cells_[c][(i + 1) % 3];
                };
                if (direction(sc[0]) == direction(sc[1]))
                    msg << "side " << s << " traversed with equal orientation\n";
            }
        }
    }
    if (dim_ == 2) {
        // A hanging node sits at the midpoint of an unshared edge.
        std::map<std::pair<double, double>, Index> by_coord;
        for (Index v = 0; v < num_vertices(); ++v) by_coord[{vertices_[v].x(), vertices_[v].y()}] = v;
        std::vector<int> degree(vertices_.size(), 0);
        for (Index s = 0; s < num_sides(); ++s) {
            if (!is_boundary_side(s)) continue;
            const Vec2 m = 0.5 * (vertices_[sides_[s][0]] + vertices_[sides_[s][1]]);
            if (by_coord.count({m.x(), m.y()}))
                msg << "hanging node " << by_coord[{m.x(), m.y()}] << " on side " << s << "\n";
            ++degree[sides_[s][0]];
            ++degree[sides_[s][1]];
        }
        for (Index v = 0; v < num_vertices(); ++v)
            if (degree[v] != 0 && degree[v] != 2) msg << "boundary vertex " << v << " has degree " << degree[v] << "\n";
    }
    return msg.str();
}

MeshStats mesh_stats(const Mesh& mesh) {
    MeshStats st;
    st.num_vertices = mesh.num_vertices();
    st.num_cells = mesh.num_cells();
    st.num_sides = mesh.num_sides();
    st.h_min = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        st.h_min = std::min(st.h_min, mesh.diameter(c));
        st.h_max = std::max(st.h_max, mesh.diameter(c));
    }
    st.h_avg = std::pow(mesh.domain_measure() / st.num_vertices, 1.0 / mesh.dim());
    return st;
}

Mesh make_interval_mesh(double a, double b, std::span<const double> points) {
    if (!(a < b)) throw std::invalid_argument("make_interval_mesh: requires a < b");
    if (points.size() < 2 || points.front() != a || points.back() != b)
        throw std::invalid_argument("make_interval_mesh: points must start at a and end at b");
    std::vector<Vec2> vertices;
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i > 0 && !(points[i] > points[i - 1]))
            throw std::invalid_argument("make_interval_mesh: points must be strictly increasing");
        vertices.emplace_back(points[i], 0.0);
        if (i > 0) cells.push_back({static_cast<Index>(i - 1), static_cast<Index>(i), kNone});
    }
    return Mesh(1, std::move(vertices), std::move(cells));
}

Mesh make_square_mesh(double half_width, SquareLayout layout) {
    if (!(half_width > 0.0)) throw std::invalid_argument("make_square_mesh: half width must be positive");
    const double l = half_width;
    std::vector<Vec2> v = {Vec2(-l, -l), Vec2(l, -l), Vec2(l, l), Vec2(-l, l)};
    std::vector<Cell> cells;
    if (layout == SquareLayout::TwoCells) {
        // Diagonal (0,2) is the refinement edge of both cells.
        cells = {{2, 0, 1}, {0, 2, 3}};
    } else {
        v.emplace_back(0.0, 0.0);
        cells = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
    }
    return Mesh(2, std::move(v), std::move(cells));
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
    const auto boundary = mesh.boundary_sides();
    const int d = mesh.dim();
    os << d << ' ' << mesh.num_vertices() << ' ' << mesh.num_cells() << ' ' << boundary.size() << '\n';
    char buf[64];
    for (const Vec2& p : mesh.vertices()) {
        for (int k = 0; k < d; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", p[k]);
            os << (k ? " " : "") << buf;
        }
        os << '\n';
    }
    for (const Cell& c : mesh.cells()) {
        for (int k = 0; k <= d; ++k) os << (k ? " " : "") << c[k];
        os << '\n';
    }
    for (const auto& b : boundary) {
        for (int k = 0; k < d; ++k) os << b.vertices[k] << ' ';
        os << b.label << '\n';
    }
}

Mesh read_mesh(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&](const char* what) {
        while (std::getline(is, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(line);
        }
        throw ParseError("mesh: unexpected end of file while reading " + std::string(what));
    };
    auto fail = [&](const std::string& what) {
        throw ParseError("mesh line " + std::to_string(line_no) + ": " + what);
    };
    int d = 0;
    long nv = 0, nc = 0, nb = 0;
    {
        auto ls = next_line("header");
        if (!(ls >> d >> nv >> nc >> nb) || (d != 1 && d != 2) || nv <= 0 || nc <= 0 || nb < 0)
            fail("malformed header, expected `dim N_vertices N_cells N_boundary_sides`");
    }
    std::vector<Vec2> vertices(nv, Vec2::Zero());
    for (long i = 0; i < nv; ++i) {
        auto ls = next_line("vertices");
        std::string tok;
        for (int k = 0; k < d; ++k) {
            if (!(ls >> tok)) fail("missing vertex coordinate");
            char* end = nullptr;
            vertices[i][k] = std::strtod(tok.c_str(), &end);
            if (*end != '\0') fail("invalid coordinate `" + tok + "`");
        }
    }
    std::vector<Cell> cells(nc, Cell{kNone, kNone, kNone});
    for (long i = 0; i < nc; ++i) {
        auto ls = next_line("cells");
        for (int k = 0; k <= d; ++k)
            if (!(ls >> cells[i][k]) || cells[i][k] < 0 || cells[i][k] >= nv) fail("invalid cell vertex index");
    }
    std::vector<BoundarySide> labels(nb);
    for (long i = 0; i < nb; ++i) {
        auto ls = next_line("boundary sides");
        labels[i].vertices = {kNone, kNone};
        for (int k = 0; k < d; ++k)
            if (!(ls >> labels[i].vertices[k])) fail("invalid boundary side");
        if (!(ls >> labels[i].label)) fail("missing boundary label");
    }
    try {
        return Mesh(d, std::move(vertices), std::move(cells), labels);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("mesh: ") + e.what());
    }
}

}  // namespace rof
