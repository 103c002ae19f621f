#pragma once

#include <memory>
#include <random>

#include "rof/estimator.hpp"
#include "rof/experiments.hpp"

namespace rof::test {

inline MeshPtr share(Mesh m) { return std::make_shared<const Mesh>(std::move(m)); }

inline Mesh reference_triangle() {
    return Mesh(2, {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)}, {Cell{0, 1, 2}});
}

inline Mesh refined_square(int levels, SquareLayout layout = SquareLayout::TwoCells) {
    Mesh m = make_square_mesh(1.0, layout);
    for (int k = 0; k < levels; ++k) m = refine_uniform(m).mesh;
    return m;
}

/// Mesh with randomly perturbed interior vertices (still conforming and positively oriented).
inline Mesh perturbed_square(int levels, std::mt19937& rng, double amount = 0.2) {
    const Mesh m = refined_square(levels);
    const double h = 2.0 / (1 << levels);
    std::uniform_real_distribution<double> u(-amount * h, amount * h);
    std::vector<Vec2> v = m.vertices();
    for (Index i = 0; i < m.num_vertices(); ++i)
        if (!m.is_boundary_vertex(i)) v[i] += Vec2(u(rng), u(rng));
    return Mesh(2, v, m.cells());
}

/// Random cubic polynomial in two variables with its gradient.
struct Cubic {
    std::array<double, 10> c{};
    double operator()(const Vec2& x) const {
        const double a = x.x(), b = x.y();
        return c[0] + c[1] * a + c[2] * b + c[3] * a * a + c[4] * a * b + c[5] * b * b + c[6] * a * a * a +
               c[7] * a * a * b + c[8] * a * b * b + c[9] * b * b * b;
    }
    Vec2 gradient(const Vec2& x) const {
        const double a = x.x(), b = x.y();
        return Vec2(c[1] + 2 * c[3] * a + c[4] * b + 3 * c[6] * a * a + 2 * c[7] * a * b + c[8] * b * b,
                    c[2] + c[4] * a + 2 * c[5] * b + c[7] * a * a + 2 * c[8] * a * b + 3 * c[9] * b * b);
    }
    static Cubic random(std::mt19937& rng) {
        std::normal_distribution<double> n;
        Cubic p;
        for (auto& v : p.c) v = n(rng);
        return p;
    }
};

}  // namespace rof::test
