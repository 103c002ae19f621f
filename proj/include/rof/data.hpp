#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>

#include "rof/geometry.hpp"

namespace rof {

/// x -> Q x + b with orthogonal Q.
struct AffineMap {
    Eigen::Matrix2d Q = Eigen::Matrix2d::Identity();
    Vec2 b = Vec2::Zero();

    static AffineMap rotation(double angle_rad, const Vec2& shift = Vec2::Zero());
    Vec2 apply(const Vec2& x) const { return Q * x + b; }
    Vec2 inverse(const Vec2& y) const { return Q.transpose() * (y - b); }
    bool is_identity() const { return Q.isIdentity(0.0) && b.isZero(0.0); }
};

enum class DataKind { CharBall, TwoBalls, Sign1D, Custom };

std::string to_string(DataKind kind);

/// Input image g, optionally composed with an affine change of variables:
/// g(x) = g_ref(Phi(x)). Characteristic functions use closed balls.
class DataFunction {
public:
    using Callable = std::function<double(const Vec2&)>;

    /// chi of the closed ball B_r(center).
    static DataFunction char_ball(const Vec2& center, double radius);
    /// chi_{B_r(r,0)} - chi_{B_r(-r,0)}; the balls touch at the origin.
    static DataFunction two_balls(double radius);
    /// sign(x_1) with sign(0) = 0.
    static DataFunction sign_1d();
    static DataFunction custom(Callable f, JumpSet jumps = {}, double sup_norm = 1.0);

    /// Same data evaluated at Phi(x).
    DataFunction transformed(const AffineMap& phi) const;

    double operator()(const Vec2& x) const;
    DataKind kind() const { return kind_; }
    double radius() const { return radius_; }
    const Vec2& center() const { return center_; }
    const AffineMap& transform() const { return phi_; }
    /// Discontinuity set in physical coordinates.
    const JumpSet& jump_set() const { return jumps_; }
    double sup_norm() const { return sup_; }

private:
    DataFunction() = default;
    double reference_value(const Vec2& y) const;
    void update_jumps();

    DataKind kind_ = DataKind::Custom;
    Vec2 center_ = Vec2::Zero();
    double radius_ = 0.0;
    Callable custom_;
    AffineMap phi_;
    JumpSet reference_jumps_;
    JumpSet jumps_;
    double sup_ = 1.0;
};

}  // namespace rof
