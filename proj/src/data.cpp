#include "rof/data.hpp"

#include <cmath>
#include <stdexcept>

namespace rof {

AffineMap AffineMap::rotation(double angle_rad, const Vec2& shift) {
    AffineMap m;
    const double c = std::cos(angle_rad), s = std::sin(angle_rad);
    m.Q << c, -s, s, c;
    m.b = shift;
    return m;
}

std::string to_string(DataKind kind) {
    switch (kind) {
        case DataKind::CharBall: return "char_ball";
        case DataKind::TwoBalls: return "two_balls";
        case DataKind::Sign1D: return "sign_1d";
        case DataKind::Custom: return "custom";
    }
    return "custom";
}

DataFunction DataFunction::char_ball(const Vec2& center, double radius) {
    if (!(radius > 0)) throw std::invalid_argument("char_ball: radius must be positive");
    DataFunction g;
    g.kind_ = DataKind::CharBall;
    g.center_ = center;
    g.radius_ = radius;
    g.reference_jumps_.circles.push_back({center, radius});
    g.update_jumps();
    return g;
}

DataFunction DataFunction::two_balls(double radius) {
    if (!(radius > 0)) throw std::invalid_argument("two_balls: radius must be positive");
    DataFunction g;
    g.kind_ = DataKind::TwoBalls;
    g.radius_ = radius;
    g.reference_jumps_.circles.push_back({Vec2(radius, 0), radius});
    g.reference_jumps_.circles.push_back({Vec2(-radius, 0), radius});
    g.update_jumps();
    return g;
}

DataFunction DataFunction::sign_1d() {
    DataFunction g;
    g.kind_ = DataKind::Sign1D;
    g.reference_jumps_.points.push_back(0.0);
    g.update_jumps();
    return g;
}

DataFunction DataFunction::custom(Callable f, JumpSet jumps, double sup_norm) {
    DataFunction g;
    g.kind_ = DataKind::Custom;
    g.custom_ = std::move(f);
    g.reference_jumps_ = std::move(jumps);
    g.sup_ = sup_norm;
    g.update_jumps();
    return g;
}

DataFunction DataFunction::transformed(const AffineMap& phi) const {
    if (kind_ == DataKind::Sign1D && !phi.is_identity())
        throw std::invalid_argument("DataFunction: affine transforms apply to 2D data only");
    DataFunction g = *this;
    // Composition: g(Phi_new(x)) evaluated through the existing map.
    AffineMap composed;
    composed.Q = phi_.Q * phi.Q;
    composed.b = phi_.Q * phi.b + phi_.b;
    g.phi_ = composed;
    g.update_jumps();
    return g;
}

void DataFunction::update_jumps() {
    jumps_ = reference_jumps_;
    for (auto& c : jumps_.circles) c.center = phi_.inverse(c.center);
    for (auto& s : jumps_.segments) {
        s.a = phi_.inverse(s.a);
        s.b = phi_.inverse(s.b);
    }
}

double DataFunction::reference_value(const Vec2& y) const {
    switch (kind_) {
        case DataKind::CharBall: return (y - center_).norm() <= radius_ ? 1.0 : 0.0;
        case DataKind::TwoBalls: {
            const double plus = (y - Vec2(radius_, 0)).norm() <= radius_ ? 1.0 : 0.0;
            const double minus = (y - Vec2(-radius_, 0)).norm() <= radius_ ? 1.0 : 0.0;
            return plus - minus;
        }
        case DataKind::Sign1D: return y.x() > 0 ? 1.0 : (y.x() < 0 ? -1.0 : 0.0);
        case DataKind::Custom: return custom_(y);
    }
    return 0.0;
}

double DataFunction::operator()(const Vec2& x) const { return reference_value(phi_.apply(x)); }

}  // namespace rof
