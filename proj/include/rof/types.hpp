#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace rof {

using Index = std::int32_t;
using Vec2 = Eigen::Vector2d;

/// Raised when a numerical procedure cannot deliver its contract
/// (solver breakdown, closure cycle, exhausted quadrature budget, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input files and configuration blocks.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rof
