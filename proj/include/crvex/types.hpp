#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace crvex {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Thrown when an iterative numerical procedure (root finding, Newton) fails.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How element loops are executed. Both policies produce bitwise identical
/// results: element contributions are computed independently and reduced in
/// element order.
enum class ExecPolicy { Serial, OpenMP };

}  // namespace crvex
