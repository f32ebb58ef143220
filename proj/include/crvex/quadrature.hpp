#pragma once

#include "crvex/types.hpp"

#include <array>
#include <vector>

namespace crvex {

/// Symmetric quadrature rule on a triangle in barycentric coordinates.
/// Weights are normalized to sum to 1, so an integral over T is
/// |T| * sum_q w_q f(x_q). All points are strictly interior.
struct SimplexQuadrature {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  int size() const { return static_cast<int>(weights.size()); }

  /// Maps barycentric point q onto the triangle (a, b, c).
  Vec2 map(int q, const Vec2& a, const Vec2& b, const Vec2& c) const {
    const auto& l = points[q];
    return l[0] * a + l[1] * b + l[2] * c;
  }

  static const SimplexQuadrature& centroid();   // degree 1, 1 point
  static const SimplexQuadrature& degree2();    // 3 interior points
  static const SimplexQuadrature& degree5();    // 7 points
  static const SimplexQuadrature& degree8();    // 16 points

  /// Default rule for non-polynomial integrands.
  static const SimplexQuadrature& high_order() { return degree8(); }
};

}  // namespace crvex
