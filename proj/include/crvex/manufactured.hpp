#pragma once

#include "crvex/nfunction.hpp"
#include "crvex/types.hpp"

namespace crvex {

/// u(x) = d(x) |x|^beta with the cut-off d(x) = (1 - x1^2)(1 - x2^2) on (-1,1)^2,
/// z(x) = A(p(x), delta, grad u(x)) and f = -div z.
struct ManufacturedCase {
  double beta = 1.01;
  ExponentField exponent;
  double delta = 1e-4;
  /// Replaces d by 1 when false (pure power solution; used by symmetry tests).
  bool cutoff = true;
};

struct ExactValues {
  double u;
  Vec2 grad;
  Vec2 flux;
};

ExactValues eval_exact(const ManufacturedCase& c, const Vec2& x);

/// Central-difference step max(1e-6, 1e-7 |x|).
double load_step(const Vec2& x);

/// f(x) = -div z(x) by central differences with step load_step(x).
/// Throws std::domain_error at the origin.
double eval_load(const ManufacturedCase& c, const Vec2& x);
double eval_load(const ManufacturedCase& c, const Vec2& x, double step);

}  // namespace crvex
