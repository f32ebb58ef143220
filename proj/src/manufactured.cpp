#include "crvex/manufactured.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crvex {

ExactValues eval_exact(const ManufacturedCase& c, const Vec2& x) {
  const double r = x.norm();
  double d = 1.0;
  Vec2 grad_d = Vec2::Zero();
  if (c.cutoff) {
    const double a = 1.0 - x.x() * x.x();
    const double b = 1.0 - x.y() * x.y();
    d = a * b;
    grad_d = Vec2(-2.0 * x.x() * b, -2.0 * x.y() * a);
  }
  ExactValues out;
  if (r == 0.0) {
    out.u = 0.0;
    out.grad = Vec2::Zero();
  } else {
    const double rb = std::pow(r, c.beta);
    out.u = d * rb;
    out.grad = rb * grad_d + (d * c.beta * rb / (r * r)) * x;
  }
  out.flux = eval_A(c.exponent(x), c.delta, out.grad);
  return out;
}

double load_step(const Vec2& x) { return std::max(1e-6, 1e-7 * x.norm()); }

double eval_load(const ManufacturedCase& c, const Vec2& x) {
  return eval_load(c, x, load_step(x));
}

double eval_load(const ManufacturedCase& c, const Vec2& x, double step) {
  if (x.norm() == 0.0) throw std::domain_error("load is undefined at the origin");
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  const Vec2 e1(step, 0.0);
  const Vec2 e2(0.0, step);
  const double d1 = eval_exact(c, x + e1).flux.x() - eval_exact(c, x - e1).flux.x();
  const double d2 = eval_exact(c, x + e2).flux.y() - eval_exact(c, x - e2).flux.y();
  return -(d1 + d2) / (2.0 * step);
}

}  // namespace crvex
