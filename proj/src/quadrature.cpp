#include "crvex/quadrature.hpp"

#include <cmath>

namespace crvex {

namespace {

void add_center(SimplexQuadrature& r, double w) {
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(w);
}

// Orbit of (a, a, 1-2a).
void add_orbit3(SimplexQuadrature& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  r.points.push_back({b, a, a});
  r.points.push_back({a, b, a});
  r.points.push_back({a, a, b});
  for (int i = 0; i < 3; ++i) r.weights.push_back(w);
}

// Orbit of (a, b, 1-a-b), all permutations.
void add_orbit6(SimplexQuadrature& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  r.points.push_back({a, b, c});
  r.points.push_back({a, c, b});
  r.points.push_back({b, a, c});
  r.points.push_back({b, c, a});
  r.points.push_back({c, a, b});
  r.points.push_back({c, b, a});
  for (int i = 0; i < 6; ++i) r.weights.push_back(w);
}

}  // namespace

const SimplexQuadrature& SimplexQuadrature::centroid() {
  static const SimplexQuadrature rule = [] {
    SimplexQuadrature r;
    r.degree = 1;
    add_center(r, 1.0);
    return r;
  }();
  return rule;
}

const SimplexQuadrature& SimplexQuadrature::degree2() {
  static const SimplexQuadrature rule = [] {
    SimplexQuadrature r;
    r.degree = 2;
    add_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
    return r;
  }();
  return rule;
}

const SimplexQuadrature& SimplexQuadrature::degree5() {
  static const SimplexQuadrature rule = [] {
    SimplexQuadrature r;
    r.degree = 5;
    const double s15 = std::sqrt(15.0);
    add_center(r, 9.0 / 40.0);
    add_orbit3(r, (6.0 - s15) / 21.0, (155.0 - s15) / 1200.0);
    add_orbit3(r, (6.0 + s15) / 21.0, (155.0 + s15) / 1200.0);
    return r;
  }();
  return rule;
}

// Dunavant's 16-point rule.
const SimplexQuadrature& SimplexQuadrature::degree8() {
  static const SimplexQuadrature rule = [] {
    SimplexQuadrature r;
    r.degree = 8;
    add_center(r, 0.144315607677787);
    add_orbit3(r, 0.459292588292723, 0.095091634267285);
    add_orbit3(r, 0.170569307751760, 0.103217370534718);
    add_orbit3(r, 0.050547228317031, 0.032458497623198);
    add_orbit6(r, 0.263112829634638, 0.008394777409958, 0.027230314174435);
    return r;
  }();
  return rule;
}

}  // namespace crvex
