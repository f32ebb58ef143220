#include "crvex/fem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crvex {

namespace {

void finalize_free(DofMap& map) {
  map.free_index.assign(map.num_dofs, -1);
  map.free_dofs.clear();
  for (int d = 0; d < map.num_dofs; ++d) {
    if (!map.constrained[d]) {
      map.free_index[d] = static_cast<int>(map.free_dofs.size());
      map.free_dofs.push_back(d);
    }
  }
}

}  // namespace

CRSpace::CRSpace(const Triangulation& mesh, const MeshMetrics& metrics)
    : mesh_(&mesh), metrics_(&metrics) {
  const int nt = mesh.num_elements();
  map_.num_dofs = mesh.num_sides();
  map_.element_dofs = mesh.element_sides();
  map_.area = metrics.area;
  map_.basis_gradients.resize(nt);
  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < 3; ++i) map_.basis_gradients[t][i] = -2.0 * metrics.grad_lambda[t][i];
  }
  map_.constrained.assign(map_.num_dofs, 0);
  for (int s = 0; s < mesh.num_sides(); ++s) {
    map_.constrained[s] = mesh.boundary_labels()[s] == BoundaryLabel::Dirichlet;
  }
  finalize_free(map_);
}

CRField CRSpace::interpolate(const std::function<double(const Vec2&)>& v, bool clamp) const {
  CRField u = zero();
  for (int s = 0; s < mesh_->num_sides(); ++s) {
    u.dofs[s] = (clamp && map_.constrained[s]) ? 0.0 : v(metrics_->x_S[s]);
  }
  return u;
}

double CRSpace::evaluate(const CRField& u, int t, const Vec2& x) const {
  const auto lambda = barycentric(*mesh_, *metrics_, t, x);
  const auto& sides = mesh_->element_sides()[t];
  double value = 0.0;
  for (int i = 0; i < 3; ++i) value += u.dofs[sides[i]] * (1.0 - 2.0 * lambda[i]);
  return value;
}

P1Space::P1Space(const Triangulation& mesh, const MeshMetrics& metrics)
    : mesh_(&mesh), metrics_(&metrics) {
  map_.num_dofs = mesh.num_vertices();
  map_.element_dofs = mesh.elements();
  map_.area = metrics.area;
  map_.basis_gradients = metrics.grad_lambda;
  map_.constrained.assign(map_.num_dofs, 0);
  for (int s = 0; s < mesh.num_sides(); ++s) {
    if (mesh.boundary_labels()[s] == BoundaryLabel::Dirichlet) {
      map_.constrained[mesh.sides()[s][0]] = 1;
      map_.constrained[mesh.sides()[s][1]] = 1;
    }
  }
  finalize_free(map_);
}

P1Field P1Space::interpolate(const std::function<double(const Vec2&)>& v, bool clamp) const {
  P1Field u{std::vector<double>(map_.num_dofs, 0.0)};
  for (int i = 0; i < map_.num_dofs; ++i) {
    u.dofs[i] = (clamp && map_.constrained[i]) ? 0.0 : v(mesh_->vertices()[i]);
  }
  return u;
}

double P1Space::evaluate(const P1Field& u, int t, const Vec2& x) const {
  const auto lambda = barycentric(*mesh_, *metrics_, t, x);
  const auto& e = mesh_->elements()[t];
  return lambda[0] * u.dofs[e[0]] + lambda[1] * u.dofs[e[1]] + lambda[2] * u.dofs[e[2]];
}

RT0Space::RT0Space(const Triangulation& mesh, const MeshMetrics& metrics)
    : mesh_(&mesh), metrics_(&metrics) {
  neumann_.assign(mesh.num_sides(), 0);
  for (int s = 0; s < mesh.num_sides(); ++s) {
    neumann_[s] = mesh.boundary_labels()[s] == BoundaryLabel::Neumann;
  }
}

RT0Field RT0Space::interpolate(const std::function<Vec2(const Vec2&)>& y) const {
  RT0Field f{std::vector<double>(mesh_->num_sides(), 0.0)};
  for (int s = 0; s < mesh_->num_sides(); ++s) {
    f.dofs[s] = y(metrics_->x_S[s]).dot(mesh_->side_normal(s));
  }
  return f;
}

std::array<double, 3> barycentric(const Triangulation& mesh, const MeshMetrics& metrics, int t,
                                  const Vec2& x) {
  const auto& e = mesh.elements()[t];
  std::array<double, 3> l{};
  for (int i = 0; i < 3; ++i) {
    // lambda_i vanishes on the opposite side, which contains vertex i+1.
    l[i] = metrics.grad_lambda[t][i].dot(x - mesh.vertices()[e[(i + 1) % 3]]);
  }
  return l;
}

ElementVectors cr_gradient(const CRSpace& space, const CRField& u) {
  const auto& map = space.dof_map();
  ElementVectors g(map.num_elements());
  for (int t = 0; t < map.num_elements(); ++t) {
    Vec2 v = Vec2::Zero();
    for (int i = 0; i < 3; ++i) v += u.dofs[map.element_dofs[t][i]] * map.basis_gradients[t][i];
    g[t] = v;
  }
  return g;
}

ElementVectors p1_gradient(const P1Space& space, const P1Field& u) {
  const auto& map = space.dof_map();
  ElementVectors g(map.num_elements());
  for (int t = 0; t < map.num_elements(); ++t) {
    Vec2 v = Vec2::Zero();
    for (int i = 0; i < 3; ++i) v += u.dofs[map.element_dofs[t][i]] * map.basis_gradients[t][i];
    g[t] = v;
  }
  return g;
}

ElementScalars cr_element_mean(const Triangulation& mesh, const CRField& u) {
  ElementScalars m(mesh.num_elements());
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const auto& s = mesh.element_sides()[t];
    m[t] = (u.dofs[s[0]] + u.dofs[s[1]] + u.dofs[s[2]]) / 3.0;
  }
  return m;
}

ElementScalars l2_project_pc(const Triangulation& mesh, const MeshMetrics& metrics,
                             const std::function<double(const Vec2&)>& f,
                             const SimplexQuadrature& quad) {
  (void)metrics;
  ElementScalars out(mesh.num_elements());
  const auto& V = mesh.vertices();
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const auto& e = mesh.elements()[t];
    double sum = 0.0;
    for (int q = 0; q < quad.size(); ++q) sum += quad.weights[q] * f(quad.map(q, V[e[0]], V[e[1]], V[e[2]]));
    out[t] = sum;
  }
  return out;
}

ElementVectors l2_project_pc(const Triangulation& mesh, const MeshMetrics& metrics,
                             const std::function<Vec2(const Vec2&)>& f,
                             const SimplexQuadrature& quad) {
  (void)metrics;
  ElementVectors out(mesh.num_elements());
  const auto& V = mesh.vertices();
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const auto& e = mesh.elements()[t];
    Vec2 sum = Vec2::Zero();
    for (int q = 0; q < quad.size(); ++q) sum += quad.weights[q] * f(quad.map(q, V[e[0]], V[e[1]], V[e[2]]));
    out[t] = sum;
  }
  return out;
}

double jump(const CRSpace& space, const CRField& v, int s, const Vec2& x) {
  const auto& mesh = space.mesh();
  const Vec2& a = mesh.vertices()[mesh.sides()[s][0]];
  const Vec2& b = mesh.vertices()[mesh.sides()[s][1]];
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double along = (x - a).dot(ab) / len2;
  const double off = std::abs(ab.x() * (x - a).y() - ab.y() * (x - a).x()) / std::sqrt(len2);
  const double tol = 1e-12 * std::sqrt(len2);
  if (off > tol || along < -1e-12 || along > 1.0 + 1e-12) {
    throw std::domain_error("jump evaluation point does not lie on the side");
  }
  const auto& adj = mesh.side_elements()[s];
  const double plus = space.evaluate(v, adj[0], x);
  if (adj[1] < 0) return plus;
  return plus - space.evaluate(v, adj[1], x);
}

ElementwiseRT0 to_elementwise(const Triangulation& mesh, const MeshMetrics& metrics,
                              const RT0Field& y) {
  const int nt = mesh.num_elements();
  ElementwiseRT0 out{std::vector<Vec2>(nt), std::vector<double>(nt)};
  for (int t = 0; t < nt; ++t) {
    const auto& e = mesh.elements()[t];
    Vec2 a = Vec2::Zero();
    double b = 0.0;
    for (int i = 0; i < 3; ++i) {
      const int s = mesh.element_sides()[t][i];
      // Local basis |S|/(2|T|) (x - P_i) has unit outward normal component on S.
      const double c = mesh.element_side_signs()[t][i] * y.dofs[s] * metrics.h_S[s] /
                       (2.0 * metrics.area[t]);
      a += c * (metrics.x_T[t] - mesh.vertices()[e[i]]);
      b += c;
    }
    out.a[t] = a;
    out.b[t] = b;
  }
  return out;
}

double outward_normal_component(const Triangulation& mesh, const MeshMetrics& metrics,
                                const ElementwiseRT0& y, int t, int i) {
  const int s = mesh.element_sides()[t][i];
  const Vec2 n = mesh.element_side_signs()[t][i] * mesh.side_normal(s);
  return n.dot(y.a[t] + y.b[t] * (metrics.x_S[s] - metrics.x_T[t]));
}

RT0Field average_traces(const Triangulation& mesh, const MeshMetrics& metrics,
                        const ElementwiseRT0& y) {
  RT0Field out{std::vector<double>(mesh.num_sides(), 0.0)};
  std::vector<int> count(mesh.num_sides(), 0);
  for (int t = 0; t < mesh.num_elements(); ++t) {
    for (int i = 0; i < 3; ++i) {
      const int s = mesh.element_sides()[t][i];
      out.dofs[s] += mesh.element_side_signs()[t][i] * outward_normal_component(mesh, metrics, y, t, i);
      ++count[s];
    }
  }
  for (int s = 0; s < mesh.num_sides(); ++s) out.dofs[s] /= count[s];
  return out;
}

double normal_jump(const Triangulation& mesh, const MeshMetrics& metrics, const ElementwiseRT0& y,
                   int s) {
  double sum = 0.0;
  for (int t : mesh.side_elements()[s]) {
    if (t < 0) continue;
    int i = 0;
    while (mesh.element_sides()[t][i] != s) ++i;
    sum += outward_normal_component(mesh, metrics, y, t, i);
  }
  return sum;
}

double normal_jump(const Triangulation& mesh, const MeshMetrics& metrics, const RT0Field& y,
                   int s) {
  (void)metrics;
  // A single normal DOF per side leaves nothing to jump on interior sides.
  return mesh.is_boundary_side(s) ? y.dofs[s] : 0.0;
}

Vec2 rt0_evaluate(const MeshMetrics& metrics, const ElementwiseRT0& y, int t, const Vec2& x) {
  return y.a[t] + y.b[t] * (x - metrics.x_T[t]);
}

Vec2 rt0_evaluate(const Triangulation& mesh, const MeshMetrics& metrics, const RT0Field& y,
                  int t, const Vec2& x) {
  const auto& e = mesh.elements()[t];
  Vec2 v = Vec2::Zero();
  for (int i = 0; i < 3; ++i) {
    const int s = mesh.element_sides()[t][i];
    const double c = mesh.element_side_signs()[t][i] * y.dofs[s] * metrics.h_S[s] /
                     (2.0 * metrics.area[t]);
    v += c * (x - mesh.vertices()[e[i]]);
  }
  return v;
}

ElementScalars rt0_divergence(const ElementwiseRT0& y) {
  ElementScalars d(y.b.size());
  for (std::size_t t = 0; t < y.b.size(); ++t) d[t] = 2.0 * y.b[t];
  return d;
}

ElementScalars rt0_divergence(const Triangulation& mesh, const MeshMetrics& metrics,
                              const RT0Field& y) {
  ElementScalars d(mesh.num_elements());
  for (int t = 0; t < mesh.num_elements(); ++t) {
    double flux = 0.0;
    for (int i = 0; i < 3; ++i) {
      const int s = mesh.element_sides()[t][i];
      flux += mesh.element_side_signs()[t][i] * y.dofs[s] * metrics.h_S[s];
    }
    d[t] = flux / metrics.area[t];
  }
  return d;
}

ElementVectors rt0_element_mean(const ElementwiseRT0& y) { return y.a; }

P1Field node_average(const CRSpace& cr, const P1Space& p1, const CRField& v) {
  const auto& mesh = cr.mesh();
  const auto& metrics = cr.metrics();
  P1Field out{std::vector<double>(mesh.num_vertices(), 0.0)};
  for (int nu = 0; nu < mesh.num_vertices(); ++nu) {
    if (p1.dirichlet_mask()[nu]) continue;
    const auto elems = metrics.vertex_elements[nu];
    double sum = 0.0;
    for (int t : elems) {
      const auto& e = mesh.elements()[t];
      const auto& s = mesh.element_sides()[t];
      int i = 0;
      while (e[i] != nu) ++i;
      // 1 - 2 lambda_j at vertex i is -1 for j = i and +1 otherwise.
      sum += v.dofs[s[(i + 1) % 3]] + v.dofs[s[(i + 2) % 3]] - v.dofs[s[i]];
    }
    out.dofs[nu] = sum / static_cast<double>(elems.size());
  }
  return out;
}

CRField p1_to_cr(const Triangulation& mesh, const P1Field& v) {
  CRField u{std::vector<double>(mesh.num_sides())};
  for (int s = 0; s < mesh.num_sides(); ++s) {
    u.dofs[s] = 0.5 * (v.dofs[mesh.sides()[s][0]] + v.dofs[mesh.sides()[s][1]]);
  }
  return u;
}

RT0Field discrete_curl(const Triangulation& mesh, const MeshMetrics& metrics,
                       const P1Field& psi) {
  RT0Field y{std::vector<double>(mesh.num_sides())};
  for (int s = 0; s < mesh.num_sides(); ++s) {
    const int t = mesh.side_elements()[s][0];
    const auto& e = mesh.elements()[t];
    Vec2 g = Vec2::Zero();
    for (int i = 0; i < 3; ++i) g += psi.dofs[e[i]] * metrics.grad_lambda[t][i];
    const Vec2 curl(g.y(), -g.x());
    y.dofs[s] = curl.dot(mesh.side_normal(s));
  }
  return y;
}

IbpResidual check_discrete_ibp(const CRSpace& space, const CRField& v, const RT0Field& y) {
  const auto& mesh = space.mesh();
  const auto& metrics = space.metrics();
  const ElementVectors grad = cr_gradient(space, v);
  const ElementScalars mean_v = cr_element_mean(mesh, v);
  const ElementwiseRT0 yl = to_elementwise(mesh, metrics, y);
  const ElementScalars div = rt0_divergence(mesh, metrics, y);
  double first = 0.0, second = 0.0;
  for (int t = 0; t < mesh.num_elements(); ++t) {
    first += metrics.area[t] * grad[t].dot(yl.a[t]);
    second += metrics.area[t] * mean_v[t] * div[t];
  }
  return {std::abs(first + second), std::abs(first) + std::abs(second)};
}

}  // namespace crvex
