#include "crvex/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace crvex {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

IndexSets invert(int num_rows, const std::vector<std::vector<int>>& rows) {
  IndexSets sets;
  sets.offsets.assign(1, 0);
  sets.offsets.reserve(num_rows + 1);
  for (const auto& r : rows) {
    sets.indices.insert(sets.indices.end(), r.begin(), r.end());
    sets.offsets.push_back(static_cast<int>(sets.indices.size()));
  }
  return sets;
}

}  // namespace

BoundarySelector all_dirichlet() {
  return [](const Vec2&) { return BoundaryLabel::Dirichlet; };
}

BoundarySelector dirichlet_where(std::function<bool(const Vec2&)> is_dirichlet) {
  return [pred = std::move(is_dirichlet)](const Vec2& m) {
    return pred(m) ? BoundaryLabel::Dirichlet : BoundaryLabel::Neumann;
  };
}

Triangulation Triangulation::from_elements(std::vector<Vec2> vertices,
                                           std::vector<std::array<int, 3>> elements,
                                           const BoundarySelector& select, int level) {
  Triangulation m = from_elements(std::move(vertices), std::move(elements),
                                  [](int, int) { return BoundaryLabel::Dirichlet; }, level);
  for (int s = 0; s < m.num_sides(); ++s) {
    if (!m.is_boundary_side(s)) continue;
    BoundaryLabel l = select(m.side_midpoint(s));
    m.labels_[s] = (l == BoundaryLabel::Interior) ? BoundaryLabel::Dirichlet : l;
  }
  return m;
}

Triangulation Triangulation::from_elements(
    std::vector<Vec2> vertices, std::vector<std::array<int, 3>> elements,
    const std::function<BoundaryLabel(int, int)>& boundary_label, int level) {
  Triangulation m;
  m.level_ = level;
  m.vertices_ = std::move(vertices);
  m.elements_ = std::move(elements);

  const int nv = m.num_vertices();
  for (auto& e : m.elements_) {
    for (int v : e) {
      if (v < 0 || v >= nv) throw std::invalid_argument("element references unknown vertex");
    }
    if (signed_area(m.vertices_[e[0]], m.vertices_[e[1]], m.vertices_[e[2]]) < 0.0) {
      std::swap(e[1], e[2]);
    }
  }

  // Lexicographic side enumeration.
  std::vector<std::array<int, 2>> pairs;
  pairs.reserve(3 * m.elements_.size());
  for (const auto& e : m.elements_) {
    for (int i = 0; i < 3; ++i) {
      int a = e[(i + 1) % 3];
      int b = e[(i + 2) % 3];
      pairs.push_back({std::min(a, b), std::max(a, b)});
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  m.sides_ = std::move(pairs);

  auto find_side = [&m](int a, int b) {
    std::array<int, 2> key{std::min(a, b), std::max(a, b)};
    auto it = std::lower_bound(m.sides_.begin(), m.sides_.end(), key);
    return static_cast<int>(it - m.sides_.begin());
  };

  const int ns = m.num_sides();
  m.side_elements_.assign(ns, {-1, -1});
  m.element_sides_.resize(m.elements_.size());
  m.element_side_signs_.resize(m.elements_.size());
  for (int t = 0; t < m.num_elements(); ++t) {
    const auto& e = m.elements_[t];
    for (int i = 0; i < 3; ++i) {
      int s = find_side(e[(i + 1) % 3], e[(i + 2) % 3]);
      m.element_sides_[t][i] = s;
      auto& adj = m.side_elements_[s];
      if (adj[0] < 0) {
        adj[0] = t;
      } else if (adj[1] < 0) {
        adj[1] = t;
      } else {
        throw std::invalid_argument("side shared by more than two elements");
      }
    }
  }
  // Elements are visited in increasing order, so adj[0] < adj[1] already.
  for (int t = 0; t < m.num_elements(); ++t) {
    for (int i = 0; i < 3; ++i) {
      int s = m.element_sides_[t][i];
      m.element_side_signs_[t][i] = (m.side_elements_[s][0] == t) ? 1 : -1;
    }
  }

  m.normals_.resize(ns);
  for (int s = 0; s < ns; ++s) {
    const int t = m.side_elements_[s][0];
    const auto& e = m.elements_[t];
    int local = 0;
    while (m.element_sides_[t][local] != s) ++local;
    // Counter-clockwise element: the outward normal of edge (p, q) is the
    // tangent q - p rotated clockwise.
    const Vec2 tangent = m.vertices_[e[(local + 2) % 3]] - m.vertices_[e[(local + 1) % 3]];
    m.normals_[s] = Vec2(tangent.y(), -tangent.x()).normalized();
  }

  m.labels_.assign(ns, BoundaryLabel::Interior);
  for (int s = 0; s < ns; ++s) {
    if (m.side_elements_[s][1] < 0) {
      BoundaryLabel l = boundary_label(m.sides_[s][0], m.sides_[s][1]);
      m.labels_[s] = (l == BoundaryLabel::Interior) ? BoundaryLabel::Dirichlet : l;
    }
  }
  m.validate();
  return m;
}

Vec2 Triangulation::side_midpoint(int s) const {
  return 0.5 * (vertices_[sides_[s][0]] + vertices_[sides_[s][1]]);
}

double Triangulation::side_length(int s) const {
  return (vertices_[sides_[s][1]] - vertices_[sides_[s][0]]).norm();
}

double Triangulation::element_area(int t) const {
  const auto& e = elements_[t];
  return signed_area(vertices_[e[0]], vertices_[e[1]], vertices_[e[2]]);
}

int Triangulation::num_interior_sides() const {
  return static_cast<int>(std::count_if(side_elements_.begin(), side_elements_.end(),
                                        [](const auto& a) { return a[1] >= 0; }));
}

void Triangulation::validate() const {
  for (int t = 0; t < num_elements(); ++t) {
    if (!(element_area(t) > 0.0)) {
      throw std::logic_error("element " + std::to_string(t) + " has non-positive area");
    }
  }
  for (int s = 0; s < num_sides(); ++s) {
    const auto& adj = side_elements_[s];
    if (adj[0] < 0) throw std::logic_error("side without element");
    if ((adj[1] < 0) != (labels_[s] != BoundaryLabel::Interior)) {
      throw std::logic_error("side label inconsistent with adjacency");
    }
    for (int t : adj) {
      if (t < 0) continue;
      const auto& e = elements_[t];
      int hits = 0;
      for (int v : e) hits += (v == sides_[s][0] || v == sides_[s][1]);
      if (hits != 2) throw std::logic_error("adjacent element does not contain side");
    }
  }
}

Triangulation build_criss_cross(int n, const Rectangle& domain, const BoundarySelector& select) {
  if (n < 1) throw std::invalid_argument("criss-cross mesh needs n >= 1");
  if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0)) {
    throw std::invalid_argument("degenerate rectangle");
  }
  std::vector<Vec2> vertices;
  vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      vertices.emplace_back(domain.x0 + (domain.x1 - domain.x0) * i / n,
                            domain.y0 + (domain.y1 - domain.y0) * j / n);
    }
  }
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 3>> elements;
  elements.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      if ((i + j) % 2 == 0) {
        elements.push_back({v00, v10, v11});
        elements.push_back({v00, v11, v01});
      } else {
        elements.push_back({v00, v10, v01});
        elements.push_back({v10, v11, v01});
      }
    }
  }
  return Triangulation::from_elements(std::move(vertices), std::move(elements), select, 0);
}

Triangulation red_refine(const Triangulation& mesh) {
  const int nv = mesh.num_vertices();
  std::vector<Vec2> vertices = mesh.vertices();
  vertices.reserve(nv + mesh.num_sides());
  for (int s = 0; s < mesh.num_sides(); ++s) vertices.push_back(mesh.side_midpoint(s));

  std::vector<std::array<int, 3>> elements;
  elements.reserve(4 * mesh.num_elements());
  for (int t = 0; t < mesh.num_elements(); ++t) {
    const auto& e = mesh.elements()[t];
    const auto& es = mesh.element_sides()[t];
    // Local side i is opposite vertex i: midpoint of (e1,e2) is es[0], etc.
    int m12 = nv + es[0], m20 = nv + es[1], m01 = nv + es[2];
    elements.push_back({e[0], m01, m20});
    elements.push_back({m01, e[1], m12});
    elements.push_back({m20, m12, e[2]});
    elements.push_back({m12, m20, m01});
  }

  const auto& parent_sides = mesh.sides();
  const auto& parent_labels = mesh.boundary_labels();
  auto label = [&](int a, int b) {
    // A boundary child side joins an old vertex and the midpoint of the parent side.
    int mid = std::max(a, b);
    if (mid < nv) throw std::logic_error("boundary child side without midpoint");
    int s = mid - nv;
    int other = std::min(a, b);
    if (parent_sides[s][0] != other && parent_sides[s][1] != other) {
      throw std::logic_error("boundary child side not on a parent side");
    }
    return parent_labels[s];
  };
  return Triangulation::from_elements(std::move(vertices), std::move(elements), label,
                                      mesh.level() + 1);
}

MeshMetrics compute_metrics(const Triangulation& mesh) {
  MeshMetrics m;
  const int nt = mesh.num_elements();
  const int ns = mesh.num_sides();
  const int nv = mesh.num_vertices();
  const auto& V = mesh.vertices();

  m.h_T.resize(nt);
  m.x_T.resize(nt);
  m.area.resize(nt);
  m.grad_lambda.resize(nt);
  double total_area = 0.0;
  for (int t = 0; t < nt; ++t) {
    const auto& e = mesh.elements()[t];
    const Vec2& a = V[e[0]];
    const Vec2& b = V[e[1]];
    const Vec2& c = V[e[2]];
    double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
    double area = mesh.element_area(t);
    m.area[t] = area;
    total_area += area;
    m.h_T[t] = std::max({la, lb, lc});
    m.x_T[t] = (a + b + c) / 3.0;
    double inradius = 2.0 * area / (la + lb + lc);
    m.chunkiness = std::max(m.chunkiness, m.h_T[t] / inradius);
    for (int i = 0; i < 3; ++i) {
      const Vec2& p = V[e[(i + 1) % 3]];
      const Vec2& q = V[e[(i + 2) % 3]];
      m.grad_lambda[t][i] = Vec2(p.y() - q.y(), q.x() - p.x()) / (2.0 * area);
    }
  }
  m.h_max = nt > 0 ? *std::max_element(m.h_T.begin(), m.h_T.end()) : 0.0;
  m.h_avg = std::sqrt(total_area / nv);

  m.h_S.resize(ns);
  m.x_S.resize(ns);
  std::vector<std::vector<int>> side_patch(ns);
  for (int s = 0; s < ns; ++s) {
    m.h_S[s] = mesh.side_length(s);
    m.x_S[s] = mesh.side_midpoint(s);
    for (int t : mesh.side_elements()[s]) {
      if (t >= 0) side_patch[s].push_back(t);
    }
  }
  m.omega_S = invert(ns, side_patch);

  std::vector<std::vector<int>> vert_elems(nv);
  for (int t = 0; t < nt; ++t) {
    for (int v : mesh.elements()[t]) vert_elems[v].push_back(t);
  }
  m.vertex_elements = invert(nv, vert_elems);

  std::vector<std::vector<int>> patch(nt);
  for (int t = 0; t < nt; ++t) {
    auto& p = patch[t];
    for (int v : mesh.elements()[t]) p.insert(p.end(), vert_elems[v].begin(), vert_elems[v].end());
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }
  m.omega_T = invert(nt, patch);
  return m;
}

}  // namespace crvex
