#pragma once

#include "crvex/types.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace crvex {

enum class BoundaryLabel : std::uint8_t { Interior = 0, Dirichlet = 1, Neumann = 2 };

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rectangle {
  double x0 = -1.0;
  double x1 = 1.0;
  double y0 = -1.0;
  double y1 = 1.0;

  double area() const { return (x1 - x0) * (y1 - y0); }
};

/// Chooses the label of a boundary side from its midpoint.
using BoundarySelector = std::function<BoundaryLabel(const Vec2& midpoint)>;

BoundarySelector all_dirichlet();

/// Dirichlet on sides whose midpoint satisfies `is_dirichlet`, Neumann elsewhere.
BoundarySelector dirichlet_where(std::function<bool(const Vec2&)> is_dirichlet);

/// Conforming triangulation of a 2D polygon with side/element topology.
///
/// Elements are counter-clockwise. Local side i of an element is the side
/// opposite its local vertex i. Sides are enumerated lexicographically in
/// (min vertex, max vertex). For an interior side, `side_elements[s][0]` is the
/// element with the smaller index (T+); the global side normal points out of T+.
/// Boundary sides have `side_elements[s][1] == -1` and an outward normal.
class Triangulation {
 public:
  /// Builds the topology from vertices and element triples. Boundary sides
  /// receive the label chosen by `select` (called with the side midpoint).
  static Triangulation from_elements(std::vector<Vec2> vertices,
                                     std::vector<std::array<int, 3>> elements,
                                     const BoundarySelector& select, int level = 0);

  /// As above, with an explicit label per boundary side keyed by its vertex pair.
  static Triangulation from_elements(
      std::vector<Vec2> vertices, std::vector<std::array<int, 3>> elements,
      const std::function<BoundaryLabel(int v0, int v1)>& boundary_label, int level);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  int num_sides() const { return static_cast<int>(sides_.size()); }
  int level() const { return level_; }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& elements() const { return elements_; }
  const std::vector<std::array<int, 2>>& sides() const { return sides_; }
  const std::vector<std::array<int, 3>>& element_sides() const { return element_sides_; }
  /// +1 if the element is T+ of that side (or the side is on the boundary), -1 otherwise.
  const std::vector<std::array<int, 3>>& element_side_signs() const { return element_side_signs_; }
  const std::vector<std::array<int, 2>>& side_elements() const { return side_elements_; }
  const std::vector<BoundaryLabel>& boundary_labels() const { return labels_; }

  bool is_boundary_side(int s) const { return side_elements_[s][1] < 0; }
  Vec2 side_midpoint(int s) const;
  double side_length(int s) const;
  /// Unit normal of side s: out of T+ for interior sides, outward on the boundary.
  Vec2 side_normal(int s) const { return normals_[s]; }
  double element_area(int t) const;
  int num_interior_sides() const;

  /// Checks the structural invariants; throws std::logic_error on violation.
  void validate() const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> elements_;
  std::vector<std::array<int, 2>> sides_;
  std::vector<std::array<int, 3>> element_sides_;
  std::vector<std::array<int, 3>> element_side_signs_;
  std::vector<std::array<int, 2>> side_elements_;
  std::vector<BoundaryLabel> labels_;
  std::vector<Vec2> normals_;
  int level_ = 0;
};

/// n x n Cartesian cells, each split along alternating diagonals
/// (checkerboard). For even n on a square centred at the origin every
/// diagonal through the centre meets it, so the mesh is point-symmetric.
Triangulation build_criss_cross(int n, const Rectangle& domain,
                                const BoundarySelector& select = all_dirichlet());

/// Red refinement: each triangle is split into four congruent children through
/// its edge midpoints. The midpoint of parent side s becomes vertex V + s, and
/// the children of parent element t are 4t .. 4t+3 (corner children first, the
/// middle child last).
Triangulation red_refine(const Triangulation& mesh);

/// Compressed row storage of an index relation.
struct IndexSets {
  std::vector<int> offsets{0};
  std::vector<int> indices;

  int size() const { return static_cast<int>(offsets.size()) - 1; }
  std::span<const int> operator[](int i) const {
    return {indices.data() + offsets[i], indices.data() + offsets[i + 1]};
  }
};

struct MeshMetrics {
  double h_avg = 0.0;                   ///< (|Omega| / card(vertices))^(1/2)
  double h_max = 0.0;                   ///< max element diameter
  std::vector<double> h_T;              ///< element diameters
  std::vector<double> h_S;              ///< side lengths
  std::vector<Vec2> x_T;                ///< element barycenters
  std::vector<Vec2> x_S;                ///< side barycenters
  std::vector<double> area;             ///< element areas
  std::vector<std::array<Vec2, 3>> grad_lambda;  ///< barycentric coordinate gradients
  IndexSets omega_T;                    ///< elements sharing a vertex with T (incl. T)
  IndexSets omega_S;                    ///< elements adjacent to S
  IndexSets vertex_elements;            ///< elements containing each vertex
  double chunkiness = 0.0;              ///< max h_T / rho_T
};

MeshMetrics compute_metrics(const Triangulation& mesh);

}  // namespace crvex
