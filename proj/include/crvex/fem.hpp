#pragma once

#include "crvex/mesh.hpp"
#include "crvex/quadrature.hpp"
#include "crvex/types.hpp"

#include <array>
#include <functional>
#include <vector>

namespace crvex {

/// Piecewise constant scalar / vector fields, one value per element.
using ElementScalars = std::vector<double>;
using ElementVectors = std::vector<Vec2>;

/// Crouzeix-Raviart function: values at side barycenters.
struct CRField {
  std::vector<double> dofs;
};

/// Conforming piecewise affine function: values at vertices.
struct P1Field {
  std::vector<double> dofs;
};

/// Lowest-order Raviart-Thomas field: normal component on each side with
/// respect to Triangulation::side_normal.
struct RT0Field {
  std::vector<double> dofs;
};

/// Element-wise Raviart-Thomas form y|_T(x) = a_T + b_T (x - x_T) without any
/// continuity requirement across sides. Every RT0Field has this form; the
/// converse holds when all normal jumps vanish.
struct ElementwiseRT0 {
  std::vector<Vec2> a;
  std::vector<double> b;
};

/// Element -> three local DOFs with constant basis gradients. Serves both the
/// CR space (DOF = side) and the conforming P1 space (DOF = vertex).
struct DofMap {
  int num_dofs = 0;
  std::vector<std::array<int, 3>> element_dofs;
  std::vector<std::array<Vec2, 3>> basis_gradients;
  std::vector<double> area;
  std::vector<char> constrained;  ///< homogeneous Dirichlet DOFs
  std::vector<int> free_dofs;     ///< free index -> DOF
  std::vector<int> free_index;    ///< DOF -> free index, -1 if constrained

  int num_free() const { return static_cast<int>(free_dofs.size()); }
  int num_elements() const { return static_cast<int>(element_dofs.size()); }
};

/// CR space on a mesh; the local basis function of side i is 1 - 2 lambda_i.
class CRSpace {
 public:
  CRSpace(const Triangulation& mesh, const MeshMetrics& metrics);

  const Triangulation& mesh() const { return *mesh_; }
  const MeshMetrics& metrics() const { return *metrics_; }
  const DofMap& dof_map() const { return map_; }
  const std::vector<char>& dirichlet_mask() const { return map_.constrained; }
  int num_dofs() const { return map_.num_dofs; }

  CRField zero() const { return CRField{std::vector<double>(map_.num_dofs, 0.0)}; }
  /// Interpolation at side barycenters; Dirichlet DOFs are zeroed if `clamp`.
  CRField interpolate(const std::function<double(const Vec2&)>& v, bool clamp = false) const;
  /// Value of the field restricted to element t at point x.
  double evaluate(const CRField& u, int t, const Vec2& x) const;

 private:
  const Triangulation* mesh_;
  const MeshMetrics* metrics_;
  DofMap map_;
};

class P1Space {
 public:
  P1Space(const Triangulation& mesh, const MeshMetrics& metrics);

  const Triangulation& mesh() const { return *mesh_; }
  const MeshMetrics& metrics() const { return *metrics_; }
  const DofMap& dof_map() const { return map_; }
  const std::vector<char>& dirichlet_mask() const { return map_.constrained; }
  int num_dofs() const { return map_.num_dofs; }

  P1Field interpolate(const std::function<double(const Vec2&)>& v, bool clamp = false) const;
  double evaluate(const P1Field& u, int t, const Vec2& x) const;

 private:
  const Triangulation* mesh_;
  const MeshMetrics* metrics_;
  DofMap map_;
};

/// RT0 space; Neumann sides carry zero normal flux in RT0_N.
class RT0Space {
 public:
  RT0Space(const Triangulation& mesh, const MeshMetrics& metrics);

  const Triangulation& mesh() const { return *mesh_; }
  const std::vector<char>& neumann_mask() const { return neumann_; }
  int num_dofs() const { return mesh_->num_sides(); }

  /// DOFs of a smooth vector field: normal component at side midpoints
  /// (exact for fields in RT0).
  RT0Field interpolate(const std::function<Vec2(const Vec2&)>& y) const;

 private:
  const Triangulation* mesh_;
  const MeshMetrics* metrics_;
  std::vector<char> neumann_;
};

std::array<double, 3> barycentric(const Triangulation& mesh, const MeshMetrics& metrics, int t,
                                  const Vec2& x);

/// Element-wise gradient of a CR field.
ElementVectors cr_gradient(const CRSpace& space, const CRField& u);
ElementVectors p1_gradient(const P1Space& space, const P1Field& u);

/// Element means of a CR field (the value at x_T).
ElementScalars cr_element_mean(const Triangulation& mesh, const CRField& u);

/// Element means by quadrature.
ElementScalars l2_project_pc(const Triangulation& mesh, const MeshMetrics& metrics,
                             const std::function<double(const Vec2&)>& f,
                             const SimplexQuadrature& quad = SimplexQuadrature::high_order());
ElementVectors l2_project_pc(const Triangulation& mesh, const MeshMetrics& metrics,
                             const std::function<Vec2(const Vec2&)>& f,
                             const SimplexQuadrature& quad = SimplexQuadrature::high_order());

/// Jump of a CR field across side s at x (T+ trace minus T- trace; the single
/// trace on boundary sides). Throws std::domain_error if x is not on s.
double jump(const CRSpace& space, const CRField& v, int s, const Vec2& x);

ElementwiseRT0 to_elementwise(const Triangulation& mesh, const MeshMetrics& metrics,
                              const RT0Field& y);
/// Conforming RT0 DOFs from an element-wise field by averaging the two traces.
RT0Field average_traces(const Triangulation& mesh, const MeshMetrics& metrics,
                        const ElementwiseRT0& y);

/// Normal component of y|_T on its local side i, taken along the outward normal of T.
double outward_normal_component(const Triangulation& mesh, const MeshMetrics& metrics,
                                const ElementwiseRT0& y, int t, int i);

/// y|T+ . n_T+ + y|T- . n_T- on interior sides, y . n on boundary sides.
double normal_jump(const Triangulation& mesh, const MeshMetrics& metrics,
                   const ElementwiseRT0& y, int s);
double normal_jump(const Triangulation& mesh, const MeshMetrics& metrics, const RT0Field& y,
                   int s);

Vec2 rt0_evaluate(const MeshMetrics& metrics, const ElementwiseRT0& y, int t, const Vec2& x);
Vec2 rt0_evaluate(const Triangulation& mesh, const MeshMetrics& metrics, const RT0Field& y,
                  int t, const Vec2& x);
ElementScalars rt0_divergence(const ElementwiseRT0& y);
ElementScalars rt0_divergence(const Triangulation& mesh, const MeshMetrics& metrics,
                              const RT0Field& y);
/// Element means (the L2 projection onto piecewise constants).
ElementVectors rt0_element_mean(const ElementwiseRT0& y);

/// Node averaging onto conforming P1 with zero values at Dirichlet vertices.
P1Field node_average(const CRSpace& cr, const P1Space& p1, const CRField& v);

/// CR embedding of a conforming P1 function.
CRField p1_to_cr(const Triangulation& mesh, const P1Field& v);

/// Discrete curl (d2 psi, -d1 psi) of a P1 potential, as RT0 DOFs. Divergence
/// free; tangential to the boundary wherever psi vanishes there.
RT0Field discrete_curl(const Triangulation& mesh, const MeshMetrics& metrics,
                       const P1Field& psi);

struct IbpResidual {
  double residual;  ///< |(grad_h v, Pi_h y) + (Pi_h v, div y)|
  double scale;     ///< |(grad_h v, Pi_h y)| + |(Pi_h v, div y)|
};

/// Discrete integration by parts for v in CR_D and y in RT0_N.
IbpResidual check_discrete_ibp(const CRSpace& space, const CRField& v, const RT0Field& y);

}  // namespace crvex
