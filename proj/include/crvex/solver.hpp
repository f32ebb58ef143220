#pragma once

#include "crvex/fem.hpp"
#include "crvex/nfunction.hpp"
#include "crvex/types.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crvex {

struct SolverConfig {
  double abs_tol = 1e-8;
  double rel_tol = 1e-10;
  int max_newton_iters = 50;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_halvings = 30;
  /// Required accuracy of each linear solve relative to the current nonlinear
  /// residual. The direct factorization normally meets it to round-off.
  double linear_tol = 1e-2;

  /// Throws std::invalid_argument on non-positive tolerances or ratios outside (0,1).
  void validate() const;
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  double initial_residual = 0.0;
  double residual = 0.0;           ///< final ||R||_2 over free DOFs
  double relative_residual = 0.0;  ///< residual / initial_residual (0 if initial is 0)
  std::vector<double> residual_history;
  std::vector<double> step_lengths;
  std::vector<double> energy_history;  ///< discrete energy at each accepted iterate
  int linear_solves = 0;
  double max_linear_relative_residual = 0.0;
  std::string failure;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, SolveReport report, std::vector<double> last)
      : NumericalError(what), report_(std::move(report)), last_(std::move(last)) {}
  const SolveReport& report() const { return report_; }
  const std::vector<double>& last_iterate() const { return last_; }

 private:
  SolveReport report_;
  std::vector<double> last_;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Discrete Euler-Lagrange system sum_T |T| A_h(grad u) . grad v - load(v) = 0
/// over a space with three DOFs per element and constant basis gradients.
class NonlinearSystem {
 public:
  /// CR system with load (f_h, Pi_h v): each side of T receives |T| f_h|_T / 3.
  static NonlinearSystem crouzeix_raviart(const CRSpace& space, ElementExponents exponents,
                                          double delta, const ElementScalars& f_h,
                                          ExecPolicy policy = ExecPolicy::Serial);

  /// Conforming P1 system with load (f, v) by quadrature of f against the basis.
  static NonlinearSystem conforming_p1(
      const P1Space& space, ElementExponents exponents, double delta,
      const std::function<double(const Vec2&)>& f,
      const SimplexQuadrature& quad = SimplexQuadrature::high_order(),
      ExecPolicy policy = ExecPolicy::Serial);

  const DofMap& dof_map() const { return *map_; }
  const ElementExponents& exponents() const { return exponents_; }
  double delta() const { return delta_; }
  const std::vector<double>& load() const { return load_; }
  ExecPolicy policy() const { return policy_; }
  void set_policy(ExecPolicy policy) { policy_ = policy; }

  /// Residual restricted to the free DOFs.
  Eigen::VectorXd residual(const std::vector<double>& u) const;
  /// Jacobian on free DOFs; symmetric by construction. Throws NumericalError
  /// where the linearization is singular (delta = 0, q < 2, zero gradient).
  SparseMatrix jacobian(const std::vector<double>& u) const;
  /// sum_T |T| phi(p_T, delta, |grad u|) - load . u
  double energy(const std::vector<double>& u) const;

  std::vector<double> expand(const Eigen::VectorXd& free) const;
  Eigen::VectorXd restrict_to_free(const std::vector<double>& u) const;

 private:
  NonlinearSystem(const DofMap& map, ElementExponents exponents, double delta,
                  std::vector<double> load, ExecPolicy policy);

  const DofMap* map_;
  ElementExponents exponents_;
  double delta_;
  std::vector<double> load_;
  ExecPolicy policy_;
};

struct SolveResult {
  std::vector<double> u;
  SolveReport report;
};

/// Damped Newton with Armijo backtracking on 1/2 ||R||^2. Stops once
/// ||R|| <= abs_tol or ||R|| <= rel_tol ||R(u0)||. Throws ConvergenceError
/// when the iteration limit or the backtracking limit is hit.
SolveResult newton_solve(const NonlinearSystem& sys, const SolverConfig& config,
                         std::vector<double> u0);
SolveResult newton_solve(const NonlinearSystem& sys, const SolverConfig& config);

struct P1SolveResult {
  P1Field u;
  SolveReport report;
};

P1SolveResult solve_conforming_p1(const NonlinearSystem& sys, const SolverConfig& config);

/// CR field on the red-refined mesh from one on its parent: the parent field
/// is evaluated at each fine side midpoint and averaged over the adjacent
/// children's parents. Dirichlet DOFs are set to zero.
CRField prolongate(const CRSpace& coarse, const CRSpace& fine, const CRField& u);

}  // namespace crvex
