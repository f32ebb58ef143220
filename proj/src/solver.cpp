#include "crvex/solver.hpp"

#include "crvex/kernels.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <sstream>

namespace crvex {

void SolverConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(linear_tol > 0.0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (!(armijo > 0.0 && armijo < 1.0) || !(backtrack > 0.0 && backtrack < 1.0)) {
    throw std::invalid_argument("line-search ratios must lie in (0,1)");
  }
  if (max_newton_iters < 1 || max_halvings < 0) {
    throw std::invalid_argument("iteration limits must be positive");
  }
}

NonlinearSystem::NonlinearSystem(const DofMap& map, ElementExponents exponents, double delta,
                                 std::vector<double> load, ExecPolicy policy)
    : map_(&map),
      exponents_(std::move(exponents)),
      delta_(delta),
      load_(std::move(load)),
      policy_(policy) {
  if (static_cast<int>(exponents_.p_h.size()) != map.num_elements()) {
    throw std::invalid_argument("exponent count does not match element count");
  }
}

NonlinearSystem NonlinearSystem::crouzeix_raviart(const CRSpace& space,
                                                  ElementExponents exponents, double delta,
                                                  const ElementScalars& f_h, ExecPolicy policy) {
  const DofMap& map = space.dof_map();
  if (static_cast<int>(f_h.size()) != map.num_elements()) {
    throw std::invalid_argument("load has wrong length");
  }
  std::vector<double> load(map.num_dofs, 0.0);
  for (int t = 0; t < map.num_elements(); ++t) {
    const double share = map.area[t] * f_h[t] / 3.0;
    for (int i = 0; i < 3; ++i) load[map.element_dofs[t][i]] += share;
  }
  return NonlinearSystem(map, std::move(exponents), delta, std::move(load), policy);
}

NonlinearSystem NonlinearSystem::conforming_p1(const P1Space& space, ElementExponents exponents,
                                               double delta,
                                               const std::function<double(const Vec2&)>& f,
                                               const SimplexQuadrature& quad,
                                               ExecPolicy policy) {
  const DofMap& map = space.dof_map();
  const auto& mesh = space.mesh();
  const int nt = map.num_elements();
  std::vector<std::array<double, 3>> local(nt);
  kernels::for_each_index(nt, policy, [&](int t) {
    const auto& e = mesh.elements()[t];
    const Vec2& a = mesh.vertices()[e[0]];
    const Vec2& b = mesh.vertices()[e[1]];
    const Vec2& c = mesh.vertices()[e[2]];
    std::array<double, 3> r{};
    for (int q = 0; q < quad.size(); ++q) {
      const double fq = f(quad.map(q, a, b, c)) * quad.weights[q];
      for (int i = 0; i < 3; ++i) r[i] += fq * quad.points[q][i];
    }
    for (double& v : r) v *= map.area[t];
    local[t] = r;
  });
  std::vector<double> load(map.num_dofs, 0.0);
  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < 3; ++i) load[map.element_dofs[t][i]] += local[t][i];
  }
  return NonlinearSystem(map, std::move(exponents), delta, std::move(load), policy);
}

Eigen::VectorXd NonlinearSystem::residual(const std::vector<double>& u) const {
  const auto full = kernels::residual(*map_, exponents_.p_h, delta_, u, load_, policy_);
  return restrict_to_free(full);
}

SparseMatrix NonlinearSystem::jacobian(const std::vector<double>& u) const {
  std::vector<std::array<double, 9>> local;
  try {
    local = kernels::element_jacobians(*map_, exponents_.p_h, delta_, u, policy_);
  } catch (const std::domain_error& err) {
    throw NumericalError(std::string("singular linearization: ") + err.what());
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(9 * local.size());
  for (int t = 0; t < map_->num_elements(); ++t) {
    const auto& dofs = map_->element_dofs[t];
    for (int i = 0; i < 3; ++i) {
      const int fi = map_->free_index[dofs[i]];
      if (fi < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int fj = map_->free_index[dofs[j]];
        if (fj >= 0) triplets.emplace_back(fi, fj, local[t][3 * i + j]);
      }
    }
  }
  SparseMatrix J(map_->num_free(), map_->num_free());
  J.setFromTriplets(triplets.begin(), triplets.end());
  return J;
}

double NonlinearSystem::energy(const std::vector<double>& u) const {
  double work = 0.0;
  for (int d = 0; d < map_->num_dofs; ++d) work += load_[d] * u[d];
  return kernels::modular(*map_, exponents_.p_h, delta_, u, policy_) - work;
}

std::vector<double> NonlinearSystem::expand(const Eigen::VectorXd& free) const {
  std::vector<double> u(map_->num_dofs, 0.0);
  for (int k = 0; k < map_->num_free(); ++k) u[map_->free_dofs[k]] = free[k];
  return u;
}

Eigen::VectorXd NonlinearSystem::restrict_to_free(const std::vector<double>& u) const {
  Eigen::VectorXd r(map_->num_free());
  for (int k = 0; k < map_->num_free(); ++k) r[k] = u[map_->free_dofs[k]];
  return r;
}

namespace {

[[noreturn]] void fail(SolveReport& report, const std::string& why, std::vector<double> u) {
  report.converged = false;
  report.failure = why;
  throw ConvergenceError(why, report, std::move(u));
}

}  // namespace

SolveResult newton_solve(const NonlinearSystem& sys, const SolverConfig& config,
                         std::vector<double> u0) {
  config.validate();
  const DofMap& map = sys.dof_map();
  if (static_cast<int>(u0.size()) != map.num_dofs) {
    throw std::invalid_argument("initial guess has wrong length");
  }
  for (int d = 0; d < map.num_dofs; ++d) {
    if (map.constrained[d]) u0[d] = 0.0;
  }

  SolveReport report;
  std::vector<double> u = std::move(u0);
  Eigen::VectorXd R = sys.residual(u);
  double norm = R.norm();
  report.initial_residual = norm;
  report.residual_history.push_back(norm);
  report.energy_history.push_back(sys.energy(u));

  auto done = [&](double r) {
    return r <= config.abs_tol || r <= config.rel_tol * report.initial_residual;
  };

  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
  bool analyzed = false;

  while (!done(norm)) {
    if (report.iterations >= config.max_newton_iters) {
      std::ostringstream msg;
      msg << "Newton did not converge in " << config.max_newton_iters
          << " iterations (residual " << norm << ")";
      report.residual = norm;
      fail(report, msg.str(), u);
    }
    const SparseMatrix J = sys.jacobian(u);
    if (!analyzed) {
      ldlt.analyzePattern(J);
      analyzed = true;
    }
    ldlt.factorize(J);
    if (ldlt.info() != Eigen::Success) {
      report.residual = norm;
      fail(report, "Jacobian factorization failed", u);
    }
    const Eigen::VectorXd d = ldlt.solve(-R);
    ++report.linear_solves;
    const double lin_res = (J * d + R).norm() / norm;
    report.max_linear_relative_residual = std::max(report.max_linear_relative_residual, lin_res);
    if (!(lin_res <= config.linear_tol)) {
      report.residual = norm;
      fail(report, "linear solve missed its tolerance", u);
    }

    const double merit = 0.5 * norm * norm;
    double step = 1.0;
    std::vector<double> trial;
    Eigen::VectorXd R_trial;
    double trial_norm = 0.0;
    int halvings = 0;
    for (;;) {
      trial = u;
      for (int k = 0; k < map.num_free(); ++k) trial[map.free_dofs[k]] += step * d[k];
      R_trial = sys.residual(trial);
      trial_norm = R_trial.norm();
      const double trial_merit = 0.5 * trial_norm * trial_norm;
      if (trial_merit <= (1.0 - 2.0 * config.armijo * step) * merit) break;
      if (++halvings > config.max_halvings) {
        report.residual = norm;
        fail(report, "line search stagnated", u);
      }
      step *= config.backtrack;
    }

    u = std::move(trial);
    R = std::move(R_trial);
    norm = trial_norm;
    ++report.iterations;
    report.step_lengths.push_back(step);
    report.residual_history.push_back(norm);
    report.energy_history.push_back(sys.energy(u));
  }

  report.converged = true;
  report.residual = norm;
  report.relative_residual =
      report.initial_residual > 0.0 ? norm / report.initial_residual : 0.0;
  return {std::move(u), std::move(report)};
}

SolveResult newton_solve(const NonlinearSystem& sys, const SolverConfig& config) {
  return newton_solve(sys, config, std::vector<double>(sys.dof_map().num_dofs, 0.0));
}

P1SolveResult solve_conforming_p1(const NonlinearSystem& sys, const SolverConfig& config) {
  auto result = newton_solve(sys, config);
  return {P1Field{std::move(result.u)}, std::move(result.report)};
}

CRField prolongate(const CRSpace& coarse, const CRSpace& fine, const CRField& u) {
  const auto& mesh = fine.mesh();
  if (mesh.num_elements() != 4 * coarse.mesh().num_elements()) {
    throw std::invalid_argument("fine mesh is not a red refinement of the coarse mesh");
  }
  CRField out = fine.zero();
  for (int s = 0; s < mesh.num_sides(); ++s) {
    if (fine.dirichlet_mask()[s]) continue;
    const Vec2 x = mesh.side_midpoint(s);
    const auto& adj = mesh.side_elements()[s];
    double sum = 0.0;
    int count = 0;
    for (int t : adj) {
      if (t < 0) continue;
      sum += coarse.evaluate(u, t / 4, x);
      ++count;
    }
    out.dofs[s] = sum / count;
  }
  return out;
}

}  // namespace crvex
