#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "problem.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

using namespace crvex;
using crvex::testing::Problem;
using crvex::testing::Triple;
using doctest::Approx;

namespace {

std::vector<double> random_free(const DofMap& map, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> u(map.num_dofs, 0.0);
  for (int d : map.free_dofs) u[d] = dist(rng);
  return u;
}

std::vector<double> axpy(const std::vector<double>& u, double s, const std::vector<double>& d) {
  std::vector<double> out(u);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] += s * d[i];
  return out;
}

// Constant-exponent system on a level-k mesh with a given piecewise constant load.
struct Flat {
  Triangulation mesh;
  MeshMetrics metrics;
  CRSpace space;
  Flat(int level) : mesh(crvex::testing::level_mesh(level)), metrics(compute_metrics(mesh)), space(mesh, metrics) {}
  NonlinearSystem system(double q, double delta, double f) const {
    return NonlinearSystem::crouzeix_raviart(
        space, ElementExponents::constant(mesh.num_elements(), q), delta,
        ElementScalars(mesh.num_elements(), f));
  }
};

}  // namespace

TEST_CASE("config validation") {
  SolverConfig ok;
  CHECK_NOTHROW(ok.validate());
  SolverConfig bad = ok;
  bad.abs_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.backtrack = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.armijo = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.max_newton_iters = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("residual: spec examples") {
  Flat F(2);
  const auto homogeneous = F.system(1.7, 1e-4, 0.0);
  CHECK(homogeneous.residual(F.space.zero().dofs).norm() == 0.0);

  // p = 2, delta = 0: R(u) = K u - load, so R is affine.
  const auto lin = F.system(2.0, 0.0, 1.3);
  std::mt19937_64 rng(1);
  const auto u = random_free(lin.dof_map(), rng);
  const auto v = random_free(lin.dof_map(), rng);
  std::vector<double> w(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) w[i] = 2.0 * u[i] - 0.5 * v[i];
  const Eigen::VectorXd r0 = lin.residual(F.space.zero().dofs);
  const Eigen::VectorXd combo = lin.residual(w) - r0 - 2.0 * (lin.residual(u) - r0) + 0.5 * (lin.residual(v) - r0);
  CHECK(combo.norm() <= 1e-13 * (1.0 + lin.residual(w).norm()));
  const SparseMatrix K = lin.jacobian(u);
  CHECK((lin.residual(u) - (K * lin.restrict_to_free(u) + r0)).norm() < 1e-12);
}

TEST_CASE("residual is the gradient of the discrete energy") {
  const Problem P(1, {1.5, 1.0, 1.0});
  const auto sys = P.system();
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const auto u = random_free(sys.dof_map(), rng);
    const auto d = random_free(sys.dof_map(), rng);
    const double h = 1e-5;
    const double fd = (sys.energy(axpy(u, h, d)) - sys.energy(axpy(u, -h, d))) / (2.0 * h);
    const double exact = sys.residual(u).dot(sys.restrict_to_free(d));
    CHECK(std::abs(fd - exact) <= 1e-6 * std::max(std::abs(exact), 1e-3));
  }
}

TEST_CASE("jacobian: finite differences, symmetry, definiteness") {
  std::mt19937_64 rng(3);
  for (const Triple& t : crvex::testing::table1_triples()) {
    for (int level : {1, 2}) {
      const Problem P(level, t);
      const auto sys = P.system();
      const auto u = random_free(sys.dof_map(), rng);
      const Eigen::MatrixXd J = Eigen::MatrixXd(sys.jacobian(u));
      CHECK((J - J.transpose()).cwiseAbs().maxCoeff() == 0.0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
      if (level != 1) continue;
      const double h = 1e-7;
      Eigen::MatrixXd fd(J.rows(), J.cols());
      for (int k = 0; k < sys.dof_map().num_free(); ++k) {
        std::vector<double> e(u.size(), 0.0);
        e[sys.dof_map().free_dofs[k]] = 1.0;
        fd.col(k) = (sys.residual(axpy(u, h, e)) - sys.residual(axpy(u, -h, e))) / (2.0 * h);
      }
      CHECK((J - fd).cwiseAbs().maxCoeff() <= 1e-5 * J.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("jacobian: linear case and singular case") {
  Flat F(1);
  const auto lin = F.system(2.0, 0.0, 0.0);
  std::mt19937_64 rng(4);
  const SparseMatrix J1 = lin.jacobian(random_free(lin.dof_map(), rng));
  const SparseMatrix J2 = lin.jacobian(random_free(lin.dof_map(), rng));
  CHECK((Eigen::MatrixXd(J1) - Eigen::MatrixXd(J2)).norm() == 0.0);

  const auto singular = F.system(1.5, 0.0, 0.0);
  CHECK_THROWS_AS(singular.jacobian(F.space.zero().dofs), NumericalError);
}

TEST_CASE("newton: linear problem converges in one step") {
  Flat F(3);
  for (double delta : {0.0, 1e-4, 1.0}) {
    const auto sys = F.system(2.0, delta, 2.5);
    const auto res = newton_solve(sys, SolverConfig{});
    CHECK(res.report.converged);
    CHECK(res.report.iterations == 1);
    CHECK(res.report.residual <= 1e-8);
  }
}

TEST_CASE("newton: manufactured problem, levels 1-5 from zero") {
  for (int level = 1; level <= 5; ++level) {
    const Problem P(level, {1.5, 1.0, 1.0});
    const auto sys = P.system();
    const auto res = newton_solve(sys, SolverConfig{});
    const auto& r = res.report;
    CAPTURE(level);
    CHECK(r.converged);
    CHECK(r.iterations <= 25);
    CHECK((r.residual <= 1e-8 || r.residual <= 1e-10 * r.initial_residual));
    // the merit 1/2 ||R||^2 decreases monotonically
    for (std::size_t k = 1; k < r.residual_history.size(); ++k) {
      CHECK(r.residual_history[k] < r.residual_history[k - 1]);
    }
    // energy descent along accepted steps
    for (std::size_t k = 1; k < r.energy_history.size(); ++k) {
      CHECK(r.energy_history[k] < r.energy_history[k - 1]);
    }
    CHECK(r.max_linear_relative_residual <= 1e-2);
    for (double step : r.step_lengths) CHECK((step > 0.0 && step <= 1.0));

    // Galerkin orthogonality from the stopping rule
    std::mt19937_64 rng(10 + level);
    const Eigen::VectorXd R = sys.residual(res.u);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd v = sys.restrict_to_free(random_free(sys.dof_map(), rng));
      CHECK(std::abs(R.dot(v)) <= 1e-8 * v.norm());
    }
  }
}

TEST_CASE("newton: iteration limit raises a convergence error with the report") {
  const Problem P(2, {1.5, 1.0, 1.0});
  SolverConfig cfg;
  cfg.max_newton_iters = 1;
  try {
    newton_solve(P.system(), cfg);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& err) {
    CHECK(!err.report().converged);
    CHECK(!err.report().failure.empty());
    CHECK(err.report().iterations == 1);
    CHECK(err.last_iterate().size() == static_cast<std::size_t>(P.space->num_dofs()));
  }
}

TEST_CASE("newton: Dirichlet DOFs of the initial guess are zeroed") {
  const Problem P(2, {2.0, 0.5, 1.0});
  std::vector<double> u0(P.space->num_dofs(), 0.3);
  const auto res = newton_solve(P.system(), SolverConfig{}, u0);
  for (int s = 0; s < P.space->num_dofs(); ++s) {
    if (P.space->dirichlet_mask()[s]) CHECK(res.u[s] == 0.0);
  }
  const auto cold = P.solve();
  for (int s = 0; s < P.space->num_dofs(); ++s) CHECK(res.u[s] == Approx(cold.u[s]).epsilon(1e-7));
}

TEST_CASE("solution is independent of the vertex and element numbering") {
  const Triangulation base = crvex::testing::level_mesh(3);
  std::mt19937_64 rng(77);
  std::vector<int> vperm(base.num_vertices()), eperm(base.num_elements());
  std::iota(vperm.begin(), vperm.end(), 0);
  std::iota(eperm.begin(), eperm.end(), 0);
  std::shuffle(vperm.begin(), vperm.end(), rng);
  std::shuffle(eperm.begin(), eperm.end(), rng);
  std::vector<Vec2> verts(base.num_vertices());
  for (int v = 0; v < base.num_vertices(); ++v) verts[vperm[v]] = base.vertices()[v];
  std::vector<std::array<int, 3>> elems(base.num_elements());
  for (int t = 0; t < base.num_elements(); ++t) {
    const auto& e = base.elements()[eperm[t]];
    const int r = t % 3;  // rotate the local numbering too
    elems[t] = {vperm[e[r]], vperm[e[(r + 1) % 3]], vperm[e[(r + 2) % 3]]};
  }
  const Triangulation shuffled = Triangulation::from_elements(verts, elems, all_dirichlet(), 3);

  ManufacturedCase c;
  c.exponent = ExponentField{1.5, 1.0, 0.5};
  auto solve_on = [&](const Triangulation& m) {
    const MeshMetrics metrics = compute_metrics(m);
    const CRSpace space(m, metrics);
    const auto sys = NonlinearSystem::crouzeix_raviart(space, discretize_exponent(c.exponent, metrics),
                                                       c.delta, project_load(m, c));
    const auto u = newton_solve(sys, SolverConfig{}).u;
    std::map<std::pair<long, long>, double> by_midpoint;
    for (int s = 0; s < m.num_sides(); ++s) {
      const Vec2 x = m.side_midpoint(s);
      by_midpoint[{std::lround(x.x() * 1e8), std::lround(x.y() * 1e8)}] = u[s];
    }
    return by_midpoint;
  };
  const auto a = solve_on(base);
  const auto b = solve_on(shuffled);
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (const auto& [key, value] : a) worst = std::max(worst, std::abs(value - b.at(key)));
  CHECK(worst <= 1e-10);
}

TEST_CASE("prolongation reproduces affine CR fields") {
  const Triangulation coarse = crvex::testing::level_mesh(2);
  const Triangulation fine = red_refine(coarse);
  const MeshMetrics cm = compute_metrics(coarse), fm = compute_metrics(fine);
  const CRSpace cs(coarse, cm), fs(fine, fm);
  auto affine = [](const Vec2& x) { return 0.5 + x.x() - 2.0 * x.y(); };
  const CRField up = prolongate(cs, fs, cs.interpolate(affine));
  for (int s = 0; s < fine.num_sides(); ++s) {
    const double expect = fs.dirichlet_mask()[s] ? 0.0 : affine(fm.x_S[s]);
    CHECK(up.dofs[s] == Approx(expect).epsilon(1e-13));
  }
  CHECK_THROWS_AS(prolongate(cs, cs, cs.zero()), std::invalid_argument);
}

TEST_CASE("conforming P1: zero data, zero solution") {
  const Triangulation m = crvex::testing::level_mesh(2);
  const MeshMetrics metrics = compute_metrics(m);
  const P1Space p1(m, metrics);
  const CRSpace cr(m, metrics);
  const auto exps = ElementExponents::constant(m.num_elements(), 2.0);
  const auto sys = NonlinearSystem::conforming_p1(p1, exps, 0.0, [](const Vec2&) { return 0.0; });
  const auto res = solve_conforming_p1(sys, SolverConfig{});
  for (double v : res.u.dofs) CHECK(v == 0.0);
  const auto cr_sys = NonlinearSystem::crouzeix_raviart(cr, exps, 0.0, ElementScalars(m.num_elements(), 0.0));
  for (double v : newton_solve(cr_sys, SolverConfig{}).u) CHECK(v == 0.0);
}

TEST_CASE("conforming P1 and CR converge at comparable rates") {
  ManufacturedCase c;
  c.exponent = ExponentField{1.5, 1.0, 1.0};
  auto load = [&c](const Vec2& x) { return eval_load(c, x); };
  std::vector<double> e_cr, e_p1, hs;
  Triangulation m = crvex::testing::level_mesh(0);
  for (int k = 1; k <= 6; ++k) {
    m = red_refine(m);
    const MeshMetrics metrics = compute_metrics(m);
    const CRSpace cr(m, metrics);
    const P1Space p1(m, metrics);
    const auto exps = discretize_exponent(c.exponent, metrics);
    const auto cr_sys = NonlinearSystem::crouzeix_raviart(cr, exps, c.delta, project_load(m, c));
    const CRField u_cr{newton_solve(cr_sys, SolverConfig{}).u};
    const auto p1_sys = NonlinearSystem::conforming_p1(p1, exps, c.delta, load);
    const auto u_p1 = solve_conforming_p1(p1_sys, SolverConfig{});
    CHECK(u_p1.report.converged);
    e_cr.push_back(error_F(cr, u_cr, c, exps));
    e_p1.push_back(error_F(p1, u_p1.u, c, exps));
    hs.push_back(metrics.h_max);
  }
  for (int k = 2; k < 6; ++k) {
    const double rate_cr = 0.5 * std::log(e_cr[k] / e_cr[k - 1]) / std::log(hs[k] / hs[k - 1]);
    const double rate_p1 = 0.5 * std::log(e_p1[k] / e_p1[k - 1]) / std::log(hs[k] / hs[k - 1]);
    CAPTURE(k + 1);
    CAPTURE(rate_cr);
    CAPTURE(rate_p1);
    CHECK(std::abs(rate_cr - rate_p1) <= 0.1);
  }
}
