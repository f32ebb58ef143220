#include "crvex/study.hpp"

#include "crvex/kernels.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include <omp.h>

namespace crvex {

namespace {

template <class Space, class Field>
double natural_distance(const Space& space, const Field& u, const VectorField& exact_grad,
                        const ElementExponents& exponents, double delta,
                        const SimplexQuadrature& quad, ExecPolicy policy) {
  const auto& mesh = space.mesh();
  const DofMap& map = space.dof_map();
  const auto grads = kernels::element_gradients(map, u.dofs, policy);
  return kernels::ordered_sum(map.num_elements(), policy, [&](int t) {
    const PhiKit kit(exponents.p_h[t], delta);
    const auto& e = mesh.elements()[t];
    const Vec2& a = mesh.vertices()[e[0]];
    const Vec2& b = mesh.vertices()[e[1]];
    const Vec2& d = mesh.vertices()[e[2]];
    const Vec2 discrete = kit.F(grads[t]);
    double sum = 0.0;
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 exact = kit.F(exact_grad(quad.map(q, a, b, d)));
      sum += quad.weights[q] * (discrete - exact).squaredNorm();
    }
    return map.area[t] * sum;
  });
}

}  // namespace

double error_F(const CRSpace& space, const CRField& u, const VectorField& exact_grad,
               const ElementExponents& exponents, double delta, const SimplexQuadrature& quad,
               ExecPolicy policy) {
  return natural_distance(space, u, exact_grad, exponents, delta, quad, policy);
}

double error_F(const P1Space& space, const P1Field& u, const VectorField& exact_grad,
               const ElementExponents& exponents, double delta, const SimplexQuadrature& quad,
               ExecPolicy policy) {
  return natural_distance(space, u, exact_grad, exponents, delta, quad, policy);
}

double error_F(const CRSpace& space, const CRField& u, const ManufacturedCase& c,
               const ElementExponents& exponents, const SimplexQuadrature& quad,
               ExecPolicy policy) {
  return error_F(space, u, [&c](const Vec2& x) { return eval_exact(c, x).grad; }, exponents,
                 c.delta, quad, policy);
}

double error_F(const P1Space& space, const P1Field& u, const ManufacturedCase& c,
               const ElementExponents& exponents, const SimplexQuadrature& quad,
               ExecPolicy policy) {
  return error_F(space, u, [&c](const Vec2& x) { return eval_exact(c, x).grad; }, exponents,
                 c.delta, quad, policy);
}

double error_Fstar(const Triangulation& mesh, const MeshMetrics& metrics,
                   const ElementwiseRT0& z, const VectorField& exact_flux,
                   const ElementExponents& exponents, double delta,
                   const SimplexQuadrature& quad, ExecPolicy policy) {
  return kernels::ordered_sum(mesh.num_elements(), policy, [&](int t) {
    const PhiKit kit(exponents.p_h[t], delta);
    const auto& e = mesh.elements()[t];
    const Vec2& a = mesh.vertices()[e[0]];
    const Vec2& b = mesh.vertices()[e[1]];
    const Vec2& d = mesh.vertices()[e[2]];
    double sum = 0.0;
    for (int q = 0; q < quad.size(); ++q) {
      const Vec2 x = quad.map(q, a, b, d);
      const Vec2 discrete = kit.Fstar(rt0_evaluate(metrics, z, t, x));
      const Vec2 exact = kit.Fstar(exact_flux(x));
      sum += quad.weights[q] * (discrete - exact).squaredNorm();
    }
    return metrics.area[t] * sum;
  });
}

double error_Fstar(const Triangulation& mesh, const MeshMetrics& metrics,
                   const ElementwiseRT0& z, const ManufacturedCase& c,
                   const ElementExponents& exponents, const SimplexQuadrature& quad,
                   ExecPolicy policy) {
  return error_Fstar(mesh, metrics, z, [&c](const Vec2& x) { return eval_exact(c, x).flux; },
                     exponents, c.delta, quad, policy);
}

std::vector<std::optional<double>> eoc(const std::vector<double>& errors,
                                       const std::vector<double>& hs) {
  if (errors.size() != hs.size()) throw std::invalid_argument("errors and hs differ in length");
  std::vector<std::optional<double>> out(errors.size());
  for (std::size_t k = 1; k < errors.size(); ++k) {
    if (errors[k] > 0.0 && errors[k - 1] > 0.0 && hs[k] > 0.0 && hs[k - 1] > 0.0 &&
        hs[k] != hs[k - 1]) {
      out[k] = std::log(errors[k] / errors[k - 1]) / std::log(hs[k] / hs[k - 1]);
    }
  }
  return out;
}

void StudyConfig::validate() const {
  if (p_min.empty() || alpha.empty() || eps.empty()) {
    throw std::invalid_argument("parameter lists must not be empty");
  }
  for (double p : p_min) {
    if (!(p > 1.0)) throw std::invalid_argument("p_min must exceed 1");
  }
  for (double a : alpha) {
    if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("alpha must lie in (0,1]");
  }
  for (double e : eps) {
    if (!(e >= 0.0)) throw std::invalid_argument("eps must be non-negative");
  }
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive for Newton solves");
  if (!(beta > 1.0)) throw std::invalid_argument("beta must exceed 1");
  if (levels < 1) throw std::invalid_argument("levels must be at least 1");
  if (n0 < 1) throw std::invalid_argument("n0 must be at least 1");
  if (format != "csv" && format != "markdown") {
    throw std::invalid_argument("format must be csv or markdown");
  }
  if (threads < 0) throw std::invalid_argument("threads must be non-negative");
  solver.validate();
}

bool ConvergenceReport::ok() const {
  if (!converged()) return false;
  for (const auto& level : levels) {
    if (!level.audit_passed) return false;
  }
  return true;
}

namespace {

struct LevelState {
  Triangulation mesh;
  MeshMetrics metrics;
  std::unique_ptr<CRSpace> space;
  CRField u;

  explicit LevelState(Triangulation m) : mesh(std::move(m)), metrics(compute_metrics(mesh)) {
    space = std::make_unique<CRSpace>(mesh, metrics);
  }
};

}  // namespace

ElementScalars project_load(const Triangulation& mesh, const ManufacturedCase& c,
                            ExecPolicy policy,
                            const SimplexQuadrature& quad) {
  ElementScalars f_h(mesh.num_elements());
  kernels::for_each_index(mesh.num_elements(), policy, [&](int t) {
    const auto& e = mesh.elements()[t];
    double sum = 0.0;
    for (int q = 0; q < quad.size(); ++q) {
      sum += quad.weights[q] *
             eval_load(c, quad.map(q, mesh.vertices()[e[0]], mesh.vertices()[e[1]],
                                   mesh.vertices()[e[2]]));
    }
    f_h[t] = sum;
  });
  return f_h;
}

ConvergenceReport run_case(const StudyConfig& config, double p_min, double alpha, double eps,
                           ExecPolicy policy) {
  ConvergenceReport report;
  report.p_min = p_min;
  report.alpha = alpha;
  report.eps = eps;
  report.delta = config.delta;
  report.beta = config.beta;

  ManufacturedCase c;
  c.beta = config.beta;
  c.delta = config.delta;
  c.exponent.p_min = p_min;
  c.exponent.alpha = alpha;
  c.exponent.eps = eps;
  c.exponent.validate();

  std::unique_ptr<LevelState> prev;
  Triangulation mesh = build_criss_cross(config.n0, Rectangle{});
  for (int k = 1; k <= config.levels; ++k) {
    mesh = red_refine(mesh);
    auto cur = std::make_unique<LevelState>(mesh);
    const CRSpace& space = *cur->space;

    const auto exponents = discretize_exponent(c.exponent, cur->metrics);
    const ElementScalars f_h = project_load(cur->mesh, c, policy);
    const auto sys = NonlinearSystem::crouzeix_raviart(space, exponents, c.delta, f_h, policy);

    LevelRecord rec;
    rec.level = k;
    rec.h = cur->metrics.h_max;
    rec.h_avg = cur->metrics.h_avg;
    rec.elements = cur->mesh.num_elements();
    rec.dofs = space.dof_map().num_free();

    std::vector<double> u0 =
        prev ? prolongate(*prev->space, space, prev->u).dofs : space.zero().dofs;
    try {
      auto solved = newton_solve(sys, config.solver, std::move(u0));
      cur->u = CRField{std::move(solved.u)};
      rec.solve = std::move(solved.report);
    } catch (const ConvergenceError& err) {
      rec.solve = err.report();
      report.levels.push_back(std::move(rec));
      report.failure = "level " + std::to_string(k) + ": " + err.what();
      break;
    }

    const auto z = marini_flux(space, cur->u, f_h, exponents, c.delta, policy);
    rec.audit = audit(space, cur->u, z, f_h, exponents, c.delta, policy);
    rec.audit_passed = rec.audit.passed(config.tolerances);
    rec.e_F = error_F(space, cur->u, c, exponents, SimplexQuadrature::high_order(), policy);
    rec.e_Fstar = error_Fstar(cur->mesh, cur->metrics, z, c, exponents,
                              SimplexQuadrature::high_order(), policy);
    report.levels.push_back(std::move(rec));
    prev = std::move(cur);
  }

  std::vector<double> hs, eF, eFs, nF, nFs;
  for (const auto& r : report.levels) {
    if (!r.solve.converged) break;
    hs.push_back(r.h);
    eF.push_back(r.e_F);
    eFs.push_back(r.e_Fstar);
    nF.push_back(std::sqrt(r.e_F));
    nFs.push_back(std::sqrt(r.e_Fstar));
  }
  const auto rate_F = eoc(nF, hs);
  const auto rate_Fs = eoc(nFs, hs);
  const auto rate_F2 = eoc(eF, hs);
  const auto rate_Fs2 = eoc(eFs, hs);
  for (std::size_t k = 0; k < hs.size(); ++k) {
    auto& l = report.levels[k];
    l.eoc_F = rate_F[k];
    l.eoc_Fstar = rate_Fs[k];
    l.eoc_F_squared = rate_F2[k];
    l.eoc_Fstar_squared = rate_Fs2[k];
  }
  return report;
}

std::vector<ConvergenceReport> run_study(const StudyConfig& config) {
  config.validate();
  struct Triple {
    double p_min, alpha, eps;
  };
  std::vector<Triple> triples;
  for (double e : config.eps) {
    for (double a : config.alpha) {
      for (double p : config.p_min) triples.push_back({p, a, e});
    }
  }
  if (config.threads > 0) omp_set_num_threads(config.threads);

  const int n = static_cast<int>(triples.size());
  std::vector<ConvergenceReport> reports(n);
  if (config.policy == ExecPolicy::OpenMP && n > 1) {
    kernels::for_each_index(n, ExecPolicy::OpenMP, [&](int i) {
      reports[i] = run_case(config, triples[i].p_min, triples[i].alpha, triples[i].eps,
                            ExecPolicy::Serial);
    });
  } else {
    for (int i = 0; i < n; ++i) {
      reports[i] = run_case(config, triples[i].p_min, triples[i].alpha, triples[i].eps,
                            config.policy);
    }
  }
  return reports;
}

}  // namespace crvex
