// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "../kernel_suite.hpp"
#include "../problem.hpp"

#include "crvex/quadrature.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace crvex;
using crvex::testing::Problem;
using crvex::testing::Triple;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

CRField random_cr(const CRSpace& space, std::mt19937_64& rng, double scale, bool clamp) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  CRField v = space.zero();
  for (int s = 0; s < space.num_dofs(); ++s) {
    v.dofs[s] = (clamp && space.dirichlet_mask()[s]) ? 0.0 : dist(rng);
  }
  return v;
}

StudyConfig table_config(std::vector<double> p_min, std::vector<double> alpha, double eps) {
  StudyConfig cfg;
  cfg.p_min = std::move(p_min);
  cfg.alpha = std::move(alpha);
  cfg.eps = {eps};
  cfg.levels = 6;
  return cfg;
}

// 1: EOC of e_F and e_F* in [0.90, 1.05] at k = 5, 6 for the twelve eps = 1 triples.
Outcome table_reproduction(const std::vector<ConvergenceReport>& reports) {
  Outcome o;
  double lo = 1e300, hi = -1e300;
  int checked = 0;
  for (const auto& r : reports) {
    if (!r.converged() || r.levels.size() < 6) {
      o.pass = false;
      continue;
    }
    for (int k : {5, 6}) {
      for (const auto& rate : {r.levels[k - 1].eoc_F, r.levels[k - 1].eoc_Fstar}) {
        ++checked;
        if (!rate) {
          o.pass = false;
          continue;
        }
        lo = std::min(lo, *rate);
        hi = std::max(hi, *rate);
        if (*rate < 0.90 || *rate > 1.05) o.pass = false;
      }
    }
  }
  if (checked != 48) o.pass = false;
  o.detail = std::to_string(checked) + " rates in [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "]";
  return o;
}

// 2: eps = 0.5, (p-, alpha) = (1.5, 1.0) at the largest level, within 0.08 of [0.944, 0.966].
Outcome spot_check(const std::vector<ConvergenceReport>& reports) {
  Outcome o;
  if (reports.size() != 1 || !reports[0].converged() || reports[0].levels.empty()) {
    return {false, "study did not converge"};
  }
  const auto& last = reports[0].levels.back();
  if (!last.eoc_F || !last.eoc_Fstar) return {false, "undefined rate"};
  for (double rate : {*last.eoc_F, *last.eoc_Fstar}) {
    if (rate < 0.944 - 0.08 || rate > 0.966 + 0.08) o.pass = false;
  }
  o.detail = "k=" + std::to_string(last.level) + ": EOC(e_F)=" + fmt("%.3f", *last.eoc_F) +
             ", EOC(e_F*)=" + fmt("%.3f", *last.eoc_Fstar);
  return o;
}

// 3: relative duality gap at every level of every study run.
Outcome strong_duality(const std::vector<const std::vector<ConvergenceReport>*>& runs) {
  Outcome o;
  double worst = 0.0;
  int levels = 0;
  for (const auto* reports : runs) {
    for (const auto& r : *reports) {
      if (!r.converged()) o.pass = false;
      for (const auto& l : r.levels) {
        ++levels;
        worst = std::max(worst, l.audit.relative_gap);
        if (!(l.audit.relative_gap <= 1e-8) || !l.audit.dual_feasible) o.pass = false;
      }
    }
  }
  o.detail = std::to_string(levels) + " levels, max relative gap " + fmt("%.2e", worst);
  return o;
}

// 4: div z + f_h = 0 and Pi_h z = A_h(grad u_h) for arbitrary CR fields.
Outcome marini_identities() {
  Outcome o;
  std::mt19937_64 rng(4);
  double worst_div = 0.0, worst_proj = 0.0;
  int fields = 0;
  for (int level = 1; level <= 4; ++level) {
    for (const Triple& t : crvex::testing::table1_triples()) {
      const Problem P(level, t);
      double load_scale = 0.0;
      for (double f : P.f_h) load_scale = std::max(load_scale, std::abs(f));
      for (int trial = 0; trial < 4; ++trial) {
        const CRField u = random_cr(*P.space, rng, trial + 1.0, trial % 2 == 0);
        const auto z = P.flux(u);
        const auto grads = cr_gradient(*P.space, u);
        const auto div = rt0_divergence(z);
        const auto means = rt0_element_mean(z);
        ElementVectors flux(grads.size());
        double flux_scale = 0.0;
        for (std::size_t e = 0; e < grads.size(); ++e) {
          flux[e] = eval_A(P.exponents.p_h[e], P.c.delta, grads[e]);
          flux_scale = std::max(flux_scale, flux[e].norm());
        }
        for (std::size_t e = 0; e < grads.size(); ++e) {
          const double d = std::abs(div[e] + P.f_h[e]) / load_scale;
          const double p = (means[e] - flux[e]).norm() / flux_scale;
          worst_div = std::max(worst_div, d);
          worst_proj = std::max(worst_proj, p);
          if (!(d <= 1e-13) || !(p <= 1e-13)) o.pass = false;
        }
        ++fields;
      }
    }
  }
  o.detail = std::to_string(fields) + " fields, max " + fmt("%.1e", worst_div) + " (div), " +
             fmt("%.1e", worst_proj) + " (Pi_h)";
  return o;
}

// 5: discrete integration by parts, 100 random pairs per level 0..3.
Outcome integration_by_parts() {
  Outcome o;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  double worst = 0.0;
  int pairs = 0;
  for (int level = 0; level <= 3; ++level) {
    const Triangulation mesh = crvex::testing::level_mesh(level);
    const MeshMetrics metrics = compute_metrics(mesh);
    const CRSpace cr(mesh, metrics);
    for (int trial = 0; trial < 100; ++trial) {
      const CRField v = random_cr(cr, rng, 1.0, true);
      RT0Field y{std::vector<double>(mesh.num_sides())};
      for (double& d : y.dofs) d = dist(rng);
      const IbpResidual r = check_discrete_ibp(cr, v, y);
      const double rel = r.scale > 0.0 ? r.residual / r.scale : r.residual;
      worst = std::max(worst, rel);
      if (!(rel <= 1e-12)) o.pass = false;
      ++pairs;
    }
  }
  o.detail = std::to_string(pairs) + " pairs, max relative residual " + fmt("%.1e", worst);
  return o;
}

// 6: D(z + w) <= I(u) + 1e-8 for 20 divergence-free w, Table-1 triples, level 3.
Outcome weak_duality() {
  Outcome o;
  double worst = -1e300;
  int samples = 0;
  for (const Triple& t : crvex::testing::table1_triples()) {
    const Problem P(3, t);
    const CRField u{P.solve().u};
    const auto z = P.flux(u);
    const double primal = primal_energy(*P.space, u, P.f_h, P.exponents, P.c.delta);
    for (int trial = 0; trial < 20; ++trial) {
      const RT0Field w = random_divergence_free(P.mesh, P.metrics, 600 + trial,
                                                 0.5 * std::pow(10.0, -(trial % 4)));
      const auto d = dual_energy(add(z, to_elementwise(P.mesh, P.metrics, w)), P.metrics, P.f_h,
                                 P.exponents, P.c.delta);
      ++samples;
      if (!d.feasible) {
        o.pass = false;
        continue;
      }
      worst = std::max(worst, d.value - primal);
      if (!(d.value <= primal + 1e-8)) o.pass = false;
    }
  }
  o.detail = std::to_string(samples) + " perturbations, max D - I = " + fmt("%.2e", worst);
  return o;
}

// 7: N-function property suite on the frozen grid.
Outcome kernel_suite() {
  Outcome o;
  long samples = 0, failures = 0;
  std::ostringstream failed;
  for (const auto& c : grid::run_kernel_suite()) {
    samples += c.samples;
    failures += c.failures;
    if (c.failures > 0) failed << ' ' << c.name << '(' << c.failures << ')';
  }
  o.pass = failures == 0 && samples > 0;
  o.detail = std::to_string(samples) + " samples, " + std::to_string(failures) + " failures" +
             failed.str();
  return o;
}

// 8: affine reproduction, quadrature degrees, Pi_h on constants, node averaging.
Outcome exactness() {
  Outcome o;
  std::vector<std::string> failed;
  const Triangulation mesh = crvex::testing::level_mesh(3);
  const MeshMetrics metrics = compute_metrics(mesh);
  const CRSpace cr(mesh, metrics);
  const P1Space p1(mesh, metrics);

  const auto exps = ElementExponents::constant(mesh.num_elements(), 2.0);
  const Vec2 g(0.7, -1.3);
  const CRField u = cr.interpolate([&](const Vec2& x) { return 0.2 + g.dot(x); });
  const double e = error_F(cr, u, [&](const Vec2&) { return g; }, exps, 1e-4);
  if (!(e <= 1e-26)) failed.push_back("affine e_F=" + fmt("%.1e", e));

  auto factorial = [](int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  for (const SimplexQuadrature* rule :
       {&SimplexQuadrature::centroid(), &SimplexQuadrature::degree2(),
        &SimplexQuadrature::degree5(), &SimplexQuadrature::degree8()}) {
    for (int a = 0; a <= rule->degree; ++a) {
      for (int b = 0; a + b <= rule->degree; ++b) {
        double sum = 0.0;
        for (int q = 0; q < rule->size(); ++q) {
          const Vec2 x = rule->map(q, Vec2(0, 0), Vec2(1, 0), Vec2(0, 1));
          sum += rule->weights[q] * std::pow(x.x(), a) * std::pow(x.y(), b);
        }
        const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
        if (!(std::abs(0.5 * sum - exact) <= 1e-13 * exact)) {
          failed.push_back("quadrature degree " + std::to_string(rule->degree));
        }
      }
    }
  }

  for (double c : {1.0, -3.25, 1e5}) {
    for (double v : l2_project_pc(mesh, metrics, [c](const Vec2&) { return c; })) {
      if (!(std::abs(v - c) <= 1e-14 * std::abs(c))) failed.push_back("Pi_h constant");
    }
  }

  const P1Field w = p1.interpolate(
      [](const Vec2& x) { return (1 - x.x() * x.x()) * (1 - x.y() * x.y()) * std::exp(x.x()); }, true);
  const P1Field back = node_average(cr, p1, p1_to_cr(mesh, w));
  std::mt19937_64 rng(8);
  const P1Field once = node_average(cr, p1, random_cr(cr, rng, 1.0, true));
  const P1Field twice = node_average(cr, p1, p1_to_cr(mesh, once));
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!(std::abs(back.dofs[v] - w.dofs[v]) <= 1e-13 * (1.0 + std::abs(w.dofs[v])))) {
      failed.push_back("node_average on P1");
    }
    if (!(std::abs(twice.dofs[v] - once.dofs[v]) <= 1e-13 * (1.0 + std::abs(once.dofs[v])))) {
      failed.push_back("node_average idempotence");
    }
  }

  failed.erase(std::unique(failed.begin(), failed.end()), failed.end());
  o.pass = failed.empty();
  o.detail = "affine e_F=" + fmt("%.1e", e) + ", 4 quadrature rules, Pi_h, node_average";
  for (const auto& f : failed) o.detail += "; failed: " + f;
  return o;
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();

  const auto table = run_study(table_config({1.5, 2.0, 2.5}, {0.1, 0.25, 0.5, 1.0}, 1.0));
  const auto spot = run_study(table_config({1.5}, {1.0}, 0.5));

  const std::vector<std::pair<const char*, Outcome>> results = {
      {"Table reproduction (eps=1, k=5,6)", table_reproduction(table)},
      {"Spot check (eps=0.5, p-=1.5, alpha=1)", spot_check(spot)},
      {"Discrete strong duality", strong_duality({&table, &spot})},
      {"Marini local identities", marini_identities()},
      {"Discrete integration by parts", integration_by_parts()},
      {"Weak duality", weak_duality()},
      {"Kernel property suite", kernel_suite()},
      {"Exactness suite", exactness()},
  };

  bool all = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& [name, o] = results[i];
    all = all && o.pass;
    std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1, name,
                o.detail.c_str());
  }
  const double seconds = std::chrono::duration<double>(clock::now() - start).count();
  std::printf("%s, %.1f s\n", all ? "all criteria passed" : "some criteria FAILED", seconds);
  return all ? 0 : 1;
}
