#include "crvex/duality.hpp"

#include "crvex/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace crvex {

namespace {

double max_abs(const ElementScalars& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_norm(const ElementVectors& v) {
  double m = 0.0;
  for (const Vec2& x : v) m = std::max(m, x.norm());
  return m;
}

}  // namespace

ElementwiseRT0 marini_flux(const CRSpace& space, const CRField& u, const ElementScalars& f_h,
                           const ElementExponents& exponents, double delta, ExecPolicy policy) {
  const DofMap& map = space.dof_map();
  const int nt = map.num_elements();
  const auto grads = kernels::element_gradients(map, u.dofs, policy);
  ElementwiseRT0 z;
  z.a.resize(nt);
  z.b.resize(nt);
  kernels::for_each_index(nt, policy, [&](int t) {
    z.a[t] = PhiKit(exponents.p_h[t], delta).A(grads[t]);
    z.b[t] = -0.5 * f_h[t];
  });
  return z;
}

double primal_energy(const CRSpace& space, const CRField& u, const ElementScalars& f_h,
                     const ElementExponents& exponents, double delta, ExecPolicy policy) {
  const DofMap& map = space.dof_map();
  const auto& sides = space.mesh().element_sides();
  return kernels::ordered_sum(map.num_elements(), policy, [&](int t) {
    const auto& d = sides[t];
    const auto& g = map.basis_gradients[t];
    const Vec2 grad = u.dofs[d[0]] * g[0] + u.dofs[d[1]] * g[1] + u.dofs[d[2]] * g[2];
    const double mean = (u.dofs[d[0]] + u.dofs[d[1]] + u.dofs[d[2]]) / 3.0;
    return map.area[t] * (PhiKit(exponents.p_h[t], delta).phi(grad.norm()) - f_h[t] * mean);
  });
}

double feasibility_tolerance(const ElementScalars& f_h) {
  return 1e-8 * std::max(max_abs(f_h), 1.0);
}

DualValue dual_energy(const ElementwiseRT0& z, const MeshMetrics& metrics,
                      const ElementScalars& f_h, const ElementExponents& exponents,
                      double delta, ExecPolicy policy) {
  const int nt = static_cast<int>(z.a.size());
  DualValue out;
  out.feasibility_tolerance = feasibility_tolerance(f_h);
  for (int t = 0; t < nt; ++t) {
    out.divergence_residual = std::max(out.divergence_residual, std::abs(2.0 * z.b[t] + f_h[t]));
  }
  if (out.divergence_residual > out.feasibility_tolerance) return out;
  out.feasible = true;
  out.value = -kernels::ordered_sum(nt, policy, [&](int t) {
    return metrics.area[t] * PhiKit(exponents.p_h[t], delta).phi_conjugate(z.a[t].norm());
  });
  return out;
}

DualValue dual_energy(const RT0Field& z, const Triangulation& mesh, const MeshMetrics& metrics,
                      const ElementScalars& f_h, const ElementExponents& exponents,
                      double delta, ExecPolicy policy) {
  return dual_energy(to_elementwise(mesh, metrics, z), metrics, f_h, exponents, delta, policy);
}

bool DualityAudit::passed(const AuditTolerances& tol) const {
  return dual_feasible && relative_gap <= tol.relative_gap &&
         div_residual <= tol.divergence * load_scale &&
         projection_residual <= tol.projection * flux_scale &&
         side_flux_residual <= tol.normal_jump * flux_scale &&
         fenchel_young_residual <= tol.fenchel_young;
}

DualityAudit audit(const CRSpace& space, const CRField& u, const ElementwiseRT0& z,
                   const ElementScalars& f_h, const ElementExponents& exponents, double delta,
                   ExecPolicy policy) {
  const auto& mesh = space.mesh();
  const auto& metrics = space.metrics();
  const DofMap& map = space.dof_map();
  const int nt = map.num_elements();
  const auto grads = kernels::element_gradients(map, u.dofs, policy);

  DualityAudit r;
  r.load_scale = std::max(max_abs(f_h), 1.0);
  r.flux_scale = std::max(max_norm(z.a), 1.0);

  r.primal = primal_energy(space, u, f_h, exponents, delta, policy);
  const DualValue d = dual_energy(z, metrics, f_h, exponents, delta, policy);
  r.dual_feasible = d.feasible;
  r.dual = d.value;
  r.div_residual = d.divergence_residual;
  if (d.feasible) {
    r.gap = std::abs(r.primal - r.dual);
    r.relative_gap = r.gap / (std::abs(r.primal) + std::abs(r.dual) + 1.0);
  }

  std::vector<double> proj(nt), fy(nt);
  kernels::for_each_index(nt, policy, [&](int t) {
    const PhiKit kit(exponents.p_h[t], delta);
    proj[t] = (z.a[t] - kit.A(grads[t])).norm();
    const double pairing = z.a[t].dot(grads[t]);
    const double sum = kit.phi_conjugate(z.a[t].norm()) + kit.phi(grads[t].norm());
    fy[t] = std::abs(pairing - sum) / std::max(std::abs(pairing), 1.0);
  });
  for (int t = 0; t < nt; ++t) {
    r.projection_residual = std::max(r.projection_residual, proj[t]);
    r.fenchel_young_residual = std::max(r.fenchel_young_residual, fy[t]);
  }

  for (int s = 0; s < mesh.num_sides(); ++s) {
    if (mesh.is_boundary_side(s)) continue;
    const double jump = std::abs(normal_jump(mesh, metrics, z, s));
    r.normal_jump_residual = std::max(r.normal_jump_residual, jump);
    r.side_flux_residual = std::max(r.side_flux_residual, metrics.h_S[s] * jump);
  }
  return r;
}

RT0Field random_divergence_free(const Triangulation& mesh, const MeshMetrics& metrics,
                                std::uint64_t seed, double amplitude) {
  std::vector<char> on_boundary(mesh.num_vertices(), 0);
  for (int s = 0; s < mesh.num_sides(); ++s) {
    if (!mesh.is_boundary_side(s)) continue;
    on_boundary[mesh.sides()[s][0]] = 1;
    on_boundary[mesh.sides()[s][1]] = 1;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  P1Field psi{std::vector<double>(mesh.num_vertices(), 0.0)};
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const double value = dist(rng);
    if (!on_boundary[v]) psi.dofs[v] = value;
  }
  return discrete_curl(mesh, metrics, psi);
}

ElementwiseRT0 add(const ElementwiseRT0& y, const ElementwiseRT0& w) {
  ElementwiseRT0 out = y;
  for (std::size_t t = 0; t < out.a.size(); ++t) {
    out.a[t] += w.a[t];
    out.b[t] += w.b[t];
  }
  return out;
}

}  // namespace crvex
