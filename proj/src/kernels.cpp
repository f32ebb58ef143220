#include "crvex/kernels.hpp"

#include "crvex/nfunction.hpp"

namespace crvex::kernels {

namespace {

Vec2 gradient_on(const DofMap& map, std::span<const double> u, int t) {
  const auto& d = map.element_dofs[t];
  const auto& g = map.basis_gradients[t];
  return u[d[0]] * g[0] + u[d[1]] * g[1] + u[d[2]] * g[2];
}

std::array<double, 3> local_residual(const DofMap& map, std::span<const double> p_h,
                                     double delta, std::span<const double> u, int t) {
  const Vec2 flux = PhiKit(p_h[t], delta).A(gradient_on(map, u, t));
  const auto& g = map.basis_gradients[t];
  const double area = map.area[t];
  return {area * flux.dot(g[0]), area * flux.dot(g[1]), area * flux.dot(g[2])};
}

std::array<double, 9> local_jacobian(const DofMap& map, std::span<const double> p_h,
                                     double delta, std::span<const double> u, int t) {
  const Mat2 D = PhiKit(p_h[t], delta).DA(gradient_on(map, u, t));
  const auto& g = map.basis_gradients[t];
  const double area = map.area[t];
  std::array<double, 9> K{};
  for (int i = 0; i < 3; ++i) {
    const Vec2 Dg = D * g[i];
    for (int j = i; j < 3; ++j) {
      const double v = area * g[j].dot(Dg);
      K[3 * i + j] = v;
      K[3 * j + i] = v;
    }
  }
  return K;
}

// Serial reference: scatter directly in element order.
std::vector<double> residual_serial(const DofMap& map, std::span<const double> p_h,
                                    double delta, std::span<const double> u,
                                    std::span<const double> load) {
  std::vector<double> R(map.num_dofs, 0.0);
  for (int t = 0; t < map.num_elements(); ++t) {
    const auto r = local_residual(map, p_h, delta, u, t);
    for (int i = 0; i < 3; ++i) R[map.element_dofs[t][i]] += r[i];
  }
  for (int d = 0; d < map.num_dofs; ++d) R[d] -= load[d];
  return R;
}

std::vector<double> residual_openmp(const DofMap& map, std::span<const double> p_h,
                                    double delta, std::span<const double> u,
                                    std::span<const double> load) {
  const int nt = map.num_elements();
  std::vector<std::array<double, 3>> local(nt);
  for_each_index(nt, ExecPolicy::OpenMP,
                 [&](int t) { local[t] = local_residual(map, p_h, delta, u, t); });
  std::vector<double> R(map.num_dofs, 0.0);
  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < 3; ++i) R[map.element_dofs[t][i]] += local[t][i];
  }
  for (int d = 0; d < map.num_dofs; ++d) R[d] -= load[d];
  return R;
}

}  // namespace

std::vector<Vec2> element_gradients(const DofMap& map, std::span<const double> u,
                                    ExecPolicy policy) {
  std::vector<Vec2> g(map.num_elements());
  for_each_index(map.num_elements(), policy, [&](int t) { g[t] = gradient_on(map, u, t); });
  return g;
}

std::vector<double> residual(const DofMap& map, std::span<const double> p_h, double delta,
                             std::span<const double> u, std::span<const double> load,
                             ExecPolicy policy) {
  return policy == ExecPolicy::Serial ? residual_serial(map, p_h, delta, u, load)
                                      : residual_openmp(map, p_h, delta, u, load);
}

std::vector<std::array<double, 9>> element_jacobians(const DofMap& map,
                                                     std::span<const double> p_h, double delta,
                                                     std::span<const double> u,
                                                     ExecPolicy policy) {
  std::vector<std::array<double, 9>> K(map.num_elements());
  for_each_index(map.num_elements(), policy,
                 [&](int t) { K[t] = local_jacobian(map, p_h, delta, u, t); });
  return K;
}

double modular(const DofMap& map, std::span<const double> p_h, double delta,
               std::span<const double> u, ExecPolicy policy) {
  return ordered_sum(map.num_elements(), policy, [&](int t) {
    return map.area[t] * PhiKit(p_h[t], delta).phi(gradient_on(map, u, t).norm());
  });
}

}  // namespace crvex::kernels
