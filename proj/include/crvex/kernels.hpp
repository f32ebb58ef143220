#pragma once

// Element-loop kernels. Each kernel has a plain serial implementation, kept as
// the reference, and an OpenMP implementation that computes per-element
// contributions into a buffer and reduces them in element order. The two
// produce bitwise identical results.

#include "crvex/fem.hpp"
#include "crvex/types.hpp"

#include <array>
#include <exception>
#include <span>
#include <vector>

#include <omp.h>

namespace crvex::kernels {

/// Runs body(i) for i in [0, n). Exceptions thrown inside the parallel region
/// are captured and the first one is rethrown.
template <class Body>
void for_each_index(int n, ExecPolicy policy, Body&& body) {
  if (policy == ExecPolicy::Serial) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(crvex_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

/// sum_i contrib(i) accumulated in index order.
template <class Contrib>
double ordered_sum(int n, ExecPolicy policy, Contrib&& contrib) {
  if (policy == ExecPolicy::Serial) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += contrib(i);
    return sum;
  }
  std::vector<double> buffer(n);
  for_each_index(n, policy, [&](int i) { buffer[i] = contrib(i); });
  double sum = 0.0;
  for (double v : buffer) sum += v;
  return sum;
}

/// Constant gradient per element of a field on `map`.
std::vector<Vec2> element_gradients(const DofMap& map, std::span<const double> u,
                                    ExecPolicy policy);

/// R_d = sum_T |T| A(p_T, delta, grad u|_T) . grad phi_d|_T - load_d over all DOFs.
std::vector<double> residual(const DofMap& map, std::span<const double> p_h, double delta,
                             std::span<const double> u, std::span<const double> load,
                             ExecPolicy policy);

/// Symmetric local Jacobians |T| g_i . DA(p_T, delta, grad u|_T) g_j (row-major 3x3).
std::vector<std::array<double, 9>> element_jacobians(const DofMap& map,
                                                     std::span<const double> p_h, double delta,
                                                     std::span<const double> u,
                                                     ExecPolicy policy);

/// sum_T |T| phi(p_T, delta, |grad u|_T|).
double modular(const DofMap& map, std::span<const double> p_h, double delta,
               std::span<const double> u, ExecPolicy policy);

}  // namespace crvex::kernels
