#pragma once

#include "crvex/fem.hpp"
#include "crvex/nfunction.hpp"
#include "crvex/types.hpp"

#include <cstdint>

namespace crvex {

/// Discrete flux z|_T(x) = A_h(grad u|_T) - (f_h|_T / 2)(x - x_T).
///
/// Returned in element-wise form so that div z = -f_h and Pi_h z = A_h(grad u)
/// hold exactly for any CR field u. Its normal traces agree across interior
/// sides only at the discrete solution; average_traces() gives RT0 DOFs.
ElementwiseRT0 marini_flux(const CRSpace& space, const CRField& u, const ElementScalars& f_h,
                           const ElementExponents& exponents, double delta,
                           ExecPolicy policy = ExecPolicy::Serial);

/// sum_T |T| [phi(p_T, delta, |grad u|_T|) - f_h|_T <u>_T]
double primal_energy(const CRSpace& space, const CRField& u, const ElementScalars& f_h,
                     const ElementExponents& exponents, double delta,
                     ExecPolicy policy = ExecPolicy::Serial);

/// Dual energy value; the indicator of the divergence constraint yields an
/// explicit minus-infinity marker instead of a floating-point infinity.
struct DualValue {
  bool feasible = false;
  double value = 0.0;                 ///< meaningful only if feasible
  double divergence_residual = 0.0;   ///< max_T |div z + f_h|
  double feasibility_tolerance = 0.0;

  bool is_minus_infinity() const { return !feasible; }
};

/// Divergence feasibility tolerance 1e-8 * max(||f_h||_inf, 1).
double feasibility_tolerance(const ElementScalars& f_h);

/// -sum_T |T| phi*(p_T, delta, |Pi_h z|_T|) if max_T |div z + f_h| is within
/// the feasibility tolerance, the minus-infinity marker otherwise.
DualValue dual_energy(const ElementwiseRT0& z, const MeshMetrics& metrics,
                      const ElementScalars& f_h, const ElementExponents& exponents,
                      double delta, ExecPolicy policy = ExecPolicy::Serial);
DualValue dual_energy(const RT0Field& z, const Triangulation& mesh, const MeshMetrics& metrics,
                      const ElementScalars& f_h, const ElementExponents& exponents,
                      double delta, ExecPolicy policy = ExecPolicy::Serial);

struct AuditTolerances {
  double relative_gap = 1e-8;
  double divergence = 1e-13;      ///< relative to max(||f_h||_inf, 1)
  double projection = 1e-13;      ///< relative to max(||A_h(grad u)||_inf, 1)
  /// Side flux mismatch |S| |[z.n]_S|, relative to max(||Pi_h z||_inf, 1). At a
  /// CR solution this mismatch equals the residual entry of side S.
  double normal_jump = 1e-8;
  double fenchel_young = 1e-8;    ///< per element, relative to max(|Pi_h z . grad u|, 1)
};

struct DualityAudit {
  double primal = 0.0;
  double dual = 0.0;
  bool dual_feasible = false;
  double gap = 0.0;            ///< |I - D|
  double relative_gap = 0.0;   ///< |I - D| / (|I| + |D| + 1)
  double div_residual = 0.0;
  double projection_residual = 0.0;
  double normal_jump_residual = 0.0;   ///< max_S |[z.n]_S| over interior sides
  double side_flux_residual = 0.0;     ///< max_S |S| |[z.n]_S| over interior sides
  double fenchel_young_residual = 0.0;  ///< max_T relative residual
  double load_scale = 1.0;
  double flux_scale = 1.0;

  bool passed(const AuditTolerances& tol = {}) const;
};

DualityAudit audit(const CRSpace& space, const CRField& u, const ElementwiseRT0& z,
                   const ElementScalars& f_h, const ElementExponents& exponents, double delta,
                   ExecPolicy policy = ExecPolicy::Serial);

/// Discrete curl of a P1 potential with seeded uniform values in [-amplitude,
/// amplitude] at vertices off the boundary and zero on it. Divergence free with
/// zero normal trace on the whole boundary.
RT0Field random_divergence_free(const Triangulation& mesh, const MeshMetrics& metrics,
                                std::uint64_t seed, double amplitude = 1.0);

/// Element-wise sum y + w.
ElementwiseRT0 add(const ElementwiseRT0& y, const ElementwiseRT0& w);

}  // namespace crvex
