#pragma once

#include "crvex/duality.hpp"
#include "crvex/fem.hpp"
#include "crvex/manufactured.hpp"
#include "crvex/solver.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace crvex {

using VectorField = std::function<Vec2(const Vec2&)>;

/// sum_T sum_q w_q |T| |F(p_T, delta, grad u_h|_T) - F(p_T, delta, grad u(x_q))|^2
double error_F(const CRSpace& space, const CRField& u, const VectorField& exact_grad,
               const ElementExponents& exponents, double delta,
               const SimplexQuadrature& quad = SimplexQuadrature::high_order(),
               ExecPolicy policy = ExecPolicy::Serial);
double error_F(const P1Space& space, const P1Field& u, const VectorField& exact_grad,
               const ElementExponents& exponents, double delta,
               const SimplexQuadrature& quad = SimplexQuadrature::high_order(),
               ExecPolicy policy = ExecPolicy::Serial);
/// The same with grad u from the manufactured solution.
double error_F(const CRSpace& space, const CRField& u, const ManufacturedCase& c,
               const ElementExponents& exponents,
               const SimplexQuadrature& quad = SimplexQuadrature::high_order(),
               ExecPolicy policy = ExecPolicy::Serial);
double error_F(const P1Space& space, const P1Field& u, const ManufacturedCase& c,
               const ElementExponents& exponents,
               const SimplexQuadrature& quad = SimplexQuadrature::high_order(),
               ExecPolicy policy = ExecPolicy::Serial);

/// sum_T sum_q w_q |T| |F*(p_T, delta, z_h(x_q)) - F*(p_T, delta, z(x_q))|^2
double error_Fstar(const Triangulation& mesh, const MeshMetrics& metrics,
                   const ElementwiseRT0& z, const VectorField& exact_flux,
                   const ElementExponents& exponents, double delta,
                   const SimplexQuadrature& quad = SimplexQuadrature::high_order(),
                   ExecPolicy policy = ExecPolicy::Serial);
double error_Fstar(const Triangulation& mesh, const MeshMetrics& metrics,
                   const ElementwiseRT0& z, const ManufacturedCase& c,
                   const ElementExponents& exponents,
                   const SimplexQuadrature& quad = SimplexQuadrature::high_order(),
                   ExecPolicy policy = ExecPolicy::Serial);

/// f_h = Pi_h f for the manufactured load, by element quadrature.
ElementScalars project_load(const Triangulation& mesh, const ManufacturedCase& c,
                            ExecPolicy policy = ExecPolicy::Serial,
                            const SimplexQuadrature& quad = SimplexQuadrature::high_order());

/// EOC_k = log(e_k / e_{k-1}) / log(h_k / h_{k-1}); entry 0 and entries
/// involving a non-positive error are undefined (nullopt).
std::vector<std::optional<double>> eoc(const std::vector<double>& errors,
                                       const std::vector<double>& hs);

struct StudyConfig {
  std::vector<double> p_min{1.5};
  std::vector<double> alpha{1.0};
  std::vector<double> eps{1.0};
  double delta = 1e-4;
  double beta = 1.01;
  int levels = 6;
  int n0 = 2;
  SolverConfig solver;
  AuditTolerances tolerances;
  std::string format = "csv";
  std::string out;
  std::uint64_t seed = 20240101;
  int threads = 0;  ///< 0: OpenMP default
  ExecPolicy policy = ExecPolicy::OpenMP;

  /// Throws std::invalid_argument if any value is outside its domain.
  void validate() const;
};

struct LevelRecord {
  int level = 0;
  double h = 0.0;      ///< max element diameter (halves exactly under red refinement)
  double h_avg = 0.0;  ///< (|Omega| / #vertices)^(1/2)
  int elements = 0;
  int dofs = 0;
  double e_F = 0.0;
  double e_Fstar = 0.0;
  /// Rates of the norms sqrt(e_F), sqrt(e_F*) (the scale of the published tables).
  std::optional<double> eoc_F;
  std::optional<double> eoc_Fstar;
  /// Rates of the squared quantities e_F, e_F* themselves.
  std::optional<double> eoc_F_squared;
  std::optional<double> eoc_Fstar_squared;
  SolveReport solve;
  DualityAudit audit;
  bool audit_passed = false;
};

struct ConvergenceReport {
  double p_min = 0.0;
  double alpha = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  std::vector<LevelRecord> levels;
  std::string failure;  ///< empty if every level converged

  bool converged() const { return failure.empty(); }
  bool ok() const;
};

/// One (p_min, alpha, eps) triple through all levels.
ConvergenceReport run_case(const StudyConfig& config, double p_min, double alpha, double eps,
                           ExecPolicy policy);

/// Every triple of the configured grid, in (eps, alpha, p_min) order. Triples
/// run in parallel when the policy is OpenMP; the result is independent of it.
std::vector<ConvergenceReport> run_study(const StudyConfig& config);

}  // namespace crvex
