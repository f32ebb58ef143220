#include "crvex/kernels.hpp"
#include "crvex/manufactured.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

using namespace crvex;

namespace {

struct Fixture {
  Triangulation mesh;
  MeshMetrics metrics;
  std::unique_ptr<CRSpace> space;
  ElementExponents exponents;
  std::vector<double> u;
  std::vector<double> load;

  explicit Fixture(int level) : mesh(build_criss_cross(2, Rectangle{})) {
    for (int k = 0; k < level; ++k) mesh = red_refine(mesh);
    metrics = compute_metrics(mesh);
    space = std::make_unique<CRSpace>(mesh, metrics);
    ExponentField p;
    exponents = discretize_exponent(p, metrics);
    ManufacturedCase c;
    u = space->interpolate([&](const Vec2& x) { return eval_exact(c, x).u; }, true).dofs;
    load.assign(u.size(), 1e-3);
  }
};

const Fixture& fixture(int level) {
  static std::map<int, std::unique_ptr<Fixture>> cache;
  auto& slot = cache[level];
  if (!slot) slot = std::make_unique<Fixture>(level);
  return *slot;
}

ExecPolicy policy_of(const benchmark::State& state) {
  return state.range(1) == 0 ? ExecPolicy::Serial : ExecPolicy::OpenMP;
}

void BM_Residual(benchmark::State& state) {
  const auto& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = kernels::residual(f.space->dof_map(), f.exponents.p_h, 1e-4, f.u, f.load,
                               policy_of(state));
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * f.mesh.num_elements());
}

void BM_ElementJacobians(benchmark::State& state) {
  const auto& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto k = kernels::element_jacobians(f.space->dof_map(), f.exponents.p_h, 1e-4, f.u,
                                        policy_of(state));
    benchmark::DoNotOptimize(k.data());
  }
  state.SetItemsProcessed(state.iterations() * f.mesh.num_elements());
}

void BM_Modular(benchmark::State& state) {
  const auto& f = fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernels::modular(f.space->dof_map(), f.exponents.p_h, 1e-4, f.u, policy_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * f.mesh.num_elements());
}

// Second argument: 0 serial, 1 OpenMP.
BENCHMARK(BM_Residual)->ArgsProduct({{4, 6}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ElementJacobians)->ArgsProduct({{4, 6}, {0, 1}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Modular)->ArgsProduct({{4, 6}, {0, 1}})->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
