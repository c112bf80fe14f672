// OpenMP slab kernel against its serial form and the plain reference loop, on
// the fused mc integrand of the certified scenario.

#include <benchmark/benchmark.h>

#include <mcurv/manifolds.hpp>
#include <mcurv/perturbation.hpp>

using namespace mcurv;

namespace {

struct Fixture {
  ZonalFlow z = make_zonal_flow(make_ellipsoid_3d(2.0), bump_profile(0.35, 0.95, 0.85, 1.0), {1, 0, true});
  VectorField Y = build_commuting_bump(z, BumpProfile{}).Y;
  VectorField Z = z.Z();
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

QuadratureRule rule_for(const benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  return QuadratureRule::for_chart(*fixture().z.chart, {n, n, 3 * n});
}

void run_kernel(benchmark::State& state, Execution exec, bool reference) {
  const Fixture& f = fixture();
  const QuadratureRule rule = rule_for(state);
  const NodeKernel kernel = [&](const Node& node, double* out) { out[0] = direct_integrand(f.Z, f.Y, node); };
  const std::vector<Reduction> outputs = {Reduction::Sum};
  for (auto _ : state) {
    const auto v = reference ? integrate_many_reference(*f.z.chart, rule, outputs, kernel)
                             : integrate_many(*f.z.chart, rule, outputs, kernel, exec);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(rule.size()));
}

void BM_DirectParallel(benchmark::State& state) { run_kernel(state, Execution::Parallel, false); }
void BM_DirectSerial(benchmark::State& state) { run_kernel(state, Execution::Serial, false); }
void BM_DirectReference(benchmark::State& state) { run_kernel(state, Execution::Serial, true); }

void BM_EvaluateFormulas(benchmark::State& state) {
  const Fixture& f = fixture();
  const QuadratureRule rule = rule_for(state);
  const Execution exec = state.range(1) ? Execution::Parallel : Execution::Serial;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_formulas(f.Z, f.Y, &f.z, rule, {}, exec).direct);
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(rule.size()));
}

}  // namespace

BENCHMARK(BM_DirectParallel)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DirectSerial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DirectReference)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EvaluateFormulas)->Args({16, 1})->Args({16, 0})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
