#include <benchmark/benchmark.h>

#include "pv5/ladder.hpp"
#include "pv5/ode.hpp"
#include "pv5/orthopoly.hpp"
#include "pv5/quadrature.hpp"

namespace {

using namespace pv5;

ModelParams gapped(int n_max = 12) {
  return validate("1", "0.25", "0.5", 256, n_max);
}

void BM_WeightedRule(benchmark::State& state) {
  PrecisionScope scope(256);
  const ModelParams p = gapped();
  const PrecisionContext ctx = make_context();
  for (auto _ : state) {
    WeightedRule rule(p, ctx);
    benchmark::DoNotOptimize(rule.size());
  }
}
BENCHMARK(BM_WeightedRule)->Unit(benchmark::kMillisecond);

void BM_Stieltjes(benchmark::State& state) {
  PrecisionScope scope(256);
  const auto rule = std::make_shared<const WeightedRule>(
      gapped(static_cast<int>(state.range(0))), make_context());
  for (auto _ : state) {
    OrthoState s = build_ortho(rule);
    benchmark::DoNotOptimize(s.beta.back());
  }
}
BENCHMARK(BM_Stieltjes)->Arg(4)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_LadderFunctions(benchmark::State& state) {
  PrecisionScope scope(256);
  const OrthoState s = build_ortho(gapped(8), make_context());
  const Real z("0.8");
  for (auto _ : state) {
    LadderFunctions f = ladder_functions(s, z);
    benchmark::DoNotOptimize(f.A.back());
  }
}
BENCHMARK(BM_LadderFunctions)->Unit(benchmark::kMillisecond);

void BM_DormandPrince(benchmark::State& state) {
  PrecisionScope scope(static_cast<int>(state.range(0)));
  const Real tol("1e-12");
  for (auto _ : state) {
    Trajectory tr = integrate_system(
        [](const Real&, const State2& y) { return State2{y[1], -y[0]}; },
        Real(0), Real(1), State2{Real(1), Real(0)}, tol);
    benchmark::DoNotOptimize(tr.values.back()[0]);
  }
}
BENCHMARK(BM_DormandPrince)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
