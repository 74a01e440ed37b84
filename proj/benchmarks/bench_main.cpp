#include <benchmark/benchmark.h>

#include <vector>

#include "bsq/allocator.hpp"
#include "bsq/config.hpp"
#include "bsq/integrator.hpp"
#include "bsq/operators.hpp"

namespace {

bsq::PreparedRun small_run(int n) {
  bsq::ExperimentConfig c;
  c.grid_n = n;
  c.a = 0.05;
  c.step = bsq::StepConfig{2e-3, bsq::Scheme::etd_euler_maruyama, 2e-3, 1};
  c.step.weight_rate = c.a;
  c.transport.kind = bsq::TransportKind::random;
  c.transport.seed = 3;
  c.transport.nb2_target = 0.01;
  c.sigma = {bsq::SigmaKind::diagonal_linear, 0.01, 0.0, 8};
  c.delta0 = 0.1;
  return bsq::prepare(c);
}

void BM_RoundTrip(benchmark::State& state) {
  const auto run = small_run(static_cast<int>(state.range(0)));
  const auto& f = run.ensemble.u0.rho();
  for (auto _ : state) {
    auto back = bsq::SpectralField::from_physical(f.grid(), f.to_physical());
    benchmark::DoNotOptimize(back);
  }
}
BENCHMARK(BM_RoundTrip)->Arg(16)->Arg(32)->Arg(64);

void BM_Advect(benchmark::State& state) {
  const auto run = small_run(static_cast<int>(state.range(0)));
  const auto& u0 = run.ensemble.u0;
  for (auto _ : state) {
    auto w = bsq::advect(u0.velocity(), u0.velocity());
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(BM_Advect)->Arg(16)->Arg(32);

void BM_Step(benchmark::State& state) {
  const auto run = small_run(static_cast<int>(state.range(0)));
  const auto& e = run.ensemble;
  const std::vector<double> dw(static_cast<std::size_t>(e.noise.dim_h()), 1e-2);
  for (auto _ : state) {
    auto next = bsq::step(e.u0, e.step, e.noise, e.system, dw);
    benchmark::DoNotOptimize(next);
  }
}
BENCHMARK(BM_Step)->Arg(16)->Arg(32);

}  // namespace

int main(int argc, char** argv) {
  bsq::tune_allocator();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
