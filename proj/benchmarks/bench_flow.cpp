#include <benchmark/benchmark.h>

#include <cmath>

#include "ahe/heat_flow.hpp"

using namespace ahe;

namespace {

void BM_FlowStep(benchmark::State& state) {
  int N = static_cast<int>(state.range(0));
  AffineManifold m = AffineManifold::torus(1, N);
  MetricField g = MetricField::constant(m, MatrixXd::Identity(1, 1));
  DegreeFunctional d = DegreeFunctional::numeric(m, g);
  MatrixXcd gen = MatrixXcd::Zero(2, 2);
  gen.diagonal() << std::exp(1.0), std::exp(2.0);
  Monodromy v(&m, Field::Complex, {gen});
  HermitianMetricField h0 = synthesize_admissible_metric(v);
  FlowParams p;
  p.max_steps = 8;
  for (auto _ : state) {
    FlowReport rep = flow_run(v, d, g, h0, p);
    benchmark::DoNotOptimize(rep.final_residual);
  }
  state.SetItemsProcessed(state.iterations() * p.max_steps);
}
BENCHMARK(BM_FlowStep)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ChernCurvature(benchmark::State& state) {
  int N = static_cast<int>(state.range(0));
  AffineManifold m = AffineManifold::torus(2, N);
  MatrixXcd u = MatrixXcd::Zero(2, 2);
  u.diagonal() << std::polar(1.0, 0.4), std::polar(1.0, 1.3);
  Monodromy v(&m, Field::Complex, {u, MatrixXcd::Identity(2, 2)});
  HermitianMetricField h(v, [](const VectorXd& x) {
    MatrixXcd hm = MatrixXcd::Identity(2, 2);
    hm(0, 0) = std::exp(0.2 * std::sin(2 * M_PI * x(0)));
    return hm;
  });
  for (auto _ : state) {
    PQForm r = chern_curvature(h);
    benchmark::DoNotOptimize(r.sup_abs());
  }
}
BENCHMARK(BM_ChernCurvature)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
