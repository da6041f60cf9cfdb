#include <benchmark/benchmark.h>

#include <cmath>

#include "ahe/forms.hpp"

using namespace ahe;

namespace {

PQForm wave(const AffineManifold& m) {
  return PQForm::function(m, [](const VectorXd& x) {
    double v = 1.0;
    for (int i = 0; i < x.size(); ++i) v *= std::sin(2 * M_PI * x(i));
    return cplx(v, 0.0);
  });
}

void BM_DolbeaultD(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  int N = static_cast<int>(state.range(1));
  AffineManifold m = AffineManifold::torus(n, N);
  PQForm f = wave(m);
  for (auto _ : state) {
    PQForm df = dolbeault_d(f);
    benchmark::DoNotOptimize(df.sup_abs());
  }
  state.SetItemsProcessed(state.iterations() * m.npoints());
}
BENCHMARK(BM_DolbeaultD)->Args({2, 64})->Args({3, 32})->Args({3, 64})->Unit(benchmark::kMillisecond);

void BM_WedgeOmega(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  int N = static_cast<int>(state.range(1));
  AffineManifold m = AffineManifold::torus(n, N);
  MetricField g = MetricField::constant(m, MatrixXd::Identity(n, n));
  PQForm w = omega_form(m, g);
  for (auto _ : state) {
    PQForm w2 = wedge(w, w);
    benchmark::DoNotOptimize(w2.sup_abs());
  }
  state.SetItemsProcessed(state.iterations() * m.npoints());
}
BENCHMARK(BM_WedgeOmega)->Args({2, 64})->Args({3, 32})->Unit(benchmark::kMillisecond);

void BM_GauduchonCheck(benchmark::State& state) {
  int N = static_cast<int>(state.range(0));
  AffineManifold m = AffineManifold::torus(2, N);
  std::vector<std::vector<Expr>> e(2);
  e[0] = {Expr::parse("1 + 0.2*cos(2*pi*x1)", 2), Expr::parse("0.1", 2)};
  e[1] = {Expr::parse("0.1", 2), Expr::parse("1 + 0.3*sin(2*pi*x2)", 2)};
  MetricField g = MetricField::from_expressions(m, e);
  for (auto _ : state) benchmark::DoNotOptimize(check_gauduchon(m, g));
}
BENCHMARK(BM_GauduchonCheck)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
