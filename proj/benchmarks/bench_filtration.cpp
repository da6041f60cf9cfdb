#include <benchmark/benchmark.h>

#include "ahe/filtration.hpp"
#include "ahe/oracle.hpp"
#include "../tests/support.hpp"

using namespace ahe;

namespace {

void BM_HNFiltration(benchmark::State& state) {
  auto sc = testing::random_commuting_bundle(static_cast<std::uint64_t>(state.range(0)), 4);
  DegreeFunctional d = DegreeFunctional::abstract_weights(sc.weights);
  for (auto _ : state) {
    Filtration f = hn_filtration(sc.bundle, d);
    benchmark::DoNotOptimize(f.length());
  }
}
BENCHMARK(BM_HNFiltration)->Arg(1)->Arg(17)->Arg(42);

void BM_OracleAnalyze(benchmark::State& state) {
  auto sc = testing::random_commuting_bundle(static_cast<std::uint64_t>(state.range(0)), 4);
  DegreeFunctional d = DegreeFunctional::abstract_weights(sc.weights);
  for (auto _ : state) {
    OracleReport rep = oracle_analyze(sc.bundle, d);
    benchmark::DoNotOptimize(rep.delta0);
  }
}
BENCHMARK(BM_OracleAnalyze)->Arg(1)->Arg(17)->Arg(42);

void BM_InvariantSubspaces(benchmark::State& state) {
  // non-commuting pair: exercises the randomized search
  MatrixXcd j(2, 2), dsp(2, 2);
  j << 1, 1, 0, 1;
  dsp << std::exp(-1.0), 0, 0, std::exp(1.0);
  Monodromy v(2, {}, Field::Complex, {j, dsp});
  for (auto _ : state) {
    SubspaceSearch s = all_invariant_subspaces(v, static_cast<std::uint64_t>(state.range(0)));
    benchmark::DoNotOptimize(s.spaces.size());
  }
}
BENCHMARK(BM_InvariantSubspaces)->Arg(7);

}  // namespace
