#pragma once

#include "ahe/filtration.hpp"

namespace ahe {

// Independent brute-force analysis for commuting monodromy of rank <= 4:
// exhaustive invariant-subspace enumeration via eigenspace sums, direct
// slope maximization, and recursive filtration construction. Kept separate
// from the main classification path so the two can be diffed.
struct OracleReport {
  std::vector<MatrixXcd> subspaces;  // proper invariant subspaces (deduped)
  MatrixXcd max_destabilizing;
  double delta0 = 0.0;
  std::vector<int> hn_ranks;
  std::vector<double> hn_slopes;
  std::vector<MatrixXcd> hn_bases;
  MatrixXcd socle_basis;  // empty when unstable
  StabilityVerdict verdict = StabilityVerdict::Stable;
};

OracleReport oracle_analyze(const Monodromy& v, const DegreeFunctional& d);

}  // namespace ahe
