#pragma once

#include "ahe/degree.hpp"
#include "ahe/invariant.hpp"

namespace ahe {

enum class StabilityVerdict { Unstable, SemistableNotPolystable, PolystableNotStable, Stable };

std::string to_string(StabilityVerdict v);

struct DestabilizingResult {
  MatrixXcd basis;  // the unique maximal subbundle of slope delta0
  double delta0 = 0.0;
  SearchStatus status = SearchStatus::Heuristic;
};

enum class FiltrationKind { HarderNarasimhan, Socle, JordanHolderLike };

struct FiltrationStep {
  MatrixXcd basis;  // F_i in ambient fiber coordinates, orthonormal
  int rank = 0;
  double quotient_slope = 0.0;  // slope of F_i / F_{i-1}
};

struct Filtration {
  FiltrationKind kind = FiltrationKind::HarderNarasimhan;
  std::vector<FiltrationStep> steps;  // F_1 ... F_l = V  (F_0 = 0 implicit)
  SearchStatus status = SearchStatus::Heuristic;
  int length() const { return static_cast<int>(steps.size()); }
};

struct Classification {
  StabilityVerdict verdict = StabilityVerdict::Stable;
  double slope = 0.0;
  double delta0 = 0.0;
  SearchStatus status = SearchStatus::Heuristic;
};

// The unique maximal flat subbundle of maximal slope (the whole bundle when
// semistable).
DestabilizingResult max_destabilizing(const Monodromy& v, const DegreeFunctional& d,
                                      std::uint64_t seed = 0x5eedu);

// Harder-Narasimhan filtration: strictly decreasing semistable quotients.
Filtration hn_filtration(const Monodromy& v, const DegreeFunctional& d, std::uint64_t seed = 0x5eedu);

// Maximal polystable subbundle of slope mu(V) inside a semistable bundle.
MatrixXcd socle(const Monodromy& v, const DegreeFunctional& d, std::uint64_t seed = 0x5eedu);

Filtration socle_filtration(const Monodromy& v, const DegreeFunctional& d, std::uint64_t seed = 0x5eedu);

Classification classify(const Monodromy& v, const DegreeFunctional& d, std::uint64_t seed = 0x5eedu);

}  // namespace ahe
