#include "ahe/filtration.hpp"

namespace ahe {

std::string to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::Unstable: return "Unstable";
    case StabilityVerdict::SemistableNotPolystable: return "SemistableNotPolystable";
    case StabilityVerdict::PolystableNotStable: return "PolystableNotStable";
    case StabilityVerdict::Stable: return "Stable";
  }
  return "unknown";
}

namespace {

double subspace_slope(const Monodromy& v, const DegreeFunctional& d, const MatrixXcd& basis) {
  if (static_cast<int>(basis.cols()) == v.rank()) return d.slope(v);
  return d.subbundle_slope(FlatSubbundle(v, basis));
}

struct CandidateSet {
  std::vector<MatrixXcd> bases;
  std::vector<double> slopes;
  SearchStatus status;
};

CandidateSet proper_candidates(const Monodromy& v, const DegreeFunctional& d, std::uint64_t seed) {
  CandidateSet c;
  SubspaceSearch s = all_invariant_subspaces(v, seed);
  c.status = s.status;
  for (auto& sub : s.spaces) {
    c.slopes.push_back(subspace_slope(v, d, sub.basis));
    c.bases.push_back(std::move(sub.basis));
  }
  return c;
}

}  // namespace

DestabilizingResult max_destabilizing(const Monodromy& v, const DegreeFunctional& d,
                                      std::uint64_t seed) {
  if (v.rank() > 8) fail("RankOutOfRange", "max_destabilizing is limited to rank <= 8");
  DestabilizingResult out;

  auto atoms = spectral_atoms(v);
  if (atoms) {
    out.status = SearchStatus::CompleteCommuting;
    // Slope density per atom; the maximal destabilizer is the sum of the
    // full generalized eigenspaces of maximal density.
    double cmax = -std::numeric_limits<double>::infinity();
    std::vector<double> dens(atoms->size());
    for (std::size_t i = 0; i < atoms->size(); ++i) {
      dens[i] = subspace_slope(v, d, (*atoms)[i].basis);
      cmax = std::max(cmax, dens[i]);
    }
    double tie = slope_tie_tol(cmax);
    MatrixXcd join(v.rank(), 0);
    for (std::size_t i = 0; i < atoms->size(); ++i)
      if (dens[i] >= cmax - tie) join = join_spans(join, (*atoms)[i].basis);
    out.basis = join;
    out.delta0 = cmax;
    return out;
  }

  CandidateSet cands = proper_candidates(v, d, seed);
  out.status = cands.status;
  double mu = d.slope(v);
  double delta0 = mu;
  for (double s : cands.slopes) delta0 = std::max(delta0, s);
  double tie = slope_tie_tol(delta0);

  if (delta0 <= mu + tie) {  // the whole bundle is already maximal
    out.basis = MatrixXcd::Identity(v.rank(), v.rank());
    out.delta0 = std::max(delta0, mu);
    return out;
  }
  MatrixXcd join(v.rank(), 0);
  for (std::size_t i = 0; i < cands.bases.size(); ++i)
    if (cands.slopes[i] >= delta0 - tie) join = join_spans(join, cands.bases[i]);
  // The join of maximal-slope subbundles keeps the maximal slope; re-check
  // and fall back to the best single candidate if the heuristic search fed
  // us an inconsistent set.
  double sj = subspace_slope(v, d, join);
  if (sj < delta0 - 10 * tie) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < cands.bases.size(); ++i)
      if (cands.slopes[i] > cands.slopes[best]) best = i;
    join = cands.bases[best];
    out.status = SearchStatus::Heuristic;
  }
  out.basis = join;
  out.delta0 = delta0;
  return out;
}

Filtration hn_filtration(const Monodromy& v, const DegreeFunctional& d, std::uint64_t seed) {
  Filtration f;
  f.kind = FiltrationKind::HarderNarasimhan;
  f.status = SearchStatus::CompleteCommuting;

  Monodromy cur = v;
  MatrixXcd lift = MatrixXcd::Identity(v.rank(), v.rank());  // cur coords -> V coords
  MatrixXcd accumulated(v.rank(), 0);
  double prev_slope = std::numeric_limits<double>::infinity();

  for (int guard = 0; guard <= v.rank(); ++guard) {
    DestabilizingResult md = max_destabilizing(cur, d, seed);
    if (md.status != SearchStatus::CompleteCommuting) f.status = md.status;

    // Certify the step: the graded piece must itself be semistable.
    if (static_cast<int>(md.basis.cols()) < cur.rank()) {
      Monodromy piece = FlatSubbundle(cur, md.basis).restricted();
      DestabilizingResult check = max_destabilizing(piece, d, seed);
      if (static_cast<int>(check.basis.cols()) != piece.rank())
        fail("FiltrationCertificate", "maximal destabilizing subbundle is not semistable");
    }

    MatrixXcd step_basis = orthonormalize(join_spans(accumulated, lift * md.basis));
    FiltrationStep step;
    step.basis = step_basis;
    step.rank = static_cast<int>(step_basis.cols());
    step.quotient_slope = md.delta0;
    if (!f.steps.empty() && md.delta0 >= prev_slope - slope_tie_tol(prev_slope))
      fail("FiltrationCertificate", "quotient slopes are not strictly decreasing");
    prev_slope = md.delta0;
    f.steps.push_back(step);

    if (static_cast<int>(md.basis.cols()) == cur.rank()) break;  // reached V
    FlatSubbundle s(cur, md.basis);
    MatrixXcd qc = orthogonal_complement(s.basis(), cur.rank());
    cur = quotient(cur, s);
    // lift is the isometric embedding of quotient coordinates into the
    // original fiber; composing with qc must keep the coordinates aligned.
    lift = lift * qc;
    accumulated = step_basis;
  }
  if (f.steps.empty() || f.steps.back().rank != v.rank())
    fail("FiltrationCertificate", "filtration did not terminate at the full bundle");
  return f;
}

namespace {

// Stability over the enumerated candidates: no proper invariant subspace of
// slope >= mu (up to the tie tolerance).
bool stable_over(const CandidateSet& cands, double mu) {
  double tie = slope_tie_tol(mu);
  for (double s : cands.slopes)
    if (s >= mu - tie) return false;
  return true;
}

}  // namespace

Classification classify(const Monodromy& v, const DegreeFunctional& d, std::uint64_t seed) {
  if (v.rank() > 8) fail("RankOutOfRange", "classification is limited to rank <= 8");
  Classification out;
  out.slope = d.slope(v);

  CandidateSet cands = proper_candidates(v, d, seed);
  out.status = cands.status;
  out.delta0 = out.slope;
  for (double s : cands.slopes) out.delta0 = std::max(out.delta0, s);

  double tie = slope_tie_tol(out.delta0);
  if (out.delta0 > out.slope + tie) {
    out.verdict = StabilityVerdict::Unstable;
    return out;
  }
  if (stable_over(cands, out.slope)) {
    out.verdict = StabilityVerdict::Stable;
    return out;
  }

  // Semistable and not stable: polystable iff the bundle splits into stable
  // summands of equal slope.
  std::vector<MatrixXcd> summands = fitting_summands(v, seed);
  bool poly = summands.size() > 1;
  if (poly) {
    for (const auto& sb : summands) {
      Monodromy piece = FlatSubbundle(v, sb).restricted();
      double mu_piece = d.slope(piece);
      if (std::abs(mu_piece - out.slope) > slope_tie_tol(out.slope)) {
        poly = false;
        break;
      }
      CandidateSet piece_cands = proper_candidates(piece, d, seed);
      if (!stable_over(piece_cands, mu_piece)) {
        poly = false;
        break;
      }
    }
  }
  out.verdict = poly ? StabilityVerdict::PolystableNotStable : StabilityVerdict::SemistableNotPolystable;
  return out;
}

MatrixXcd socle(const Monodromy& v, const DegreeFunctional& d, std::uint64_t seed) {
  Classification cl = classify(v, d, seed);
  if (cl.verdict == StabilityVerdict::Unstable)
    fail("NotSemistable", "socle is defined for semistable bundles only");
  if (cl.verdict == StabilityVerdict::Stable || cl.verdict == StabilityVerdict::PolystableNotStable)
    return MatrixXcd::Identity(v.rank(), v.rank());

  auto atoms = spectral_atoms(v);
  if (atoms) {
    MatrixXcd join(v.rank(), 0);
    for (const auto& a : *atoms) join = join_spans(join, a.socle);
    return join;
  }

  // General path: join every polystable slope-mu subbundle. A subbundle is
  // polystable of slope mu when all its indecomposable summands are stable
  // with slope mu.
  double mu = cl.slope;
  double tie = slope_tie_tol(mu);
  SubspaceSearch search = all_invariant_subspaces(v, seed);
  MatrixXcd join(v.rank(), 0);
  for (const auto& sub : search.spaces) {
    double s = subspace_slope(v, d, sub.basis);
    if (std::abs(s - mu) > tie) continue;
    Monodromy piece = FlatSubbundle(v, sub.basis).restricted();
    bool poly = true;
    for (const auto& summand : fitting_summands(piece, seed)) {
      Monodromy leaf = FlatSubbundle(piece, summand).restricted();
      double mu_leaf = d.slope(leaf);
      if (std::abs(mu_leaf - mu) > tie) {
        poly = false;
        break;
      }
      CandidateSet leaf_cands = proper_candidates(leaf, d, seed);
      if (!stable_over(leaf_cands, mu_leaf)) {
        poly = false;
        break;
      }
    }
    if (poly) join = join_spans(join, sub.basis);
  }
  if (join.cols() == 0) fail("SocleEmpty", "no polystable subbundle of the ambient slope found");
  return join;
}

Filtration socle_filtration(const Monodromy& v, const DegreeFunctional& d, std::uint64_t seed) {
  Filtration f;
  f.kind = FiltrationKind::Socle;
  f.status = SearchStatus::CompleteCommuting;

  Monodromy cur = v;
  MatrixXcd lift = MatrixXcd::Identity(v.rank(), v.rank());
  MatrixXcd accumulated(v.rank(), 0);

  for (int guard = 0; guard <= v.rank(); ++guard) {
    MatrixXcd soc = socle(cur, d, seed);
    auto atoms = spectral_atoms(cur);
    if (!atoms) f.status = cur.rank() <= 4 ? SearchStatus::CertifiedExhaustive : SearchStatus::Heuristic;

    MatrixXcd step_basis = orthonormalize(join_spans(accumulated, lift * soc));
    FiltrationStep step;
    step.basis = step_basis;
    step.rank = static_cast<int>(step_basis.cols());
    step.quotient_slope = subspace_slope(cur, d, soc);
    f.steps.push_back(step);

    if (static_cast<int>(soc.cols()) == cur.rank()) break;
    FlatSubbundle s(cur, soc);
    MatrixXcd qc = orthogonal_complement(s.basis(), cur.rank());
    cur = quotient(cur, s);
    lift = lift * qc;
    accumulated = step_basis;
  }
  if (f.steps.empty() || f.steps.back().rank != v.rank())
    fail("FiltrationCertificate", "socle filtration did not terminate at the full bundle");
  return f;
}

}  // namespace ahe
