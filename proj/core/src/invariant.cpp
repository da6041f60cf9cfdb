#include "ahe/invariant.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace ahe {

std::string to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::CompleteCommuting: return "complete";
    case SearchStatus::CertifiedExhaustive: return "certified-exhaustive";
    case SearchStatus::Heuristic: return "heuristic";
  }
  return "unknown";
}

namespace {

double matrix_scale(const MatrixXcd& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

// Nullspace basis via SVD with a relative threshold.
MatrixXcd nullspace(const MatrixXcd& k, double rel_tol = 1e-7) {
  Eigen::JacobiSVD<MatrixXcd> svd(k, Eigen::ComputeFullV);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  std::vector<int> cols;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) <= rel_tol * std::max(1.0, smax)) cols.push_back(i);
  MatrixXcd out(k.cols(), static_cast<int>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<int>(j)) = svd.matrixV().col(cols[j]);
  return out;
}

MatrixXd real_nullspace(const MatrixXd& k, double rel_tol = 1e-7) {
  Eigen::JacobiSVD<MatrixXd> svd(k, Eigen::ComputeFullV);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  std::vector<int> cols;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) <= rel_tol * std::max(1.0, smax)) cols.push_back(i);
  MatrixXd out(k.cols(), static_cast<int>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<int>(j)) = svd.matrixV().col(cols[j]);
  return out;
}

std::vector<std::vector<int>> cluster_values(const VectorXcd& vals, double tol) {
  int n = static_cast<int>(vals.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(vals(i) - vals(j)) < tol) parent[find(i)] = find(j);
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : groups) out.push_back(members);
  return out;
}

// Generalized eigenspace of B for the eigenvalue cluster around `lam` with
// algebraic multiplicity mu; empty on nullity mismatch. (Used by the
// commutant splitter, where eigenvalues of a random element are simple or
// mildly clustered.)
MatrixXcd generalized_eigenspace(const MatrixXcd& b, cplx lam, int mu) {
  int m = static_cast<int>(b.rows());
  double s = matrix_scale(b);
  MatrixXcd k = (b - lam * MatrixXcd::Identity(m, m)) / s;
  MatrixXcd kp = MatrixXcd::Identity(m, m);
  for (int i = 0; i < mu; ++i) kp = kp * k;
  MatrixXcd ns = nullspace(kp, 1e-7);
  if (ns.cols() != mu) return MatrixXcd(m, 0);
  return orthonormalize(ns);
}

// Swap adjacent diagonal entries of an upper-triangular T (columns k, k+1)
// by a unitary similarity, updating U. Requires the two eigenvalues to be
// separated; members of one cluster are never swapped past each other.
void schur_swap(MatrixXcd& t, MatrixXcd& u, int k) {
  cplx a = t(k, k), b = t(k, k + 1), c = t(k + 1, k + 1);
  // eigenvector of [[a, b],[0, c]] for eigenvalue c
  Eigen::Vector2cd v;
  v << b, c - a;
  double nv = v.norm();
  if (nv < 1e-300) return;  // identical block, nothing to do
  v /= nv;
  Eigen::Matrix2cd g;
  g << v(0), -std::conj(v(1)), v(1), std::conj(v(0));
  int m = static_cast<int>(t.rows());
  t.block(k, 0, 2, m) = g.adjoint() * t.block(k, 0, 2, m);
  t.block(0, k, m, 2) = t.block(0, k, m, 2) * g;
  u.block(0, k, m, 2) = u.block(0, k, m, 2) * g;
  t(k + 1, k) = 0.0;  // exact by construction
}

// Orthonormal basis of the invariant subspace of B spanned by the Schur
// vectors of one diagonal cluster: reorder the cluster to the top and take
// the leading columns. Backward-stable, no epsilon^{1/m} loss on defective
// eigenvalues.
std::optional<std::vector<MatrixXcd>> split_by_schur_clusters(const MatrixXcd& b,
                                                              double cluster_tol) {
  int m = static_cast<int>(b.rows());
  Eigen::ComplexSchur<MatrixXcd> schur(b, /*computeU=*/true);
  if (schur.info() != Eigen::Success) return std::nullopt;
  MatrixXcd t = schur.matrixT();
  MatrixXcd u = schur.matrixU();

  VectorXcd diag = t.diagonal();
  auto clusters = cluster_values(diag, cluster_tol * matrix_scale(b));

  // Merge clusters with a tiny Sylvester separation: a defective eigenvalue
  // splits by eps^{1/m} under roundoff, and pairwise eigenvalue distances
  // cannot tell such splits from genuine close spectra, but sep(T11, T22)
  // collapses (~eps) exactly for the spurious splits.
  // Leading and trailing triangular blocks after bubbling the members of one
  // cluster to the top.
  auto split_blocks = [&](const std::vector<int>& member_positions) {
    MatrixXcd t2 = t;
    MatrixXcd u2 = u;
    std::vector<bool> selected(m, false);
    for (int p : member_positions) selected[p] = true;
    int want = 0;
    for (; want < static_cast<int>(member_positions.size()); ++want) {
      int j = want;
      while (j < m && !selected[j]) ++j;
      if (j == m) break;
      for (; j > want; --j) {
        schur_swap(t2, u2, j - 1);
        std::swap(selected[j - 1], selected[j]);
      }
    }
    return std::make_pair(MatrixXcd(t2.topLeftCorner(want, want)),
                          MatrixXcd(t2.bottomRightCorner(m - want, m - want)));
  };
  auto sylvester_sep = [&](const MatrixXcd& t11, const MatrixXcd& t22) {
    int m1 = static_cast<int>(t11.rows()), m2 = static_cast<int>(t22.rows());
    if (m1 == 0 || m2 == 0) return std::numeric_limits<double>::infinity();
    MatrixXcd syl = MatrixXcd::Zero(m1 * m2, m1 * m2);
    for (int c = 0; c < m2; ++c) syl.block(c * m1, c * m1, m1, m1) += t11;
    for (int c = 0; c < m2; ++c)
      for (int c2 = 0; c2 < m2; ++c2)
        syl.block(c * m1, c2 * m1, m1, m1) -= t22.transpose()(c, c2) * MatrixXcd::Identity(m1, m1);
    Eigen::JacobiSVD<MatrixXcd> svd(syl);
    return svd.singularValues().minCoeff();
  };
  auto center_of = [&](const std::vector<int>& cl) {
    cplx lam = 0.0;
    for (int idx : cl) lam += diag(idx);
    return lam / static_cast<double>(cl.size());
  };
  // A cluster whose invariant subspace is ill-separated from its complement
  // (tiny Sylvester separation) is a spurious split of a defective
  // eigenvalue; merge it with its nearest neighbor and retry.
  double sep_tol = 1e-6 * matrix_scale(b);
  bool merged = true;
  while (merged && clusters.size() > 1) {
    merged = false;
    for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
      auto [t11, t22] = split_blocks(clusters[ci]);
      if (sylvester_sep(t11, t22) >= sep_tol) continue;
      cplx c0 = center_of(clusters[ci]);
      std::size_t best = ci;
      double bestd = std::numeric_limits<double>::infinity();
      for (std::size_t cj = 0; cj < clusters.size(); ++cj) {
        if (cj == ci) continue;
        double dd = std::abs(center_of(clusters[cj]) - c0);
        if (dd < bestd) {
          bestd = dd;
          best = cj;
        }
      }
      if (best == ci) continue;
      clusters[ci].insert(clusters[ci].end(), clusters[best].begin(), clusters[best].end());
      clusters.erase(clusters.begin() + static_cast<long>(best));
      merged = true;
      break;
    }
  }

  // representative value per cluster, for membership tests during swaps
  std::vector<cplx> centers;
  for (const auto& cl : clusters) {
    cplx lam = 0.0;
    for (int idx : cl) lam += diag(idx);
    centers.push_back(lam / static_cast<double>(cl.size()));
  }
  auto cluster_of = [&](cplx lam) {
    int best = 0;
    double bestd = std::abs(lam - centers[0]);
    for (std::size_t ci = 1; ci < centers.size(); ++ci) {
      double dd = std::abs(lam - centers[ci]);
      if (dd < bestd) {
        bestd = dd;
        best = static_cast<int>(ci);
      }
    }
    return best;
  };

  std::vector<MatrixXcd> spaces;
  if (clusters.size() == 1) {
    spaces.push_back(MatrixXcd::Identity(m, m));
    return spaces;
  }
  // A cluster's generalized eigenspace is spanned by the leading Schur
  // vectors once its members are reordered to the top; reorder a fresh copy
  // for each cluster.
  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    MatrixXcd t2 = t;
    MatrixXcd u2 = u;
    int size = static_cast<int>(clusters[ci].size());
    for (int want = 0; want < size; ++want) {
      int j = want;
      while (j < m && cluster_of(t2(j, j)) != static_cast<int>(ci)) ++j;
      if (j == m) return std::nullopt;  // clustering inconsistency
      for (; j > want; --j) schur_swap(t2, u2, j - 1);
    }
    spaces.push_back(u2.leftCols(size));
  }
  return spaces;
}

// Refinement of the fiber into joint generalized eigenspaces of a commuting
// family, at a given clustering tolerance. Empty on failure.
std::optional<std::vector<MatrixXcd>> joint_eigenspaces(const std::vector<MatrixXcd>& gens, int rank,
                                                        double cluster_tol) {
  std::vector<MatrixXcd> spaces{MatrixXcd::Identity(rank, rank)};
  for (const auto& g : gens) {
    std::vector<MatrixXcd> next;
    for (const auto& q : spaces) {
      MatrixXcd b = q.adjoint() * g * q;
      auto locals = split_by_schur_clusters(b, cluster_tol);
      if (!locals) return std::nullopt;
      int total = 0;
      for (const auto& l : *locals) {
        next.push_back(orthonormalize(q * l));
        total += static_cast<int>(l.cols());
      }
      if (total != q.cols()) return std::nullopt;
    }
    spaces = std::move(next);
  }
  return spaces;
}

double invariance_residual_of(const std::vector<MatrixXcd>& gens, const MatrixXcd& q) {
  int r = static_cast<int>(q.rows());
  MatrixXcd p = q * q.adjoint();
  MatrixXcd rest = MatrixXcd::Identity(r, r) - p;
  double worst = 0.0;
  for (const auto& g : gens) worst = std::max(worst, (rest * g * p).norm() / std::max(1.0, g.norm()));
  return worst;
}

// Real basis of a conjugation-invariant complex span.
MatrixXd realify_span(const MatrixXcd& b) {
  MatrixXd stacked(b.rows(), 2 * b.cols());
  stacked << b.real(), b.imag();
  Eigen::JacobiSVD<MatrixXd> svd(stacked, Eigen::ComputeThinU);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-9 * std::max(1.0, smax)) ++rank;
  return svd.matrixU().leftCols(rank);
}

struct ChainData {
  std::vector<MatrixXcd> chain;  // atom coordinates
  std::vector<int> dims;
  MatrixXcd socle;               // atom coordinates
  bool unique_chain;
  bool semisimple;
};

// Canonical composition chain of the module defined by commuting nilpotents
// on C^m (or R^m when `real_arith`): socle-layer peeling, one vector at a
// time, deterministic choices.
ChainData build_chain(const std::vector<MatrixXcd>& nilpotents, int m, bool real_arith) {
  ChainData out;
  double nil_scale = 0.0;
  for (const auto& nl : nilpotents) nil_scale = std::max(nil_scale, nl.norm());
  out.semisimple = nil_scale <= 1e-9;

  // Socle-series widths for the uniqueness flag.
  {
    MatrixXcd w(m, 0);
    out.unique_chain = true;
    int guard = 0;
    while (w.cols() < m && guard++ <= m) {
      MatrixXcd p = MatrixXcd::Identity(m, m);
      if (w.cols() > 0) p -= w * w.adjoint();
      MatrixXcd stacked(static_cast<int>(nilpotents.size()) * m, m);
      for (std::size_t i = 0; i < nilpotents.size(); ++i)
        stacked.middleRows(static_cast<int>(i) * m, m) = p * nilpotents[i];
      MatrixXcd soc = orthonormalize(nullspace(stacked, 1e-8));
      if (w.cols() == 0) out.socle = soc;
      int width = static_cast<int>(soc.cols()) - static_cast<int>(w.cols());
      if (width <= 0) fail("ChainStall", "socle series failed to grow");
      if (width > 1) out.unique_chain = false;
      w = soc;
    }
  }

  // Composition chain: add one socle vector at a time.
  MatrixXcd w(m, 0);
  while (w.cols() < m) {
    MatrixXcd p = MatrixXcd::Identity(m, m);
    if (w.cols() > 0) p -= w * w.adjoint();
    MatrixXcd stacked(static_cast<int>(nilpotents.size()) * m, m);
    for (std::size_t i = 0; i < nilpotents.size(); ++i)
      stacked.middleRows(static_cast<int>(i) * m, m) = p * nilpotents[i];
    MatrixXcd layer = nullspace(stacked, 1e-8);
    // Remove the part already in w, deterministically.
    MatrixXcd fresh(m, 0);
    for (int c = 0; c < layer.cols(); ++c) {
      VectorXcd v = layer.col(c);
      if (w.cols() > 0) v -= w * (w.adjoint() * v);
      if (v.norm() > 1e-8) {
        fresh = v.normalized();
        break;
      }
    }
    if (fresh.cols() == 0) fail("ChainStall", "no fresh socle vector");
    if (real_arith && fresh.imag().cwiseAbs().maxCoeff() > 1e-9) {
      // deterministic real representative of the line when possible
      MatrixXd re = realify_span(fresh);
      if (re.cols() >= 1) fresh = re.col(0).cast<cplx>();
    }
    MatrixXcd joined(m, w.cols() + 1);
    joined << w, fresh;
    w = orthonormalize(joined);
    out.chain.push_back(w);
    out.dims.push_back(static_cast<int>(w.cols()));
  }
  return out;
}

}  // namespace

std::optional<std::vector<SpectralAtom>> spectral_atoms(const Monodromy& a) {
  if (!a.commuting()) return std::nullopt;
  int r = a.rank();

  std::optional<std::vector<MatrixXcd>> spaces;
  for (double ctol : {1e-8, 1e-6, 1e-4, 3e-3}) {
    spaces = joint_eigenspaces(a.generators(), r, ctol);
    if (spaces) break;
  }
  if (!spaces) fail("SpectralSplitFail", "joint eigenspace refinement failed at all tolerances");

  struct ComplexAtom {
    MatrixXcd basis;
    VectorXcd evs;
  };
  std::vector<ComplexAtom> catoms;
  for (const auto& q : *spaces) {
    ComplexAtom ca;
    ca.basis = q;
    ca.evs.resize(a.generator_count());
    for (int i = 0; i < a.generator_count(); ++i)
      ca.evs(i) = (q.adjoint() * a.gen(i) * q).trace() / static_cast<double>(q.cols());
    catoms.push_back(std::move(ca));
  }
  std::sort(catoms.begin(), catoms.end(), [](const ComplexAtom& x, const ComplexAtom& y) {
    for (int i = 0; i < x.evs.size(); ++i) {
      if (std::abs(x.evs(i).real() - y.evs(i).real()) > 1e-9) return x.evs(i).real() < y.evs(i).real();
      if (std::abs(x.evs(i).imag() - y.evs(i).imag()) > 1e-9) return x.evs(i).imag() < y.evs(i).imag();
    }
    return false;
  });

  std::vector<SpectralAtom> atoms;

  auto finish_atom = [&](SpectralAtom& atom, const std::vector<MatrixXcd>& chain_ambient,
                         const std::vector<int>& dims, const MatrixXcd& socle_ambient, bool semisimple,
                         bool unique_chain) {
    atom.chain = chain_ambient;
    atom.chain_dims = dims;
    atom.socle = socle_ambient;
    atom.semisimple = semisimple;
    atom.unique_chain = unique_chain;
    atom.character_density.resize(a.generator_count());
    for (int i = 0; i < a.generator_count(); ++i) {
      MatrixXcd restr = atom.basis.adjoint() * a.gen(i) * atom.basis;
      atom.character_density(i) = std::log(std::abs(restr.determinant())) / atom.dim();
    }
    atoms.push_back(std::move(atom));
  };

  if (a.field() == Field::Complex) {
    for (const auto& ca : catoms) {
      SpectralAtom atom;
      atom.basis = ca.basis;
      atom.joint_eigenvalues = ca.evs;
      int m = static_cast<int>(ca.basis.cols());
      std::vector<MatrixXcd> nil;
      for (int i = 0; i < a.generator_count(); ++i)
        nil.push_back(ca.basis.adjoint() * a.gen(i) * ca.basis - ca.evs(i) * MatrixXcd::Identity(m, m));
      ChainData cd = build_chain(nil, m, false);
      std::vector<MatrixXcd> chain_ambient;
      for (const auto& c : cd.chain) chain_ambient.push_back(orthonormalize(ca.basis * c));
      finish_atom(atom, chain_ambient, cd.dims, orthonormalize(ca.basis * cd.socle), cd.semisimple,
                  cd.unique_chain);
    }
    return atoms;
  }

  // Real field: realify self-conjugate atoms, merge conjugate pairs.
  std::vector<bool> used(catoms.size(), false);
  for (std::size_t i = 0; i < catoms.size(); ++i) {
    if (used[i]) continue;
    MatrixXcd conj_basis = catoms[i].basis.conjugate();
    bool self_conj = principal_angle_distance(orthonormalize(conj_basis), catoms[i].basis) < 1e-7;
    if (self_conj) {
      used[i] = true;
      SpectralAtom atom;
      MatrixXd rb = realify_span(catoms[i].basis);
      if (rb.cols() != catoms[i].basis.cols())
        fail("SpectralSplitFail", "realification dimension mismatch for a self-conjugate atom");
      atom.basis = rb.cast<cplx>();
      atom.joint_eigenvalues = catoms[i].evs;
      atom.conjugate_pair = false;
      int m = static_cast<int>(rb.cols());
      std::vector<MatrixXcd> nil;
      for (int gidx = 0; gidx < a.generator_count(); ++gidx)
        nil.push_back(atom.basis.adjoint() * a.gen(gidx) * atom.basis -
                      catoms[i].evs(gidx).real() * MatrixXcd::Identity(m, m));
      ChainData cd = build_chain(nil, m, true);
      std::vector<MatrixXcd> chain_ambient;
      for (const auto& c : cd.chain) chain_ambient.push_back(orthonormalize(atom.basis * c));
      finish_atom(atom, chain_ambient, cd.dims, orthonormalize(atom.basis * cd.socle), cd.semisimple,
                  cd.unique_chain);
      continue;
    }
    // find the conjugate partner
    std::size_t partner = catoms.size();
    for (std::size_t j = i + 1; j < catoms.size(); ++j) {
      if (used[j] || catoms[j].basis.cols() != catoms[i].basis.cols()) continue;
      if (principal_angle_distance(orthonormalize(conj_basis), catoms[j].basis) < 1e-7) {
        partner = j;
        break;
      }
    }
    if (partner == catoms.size()) fail("SpectralSplitFail", "missing conjugate partner atom");
    used[i] = used[partner] = true;

    SpectralAtom atom;
    MatrixXcd pair(r, 2 * catoms[i].basis.cols());
    pair << catoms[i].basis, conj_basis;
    MatrixXd rb = realify_span(pair);
    atom.basis = rb.cast<cplx>();
    atom.joint_eigenvalues = catoms[i].evs;
    atom.conjugate_pair = true;
    int mc = static_cast<int>(catoms[i].basis.cols());

    // chain: realified complex chain of one member of the pair
    std::vector<MatrixXcd> nil;
    for (int gidx = 0; gidx < a.generator_count(); ++gidx)
      nil.push_back(catoms[i].basis.adjoint() * a.gen(gidx) * catoms[i].basis -
                    catoms[i].evs(gidx) * MatrixXcd::Identity(mc, mc));
    ChainData cd = build_chain(nil, mc, false);
    std::vector<MatrixXcd> chain_ambient;
    std::vector<int> dims;
    for (std::size_t t = 0; t < cd.chain.size(); ++t) {
      MatrixXcd cw = catoms[i].basis * cd.chain[t];
      MatrixXcd both(r, 2 * cw.cols());
      both << cw, cw.conjugate();
      chain_ambient.push_back(realify_span(both).cast<cplx>());
      dims.push_back(2 * cd.dims[t]);
    }
    MatrixXcd socc = catoms[i].basis * cd.socle;
    MatrixXcd socboth(r, 2 * socc.cols());
    socboth << socc, socc.conjugate();
    finish_atom(atom, chain_ambient, dims, realify_span(socboth).cast<cplx>(), cd.semisimple,
                cd.unique_chain);
  }
  return atoms;
}

namespace {

void dedupe_subspaces(std::vector<MatrixXcd>& list) {
  std::vector<MatrixXcd> out;
  for (const auto& s : list) {
    bool dup = false;
    for (const auto& t : out)
      if (t.cols() == s.cols() && principal_angle_distance(t, s) < tol::subspace_match) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(s);
  }
  list = std::move(out);
}

MatrixXcd spin_up(const std::vector<MatrixXcd>& gens, const std::vector<MatrixXcd>& gen_invs,
                  const MatrixXcd& seed) {
  MatrixXcd s = orthonormalize(seed);
  int r = static_cast<int>(gens[0].rows());
  for (int iter = 0; iter < 4 * r; ++iter) {
    MatrixXcd grown(r, s.cols() * (1 + 2 * static_cast<int>(gens.size())));
    grown.leftCols(s.cols()) = s;
    int off = static_cast<int>(s.cols());
    for (std::size_t i = 0; i < gens.size(); ++i) {
      grown.middleCols(off, s.cols()) = gens[i] * s;
      off += static_cast<int>(s.cols());
      grown.middleCols(off, s.cols()) = gen_invs[i] * s;
      off += static_cast<int>(s.cols());
    }
    MatrixXcd next = orthonormalize(grown);
    if (next.cols() == s.cols()) return next;
    s = next;
    if (s.cols() == r) return s;
  }
  return s;
}

// Randomized invariant-subspace search for possibly non-commuting
// generators: eigenspaces of random algebra elements, module closures, and
// a bounded lattice of sums/intersections.
std::vector<MatrixXcd> random_algebra_search(const Monodromy& a, std::uint64_t seed, int element_count) {
  int r = a.rank();
  std::mt19937_64 rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  std::vector<MatrixXcd> gens = a.generators();
  std::vector<MatrixXcd> gen_invs;
  for (int i = 0; i < a.generator_count(); ++i) gen_invs.push_back(a.gen_inverse(i));

  std::vector<MatrixXcd> found;
  auto consider = [&](const MatrixXcd& cand) {
    if (cand.cols() == 0 || cand.cols() >= r) return;
    MatrixXcd q = orthonormalize(cand);
    if (invariance_residual_of(gens, q) > 1e-8) return;
    found.push_back(q);
  };

  for (int e = 0; e < element_count; ++e) {
    MatrixXcd t = MatrixXcd::Zero(r, r);
    for (int i = 0; i < a.generator_count(); ++i) {
      t += cplx(u(rng), u(rng)) * gens[i];
      t += cplx(u(rng), u(rng)) * gen_invs[i];
    }
    if (a.generator_count() > 1) {
      int i = static_cast<int>(rng() % a.generator_count());
      int j = static_cast<int>(rng() % a.generator_count());
      t += cplx(u(rng), u(rng)) * (gens[i] * gens[j]);
    }
    Eigen::ComplexEigenSolver<MatrixXcd> es(t);
    if (es.info() != Eigen::Success) continue;
    auto clusters = cluster_values(es.eigenvalues(), 1e-8 * matrix_scale(t));
    for (const auto& cl : clusters) {
      MatrixXcd vecs(r, static_cast<int>(cl.size()));
      for (std::size_t cidx = 0; cidx < cl.size(); ++cidx)
        vecs.col(static_cast<int>(cidx)) = es.eigenvectors().col(cl[cidx]);
      consider(spin_up(gens, gen_invs, vecs));
      for (int cidx = 0; cidx < vecs.cols(); ++cidx)
        consider(spin_up(gens, gen_invs, vecs.col(cidx)));
    }
  }

  dedupe_subspaces(found);

  // Bounded lattice closure under sums and intersections.
  const std::size_t cap = 256;
  bool grew = true;
  while (grew && found.size() < cap) {
    grew = false;
    std::size_t n0 = found.size();
    for (std::size_t i = 0; i < n0 && found.size() < cap; ++i) {
      for (std::size_t j = i + 1; j < n0 && found.size() < cap; ++j) {
        MatrixXcd sum = join_spans(found[i], found[j]);
        if (sum.cols() < r) {
          std::size_t before = found.size();
          found.push_back(sum);
          dedupe_subspaces(found);
          if (found.size() > before) grew = true;
        }
        MatrixXcd inter = intersect_spans(found[i], found[j]);
        if (inter.cols() > 0 && invariance_residual_of(gens, inter) < 1e-8) {
          std::size_t before = found.size();
          found.push_back(inter);
          dedupe_subspaces(found);
          if (found.size() > before) grew = true;
        }
      }
    }
  }
  return found;
}

}  // namespace

SubspaceSearch all_invariant_subspaces(const Monodromy& a, std::uint64_t seed) {
  SubspaceSearch out;
  int r = a.rank();
  if (r > 8) fail("RankOutOfRange", "invariant-subspace search is limited to rank <= 8");

  auto atoms = spectral_atoms(a);
  if (atoms) {
    out.status = SearchStatus::CompleteCommuting;
    // Enumerate achievable multiplicity vectors across atoms.
    int na = static_cast<int>(atoms->size());
    std::vector<std::vector<int>> choices(na);
    for (int i = 0; i < na; ++i) {
      choices[i].push_back(0);
      for (int d : (*atoms)[i].chain_dims) choices[i].push_back(d);
    }
    std::vector<int> pick(na, 0);
    std::function<void(int, int)> rec = [&](int idx, int total) {
      if (idx == na) {
        if (total == 0 || total == r) return;  // proper subspaces only at this level
        InvariantSubspace s;
        s.atom_multiplicity = pick;
        bool isolated = true;
        std::ostringstream fam;
        MatrixXcd joined(r, 0);
        for (int i = 0; i < na; ++i) {
          if (pick[i] == 0) continue;
          const SpectralAtom& at = (*atoms)[i];
          const MatrixXcd* block = &at.basis;
          if (pick[i] < at.dim()) {
            for (std::size_t t = 0; t < at.chain.size(); ++t)
              if (at.chain_dims[t] == pick[i]) block = &at.chain[t];
            if (!at.unique_chain) {
              isolated = false;
              fam << "atom" << i << ":dim" << pick[i] << "/" << at.dim() << " ";
            }
          }
          joined = join_spans(joined, *block);
        }
        if (static_cast<int>(joined.cols()) != total) return;  // numerically degenerate join
        s.basis = joined;
        s.isolated = isolated;
        if (!isolated) s.family = "members drawn from generalized eigenspaces: " + fam.str();
        out.spaces.push_back(std::move(s));
        return;
      }
      for (int c : choices[idx]) {
        pick[idx] = c;
        rec(idx + 1, total + c);
      }
      pick[idx] = 0;
    };
    rec(0, 0);
    return out;
  }

  // Non-commuting path.
  out.status = r <= 4 ? SearchStatus::CertifiedExhaustive : SearchStatus::Heuristic;
  std::vector<MatrixXcd> complex_found;
  {
    // Over the complexification when the bundle is real.
    std::vector<MatrixXcd> raw;
    if (a.field() == Field::Real) {
      Monodromy ac = Monodromy::complexify(a);
      raw = random_algebra_search(ac, seed, 64);
      // realify: self-conjugate spans directly, conjugate pairs via sums
      std::vector<MatrixXcd> real_list;
      for (const auto& w : raw) {
        MatrixXcd wc = orthonormalize(w.conjugate());
        if (principal_angle_distance(wc, w) < 1e-7) {
          real_list.push_back(realify_span(w).cast<cplx>());
        } else {
          MatrixXcd both(w.rows(), 2 * w.cols());
          both << w, w.conjugate();
          MatrixXcd sum = orthonormalize(both);
          if (sum.cols() < a.rank()) real_list.push_back(realify_span(sum).cast<cplx>());
        }
      }
      dedupe_subspaces(real_list);
      complex_found = std::move(real_list);
    } else {
      complex_found = random_algebra_search(a, seed, 64);
    }
  }
  for (auto& q : complex_found) {
    if (invariance_residual_of(a.generators(), q) > 1e-8) continue;
    InvariantSubspace s;
    s.basis = q;
    s.isolated = true;
    out.spaces.push_back(std::move(s));
  }
  return out;
}

SubspaceSearch invariant_subspaces(const Monodromy& a, int k, std::uint64_t seed) {
  if (k < 1 || k > a.rank()) fail("RankOutOfRange", "subspace dimension outside [1, rank]");
  SubspaceSearch all = all_invariant_subspaces(a, seed);
  SubspaceSearch out;
  out.status = all.status;
  if (k == a.rank()) {
    InvariantSubspace whole;
    whole.basis = MatrixXcd::Identity(a.rank(), a.rank());
    whole.isolated = true;
    out.spaces.push_back(std::move(whole));
    return out;
  }
  for (auto& s : all.spaces)
    if (static_cast<int>(s.basis.cols()) == k) out.spaces.push_back(std::move(s));
  return out;
}

std::vector<MatrixXcd> commutant_basis(const Monodromy& a) {
  int r = a.rank();
  if (a.field() == Field::Complex) {
    MatrixXcd sys(a.generator_count() * r * r, r * r);
    for (int i = 0; i < a.generator_count(); ++i) {
      const MatrixXcd& g = a.gen(i);
      MatrixXcd block = MatrixXcd::Zero(r * r, r * r);
      // vec(g T - T g) = (I ⊗ g - g^T ⊗ I) vec(T)
      for (int c = 0; c < r; ++c)
        block.block(c * r, c * r, r, r) += g;
      for (int c = 0; c < r; ++c)
        for (int c2 = 0; c2 < r; ++c2)
          block.block(c * r, c2 * r, r, r) -= g.transpose()(c, c2) * MatrixXcd::Identity(r, r);
      sys.middleRows(i * r * r, r * r) = block;
    }
    MatrixXcd ns = nullspace(sys, 1e-9);
    std::vector<MatrixXcd> basis;
    for (int c = 0; c < ns.cols(); ++c)
      basis.push_back(Eigen::Map<const MatrixXcd>(ns.col(c).data(), r, r));
    return basis;
  }
  // Real field: real solutions of the same system.
  MatrixXd sys(a.generator_count() * r * r, r * r);
  for (int i = 0; i < a.generator_count(); ++i) {
    MatrixXd g = a.gen(i).real();
    MatrixXd block = MatrixXd::Zero(r * r, r * r);
    for (int c = 0; c < r; ++c) block.block(c * r, c * r, r, r) += g;
    for (int c = 0; c < r; ++c)
      for (int c2 = 0; c2 < r; ++c2)
        block.block(c * r, c2 * r, r, r) -= g.transpose()(c, c2) * MatrixXd::Identity(r, r);
    sys.middleRows(i * r * r, r * r) = block;
  }
  MatrixXd ns = real_nullspace(sys, 1e-9);
  std::vector<MatrixXcd> basis;
  for (int c = 0; c < ns.cols(); ++c)
    basis.push_back(Eigen::Map<const MatrixXd>(ns.col(c).data(), r, r).cast<cplx>());
  return basis;
}

namespace {

void fitting_split(const Monodromy& a, const MatrixXcd& ambient_basis, std::uint64_t seed,
                   std::vector<MatrixXcd>& out) {
  Monodromy restr = FlatSubbundle(a, ambient_basis).restricted();
  int m = restr.rank();
  if (m == 1) {
    out.push_back(ambient_basis);
    return;
  }
  std::vector<MatrixXcd> comm = commutant_basis(restr);
  std::mt19937_64 rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int attempt = 0; attempt < 8; ++attempt) {
    MatrixXcd t = MatrixXcd::Zero(m, m);
    for (const auto& c : comm) {
      cplx coeff = restr.field() == Field::Complex ? cplx(u(rng), u(rng)) : cplx(u(rng), 0.0);
      t += coeff * c;
    }
    Eigen::ComplexEigenSolver<MatrixXcd> es(t);
    if (es.info() != Eigen::Success) continue;
    auto clusters = cluster_values(es.eigenvalues(), 1e-7 * matrix_scale(t));
    if (restr.field() == Field::Real) {
      // merge clusters into conjugation-closed groups
      std::vector<std::vector<int>> merged;
      std::vector<bool> used(clusters.size(), false);
      for (std::size_t i = 0; i < clusters.size(); ++i) {
        if (used[i]) continue;
        cplx lam = es.eigenvalues()(clusters[i][0]);
        std::vector<int> grp = clusters[i];
        used[i] = true;
        if (std::abs(lam.imag()) > 1e-7 * matrix_scale(t)) {
          for (std::size_t j = i + 1; j < clusters.size(); ++j) {
            if (used[j]) continue;
            cplx mu = es.eigenvalues()(clusters[j][0]);
            if (std::abs(mu - std::conj(lam)) < 1e-6 * matrix_scale(t)) {
              grp.insert(grp.end(), clusters[j].begin(), clusters[j].end());
              used[j] = true;
              break;
            }
          }
        }
        merged.push_back(grp);
      }
      clusters = merged;
    }
    if (clusters.size() < 2) continue;
    // generalized eigenspaces of t per cluster are submodules
    bool all_ok = true;
    std::vector<MatrixXcd> parts;
    for (const auto& cl : clusters) {
      cplx lam = 0.0;
      for (int idx : cl) lam += es.eigenvalues()(idx);
      lam /= static_cast<double>(cl.size());
      MatrixXcd ge;
      if (restr.field() == Field::Real && cl.size() >= 2) {
        // conjugation-closed: product of the two factors keeps it real
        double s = matrix_scale(t);
        MatrixXcd k = MatrixXcd::Identity(m, m);
        std::vector<cplx> lams;
        // distinct representatives inside the merged group
        lams.push_back(lam);
        if (std::abs(lam.imag()) > 1e-9) lams = {es.eigenvalues()(cl[0]), std::conj(es.eigenvalues()(cl[0]))};
        for (cplx l0 : lams) {
          MatrixXcd f = (t - l0 * MatrixXcd::Identity(m, m)) / s;
          for (std::size_t rep = 0; rep < cl.size(); ++rep) k = k * f;
        }
        ge = orthonormalize(nullspace(k, 1e-8));
      } else {
        ge = generalized_eigenspace(t, lam, static_cast<int>(cl.size()));
      }
      if (ge.cols() == 0 || ge.cols() == m) {
        all_ok = false;
        break;
      }
      parts.push_back(ge);
    }
    int total = 0;
    for (const auto& pb : parts) total += static_cast<int>(pb.cols());
    if (!all_ok || total != m) continue;
    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
      MatrixXcd amb = orthonormalize(ambient_basis * parts[pi]);
      if (restr.field() == Field::Real) amb = realify_span(amb).cast<cplx>();
      fitting_split(a, amb, seed + 0x9e37 * (pi + 1), out);
    }
    return;
  }
  out.push_back(ambient_basis);  // indecomposable (no commutant split found)
}

}  // namespace

std::vector<MatrixXcd> fitting_summands(const Monodromy& a, std::uint64_t seed) {
  std::vector<MatrixXcd> out;
  fitting_split(a, MatrixXcd::Identity(a.rank(), a.rank()), seed, out);
  return out;
}

bool is_irreducible(const Monodromy& a, std::uint64_t seed) {
  if (a.rank() == 1) return true;
  SubspaceSearch s = all_invariant_subspaces(a, seed);
  return s.spaces.empty();
}

Decomposition complete_reduction(const Monodromy& a, std::uint64_t seed) {
  Decomposition d;
  d.summands = fitting_summands(a, seed);
  d.status = a.commuting() ? SearchStatus::CompleteCommuting
                           : (a.rank() <= 4 ? SearchStatus::CertifiedExhaustive : SearchStatus::Heuristic);
  d.completely_reducible = true;
  for (const auto& s : d.summands) {
    Monodromy restr = FlatSubbundle(a, s).restricted();
    if (!is_irreducible(restr, seed)) {
      d.completely_reducible = false;
      break;
    }
  }
  return d;
}

}  // namespace ahe
