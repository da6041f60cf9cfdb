#include "ahe/oracle.hpp"

namespace ahe {

namespace {

// Deliberately self-contained linear algebra: this file must not share the
// subspace machinery it is used to check.

MatrixXcd o_orth(const MatrixXcd& b) {
  if (b.cols() == 0) return b;
  Eigen::JacobiSVD<MatrixXcd> svd(b, Eigen::ComputeThinU);
  double smax = svd.singularValues()(0);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-9 * std::max(1.0, smax)) ++rank;
  return svd.matrixU().leftCols(rank);
}

MatrixXcd o_kernel(const MatrixXcd& k) {
  Eigen::JacobiSVD<MatrixXcd> svd(k, Eigen::ComputeFullV);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  std::vector<int> cols;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) <= 1e-8 * std::max(1.0, smax)) cols.push_back(i);
  MatrixXcd out(k.cols(), static_cast<int>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<int>(j)) = svd.matrixV().col(cols[j]);
  return out;
}

MatrixXcd o_intersect(const MatrixXcd& a, const MatrixXcd& b) {
  if (a.cols() == 0 || b.cols() == 0) return MatrixXcd(a.rows(), 0);
  MatrixXcd m(a.rows(), a.cols() + b.cols());
  m << a, -b;
  MatrixXcd ns = o_kernel(m);
  MatrixXcd out(a.rows(), ns.cols());
  for (int j = 0; j < ns.cols(); ++j) out.col(j) = a * ns.col(j).head(a.cols());
  return o_orth(out);
}

bool o_same(const MatrixXcd& a, const MatrixXcd& b) {
  if (a.cols() != b.cols()) return false;
  if (a.cols() == 0) return true;
  Eigen::JacobiSVD<MatrixXcd> svd(a.adjoint() * b);
  return svd.singularValues().minCoeff() > 1.0 - 1e-12;
}

bool o_invariant(const std::vector<MatrixXcd>& gens, const MatrixXcd& q) {
  if (q.cols() == 0) return false;
  MatrixXcd p = q * q.adjoint();
  MatrixXcd rest = MatrixXcd::Identity(q.rows(), q.rows()) - p;
  for (const auto& g : gens)
    if ((rest * g * p).norm() > 1e-9 * std::max(1.0, g.norm())) return false;
  return true;
}

double o_slope(const Monodromy& v, const DegreeFunctional& d, const MatrixXcd& q) {
  if (static_cast<int>(q.cols()) == v.rank()) return d.slope(v);
  return d.subbundle_slope(FlatSubbundle(v, q));
}

bool o_diagonalizable(const MatrixXcd& m) {
  int n = static_cast<int>(m.rows());
  Eigen::ComplexEigenSolver<MatrixXcd> es(m);
  if (es.info() != Eigen::Success) return false;
  // diagonalizable iff for each eigenvalue, geometric = algebraic multiplicity
  std::vector<bool> used(n, false);
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i) {
    if (used[i]) continue;
    cplx lam = es.eigenvalues()(i);
    int alg = 0;
    for (int j = 0; j < n; ++j)
      if (std::abs(es.eigenvalues()(j) - lam) < 1e-6 * scale) {
        ++alg;
        used[j] = true;
      }
    MatrixXcd k = m - lam * MatrixXcd::Identity(n, n);
    int geo = static_cast<int>(o_kernel(k / scale).cols());
    if (geo != alg) return false;
  }
  return true;
}

// All proper invariant subspaces arising as sums of intersected
// generator-eigenspace flags.
std::vector<MatrixXcd> enumerate_subspaces(const Monodromy& v) {
  int r = v.rank();
  std::vector<MatrixXcd> gens = v.generators();

  // Pool of building blocks: ker((g - lambda)^t) per generator/eigenvalue.
  std::vector<MatrixXcd> pool;
  auto add = [&](const MatrixXcd& q) {
    if (q.cols() == 0 || q.cols() > r) return;
    for (const auto& e : pool)
      if (o_same(e, q)) return;
    pool.push_back(q);
  };
  for (const auto& g : gens) {
    Eigen::ComplexEigenSolver<MatrixXcd> es(g);
    double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    std::vector<cplx> seen;
    for (int i = 0; i < r; ++i) {
      cplx lam = es.eigenvalues()(i);
      bool dup = false;
      for (cplx s : seen)
        if (std::abs(s - lam) < 1e-6 * scale) dup = true;
      if (dup) continue;
      seen.push_back(lam);
      MatrixXcd k = (g - lam * MatrixXcd::Identity(r, r)) / scale;
      MatrixXcd kp = MatrixXcd::Identity(r, r);
      for (int t = 1; t <= r; ++t) {
        kp = kp * k;
        add(o_orth(o_kernel(kp)));
      }
    }
  }

  // Close under pairwise intersections.
  bool grew = true;
  while (grew && pool.size() < 512) {
    grew = false;
    std::size_t n0 = pool.size();
    for (std::size_t i = 0; i < n0; ++i)
      for (std::size_t j = i + 1; j < n0; ++j) {
        MatrixXcd inter = o_intersect(pool[i], pool[j]);
        std::size_t before = pool.size();
        add(inter);
        if (pool.size() > before) grew = true;
      }
  }

  // Sums of subsets of the pool, filtered for invariance.
  std::vector<MatrixXcd> result;
  auto add_result = [&](const MatrixXcd& q) {
    if (q.cols() == 0 || static_cast<int>(q.cols()) >= r) return;
    if (!o_invariant(gens, q)) return;
    for (const auto& e : result)
      if (o_same(e, q)) return;
    result.push_back(q);
  };
  int np = static_cast<int>(pool.size());
  if (np > 16) fail("OracleInfeasible", "eigenspace pool too large for exhaustive sums");
  for (long mask = 1; mask < (1L << np); ++mask) {
    MatrixXcd sum(r, 0);
    for (int i = 0; i < np; ++i)
      if (mask & (1L << i)) {
        MatrixXcd joined(r, sum.cols() + pool[i].cols());
        joined << sum, pool[i];
        sum = o_orth(joined);
      }
    add_result(sum);
  }

  // Real bundles: keep conjugation-stable subspaces only (real points).
  if (v.field() == Field::Real) {
    std::vector<MatrixXcd> real_result;
    for (const auto& q : result) {
      MatrixXcd conj = o_orth(q.conjugate());
      if (o_same(conj, q)) {
        MatrixXd stacked(q.rows(), 2 * q.cols());
        stacked << q.real(), q.imag();
        Eigen::JacobiSVD<MatrixXd> svd(stacked, Eigen::ComputeThinU);
        double smax = svd.singularValues()(0);
        int rank = 0;
        for (int i = 0; i < svd.singularValues().size(); ++i)
          if (svd.singularValues()(i) > 1e-9 * std::max(1.0, smax)) ++rank;
        MatrixXcd rb = svd.matrixU().leftCols(rank).cast<cplx>();
        if (rank == q.cols()) real_result.push_back(rb);
      }
    }
    std::vector<MatrixXcd> dedup;
    for (const auto& q : real_result) {
      bool dup = false;
      for (const auto& e : dedup)
        if (o_same(e, q)) dup = true;
      if (!dup) dedup.push_back(q);
    }
    return dedup;
  }
  return result;
}

struct OracleCore {
  MatrixXcd maxdest;
  double delta0;
};

OracleCore oracle_maxdest(const Monodromy& v, const DegreeFunctional& d,
                          const std::vector<MatrixXcd>& subs) {
  int r = v.rank();
  double mu = d.slope(v);
  double delta0 = mu;
  for (const auto& q : subs) delta0 = std::max(delta0, o_slope(v, d, q));
  double tie = slope_tie_tol(delta0);
  if (delta0 <= mu + tie) return {MatrixXcd::Identity(r, r), delta0};
  MatrixXcd join(r, 0);
  for (const auto& q : subs) {
    if (o_slope(v, d, q) >= delta0 - tie) {
      MatrixXcd joined(r, join.cols() + q.cols());
      joined << join, q;
      join = o_orth(joined);
    }
  }
  return {join, delta0};
}

}  // namespace

OracleReport oracle_analyze(const Monodromy& v, const DegreeFunctional& d) {
  if (v.rank() > 4) fail("OracleInfeasible", "oracle handles rank <= 4");
  if (!v.commuting()) fail("OracleInfeasible", "oracle handles commuting generators");

  OracleReport rep;
  rep.subspaces = enumerate_subspaces(v);

  OracleCore mc = oracle_maxdest(v, d, rep.subspaces);
  rep.max_destabilizing = mc.maxdest;
  rep.delta0 = mc.delta0;

  // Harder-Narasimhan by recursion on compressions to the complement.
  {
    Monodromy cur = v;
    MatrixXcd lift = MatrixXcd::Identity(v.rank(), v.rank());
    MatrixXcd accumulated(v.rank(), 0);
    for (int guard = 0; guard <= v.rank(); ++guard) {
      std::vector<MatrixXcd> subs = enumerate_subspaces(cur);
      OracleCore step = oracle_maxdest(cur, d, subs);
      MatrixXcd basis_inV(v.rank(), accumulated.cols() + (lift * step.maxdest).cols());
      basis_inV << accumulated, lift * step.maxdest;
      basis_inV = o_orth(basis_inV);
      rep.hn_bases.push_back(basis_inV);
      rep.hn_ranks.push_back(static_cast<int>(basis_inV.cols()));
      rep.hn_slopes.push_back(step.delta0);
      if (static_cast<int>(step.maxdest.cols()) == cur.rank()) break;
      // compress to the orthogonal complement of the destabilizer
      MatrixXcd p = step.maxdest * step.maxdest.adjoint();
      MatrixXcd qc = o_orth(MatrixXcd::Identity(cur.rank(), cur.rank()) - p);
      std::vector<MatrixXcd> qgens;
      double qimag = 0.0;
      for (int i = 0; i < cur.generator_count(); ++i) {
        qgens.push_back((qc.adjoint() * cur.gen(i) * qc).eval());
        qimag = std::max(qimag, qgens.back().imag().cwiseAbs().maxCoeff());
      }
      Field qf = (cur.field() == Field::Real && qimag < 1e-9) ? Field::Real : Field::Complex;
      if (qf == Field::Real)
        for (auto& qg : qgens) qg = qg.real().cast<cplx>();
      if (cur.manifold())
        cur = Monodromy(cur.manifold(), qf, std::move(qgens));
      else
        cur = Monodromy(cur.generator_count(), cur.relators(), qf, std::move(qgens));
      lift = lift * qc;  // exact isometry; re-orthonormalizing would scramble coordinates
      accumulated = basis_inV;
    }
  }

  // Classification.
  double mu = d.slope(v);
  double tie = slope_tie_tol(std::max(std::abs(mu), rep.delta0));
  bool semistable = rep.delta0 <= mu + tie;
  bool has_slope_mu_proper = false;
  for (const auto& q : rep.subspaces)
    if (o_slope(v, d, q) >= mu - tie) has_slope_mu_proper = true;
  bool all_diag = true;
  for (int i = 0; i < v.generator_count(); ++i)
    if (!o_diagonalizable(v.gen(i))) all_diag = false;

  if (!semistable) {
    rep.verdict = StabilityVerdict::Unstable;
  } else if (!has_slope_mu_proper) {
    rep.verdict = StabilityVerdict::Stable;
  } else if (all_diag) {
    rep.verdict = StabilityVerdict::PolystableNotStable;
  } else {
    rep.verdict = StabilityVerdict::SemistableNotPolystable;
  }

  // Socle: join of semisimple slope-mu subbundles (diagonalizable
  // restrictions), for semistable bundles.
  if (semistable) {
    int r = v.rank();
    MatrixXcd join(r, 0);
    std::vector<MatrixXcd> cands = rep.subspaces;
    if (all_diag) {
      join = MatrixXcd::Identity(r, r);
    } else {
      for (const auto& q : cands) {
        if (std::abs(o_slope(v, d, q) - mu) > tie) continue;
        bool diag = true;
        for (int i = 0; i < v.generator_count(); ++i)
          if (!o_diagonalizable((q.adjoint() * v.gen(i) * q).eval())) diag = false;
        if (!diag) continue;
        MatrixXcd joined(r, join.cols() + q.cols());
        joined << join, q;
        join = o_orth(joined);
      }
    }
    rep.socle_basis = join;
  }
  return rep;
}

}  // namespace ahe
