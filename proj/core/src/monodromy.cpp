#include "ahe/monodromy.hpp"

#include <functional>

#include <unsupported/Eigen/KroneckerProduct>

namespace ahe {

Monodromy::Monodromy(const AffineManifold* manifold, Field field, std::vector<MatrixXcd> generators)
    : manifold_(manifold), field_(field), gens_(std::move(generators)) {
  if (!manifold_) fail("BadBundle", "null manifold; use the synthetic constructor");
  relators_ = manifold_->relators();
  abstract_generator_count_ = manifold_->generator_count();
  check_shapes();
}

Monodromy::Monodromy(int generator_count, std::vector<Word> relators, Field field,
                     std::vector<MatrixXcd> generators)
    : manifold_(nullptr), abstract_generator_count_(generator_count), relators_(std::move(relators)),
      field_(field), gens_(std::move(generators)) {
  check_shapes();
}

void Monodromy::check_shapes() {
  if (gens_.empty()) fail("BadBundle", "at least one generator matrix required");
  if (static_cast<int>(gens_.size()) != abstract_generator_count_)
    fail("BadBundle", "generator count mismatch between group and bundle");
  rank_ = static_cast<int>(gens_[0].rows());
  for (const auto& g : gens_) {
    if (g.rows() != rank_ || g.cols() != rank_) fail("BadBundle", "generator matrices must be square and equal-sized");
    if (std::abs(g.determinant()) <= tol::special_det) fail("BadBundle", "generator matrix is singular");
  }
  if (field_ == Field::Real) {
    for (const auto& g : gens_)
      if (g.imag().cwiseAbs().maxCoeff() > 1e-12)
        fail("FieldMismatch", "real bundle with non-real generator entries");
  }
  gen_inv_.clear();
  for (const auto& g : gens_) gen_inv_.push_back(g.inverse());
}

double Monodromy::relation_residual() const {
  double worst = 0.0;
  for (const auto& w : relators_) {
    MatrixXcd m = word_matrix(w);
    worst = std::max(worst, (m - MatrixXcd::Identity(rank_, rank_)).cwiseAbs().maxCoeff());
  }
  return worst;
}

double Monodromy::min_abs_det() const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& g : gens_) d = std::min(d, std::abs(g.determinant()));
  return d;
}

void Monodromy::validate() const {
  if (min_abs_det() <= tol::special_det) fail("BadBundle", "singular generator");
  double rr = relation_residual();
  if (rr > tol::monodromy_relation)
    fail("RelationViolation", "group relations violated, residual " + std::to_string(rr));
}

bool Monodromy::commuting(double rel_tol) const {
  double scale = 0.0;
  for (const auto& g : gens_) scale = std::max(scale, g.cwiseAbs().maxCoeff());
  double t = rel_tol * std::max(1.0, scale * scale);
  for (std::size_t i = 0; i < gens_.size(); ++i)
    for (std::size_t j = i + 1; j < gens_.size(); ++j)
      if ((gens_[i] * gens_[j] - gens_[j] * gens_[i]).cwiseAbs().maxCoeff() > t) return false;
  return true;
}

MatrixXcd Monodromy::word_matrix(const Word& w) const {
  MatrixXcd m = MatrixXcd::Identity(rank_, rank_);
  for (int letter : w) {
    int idx = std::abs(letter) - 1;
    if (idx < 0 || idx >= generator_count()) fail("BadWord", "word letter out of range");
    m = m * (letter > 0 ? gens_[idx] : gen_inv_[idx]);
  }
  return m;
}

MatrixXcd Monodromy::word_matrix(const Letters& letters) const {
  MatrixXcd m = MatrixXcd::Identity(rank_, rank_);
  for (auto [gi, sign] : letters) m = m * (sign > 0 ? gens_[gi] : gen_inv_[gi]);
  return m;
}

VectorXd Monodromy::log_abs_det_character() const {
  VectorXd v(generator_count());
  for (int i = 0; i < generator_count(); ++i) v(i) = std::log(std::abs(gens_[i].determinant()));
  return v;
}

namespace {
void require_same_group(const Monodromy& a, const Monodromy& b) {
  if (a.field() != b.field()) fail("FieldMismatch", "bundles over different scalar fields");
  if (a.generator_count() != b.generator_count() || a.manifold() != b.manifold())
    fail("GroupMismatch", "bundles over different groups");
}

Monodromy rebuild(const Monodromy& model, Field field, std::vector<MatrixXcd> gens) {
  if (model.manifold()) return Monodromy(model.manifold(), field, std::move(gens));
  return Monodromy(model.generator_count(), model.relators(), field, std::move(gens));
}
}  // namespace

Monodromy Monodromy::tensor(const Monodromy& a, const Monodromy& b) {
  require_same_group(a, b);
  std::vector<MatrixXcd> gens;
  for (int i = 0; i < a.generator_count(); ++i)
    gens.push_back(Eigen::kroneckerProduct(a.gen(i), b.gen(i)).eval());
  return rebuild(a, a.field(), std::move(gens));
}

Monodromy Monodromy::dual(const Monodromy& a) {
  std::vector<MatrixXcd> gens;
  for (int i = 0; i < a.generator_count(); ++i) gens.push_back(a.gen_inverse(i).transpose().eval());
  return rebuild(a, a.field(), std::move(gens));
}

Monodromy Monodromy::wedge_power(const Monodromy& a, int j) {
  if (j < 1 || j > a.rank()) fail("RankOutOfRange", "exterior power degree out of range");
  std::vector<MatrixXcd> gens;
  for (int i = 0; i < a.generator_count(); ++i) gens.push_back(compound_matrix(a.gen(i), j));
  return rebuild(a, a.field(), std::move(gens));
}

Monodromy Monodromy::hom(const Monodromy& a, const Monodromy& b) {
  require_same_group(a, b);
  // X -> rho_b X rho_a^{-1}; with column-major vec this is rho_a^{-T} ⊗ rho_b.
  std::vector<MatrixXcd> gens;
  for (int i = 0; i < a.generator_count(); ++i)
    gens.push_back(Eigen::kroneckerProduct(a.gen_inverse(i).transpose().eval(), b.gen(i)).eval());
  return rebuild(a, a.field(), std::move(gens));
}

Monodromy Monodromy::direct_sum(const Monodromy& a, const Monodromy& b) {
  require_same_group(a, b);
  std::vector<MatrixXcd> gens;
  for (int i = 0; i < a.generator_count(); ++i) {
    MatrixXcd m = MatrixXcd::Zero(a.rank() + b.rank(), a.rank() + b.rank());
    m.topLeftCorner(a.rank(), a.rank()) = a.gen(i);
    m.bottomRightCorner(b.rank(), b.rank()) = b.gen(i);
    gens.push_back(m);
  }
  return rebuild(a, a.field(), std::move(gens));
}

Monodromy Monodromy::complexify(const Monodromy& a) {
  if (a.field() == Field::Complex) fail("AlreadyComplex", "bundle is already complex");
  Monodromy c = rebuild(a, Field::Complex, a.generators());
  c.conjugation_tracked_ = true;
  return c;
}

FlatSubbundle::FlatSubbundle(const Monodromy& parent, const MatrixXcd& span_columns)
    : parent_(parent), basis_(orthonormalize(span_columns)) {
  if (basis_.cols() == 0 || basis_.cols() > parent_.rank())
    fail("RankOutOfRange", "subbundle dimension must be in (0, rank]");
  if (basis_.rows() != parent_.rank()) fail("BadBundle", "subspace ambient dimension mismatch");
}

double FlatSubbundle::invariance_residual() const {
  const MatrixXcd& q = basis_;
  int r = parent_.rank();
  MatrixXcd p = q * q.adjoint();
  MatrixXcd rest = MatrixXcd::Identity(r, r) - p;
  double worst = 0.0;
  for (int i = 0; i < parent_.generator_count(); ++i) {
    double scale = std::max(1.0, parent_.gen(i).norm());
    worst = std::max(worst, (rest * parent_.gen(i) * p).norm() / scale);
  }
  return worst;
}

void FlatSubbundle::validate() const {
  if (invariance_residual() > tol::invariance)
    fail("NotInvariant", "subspace is not monodromy-invariant");
}

Monodromy FlatSubbundle::restricted() const {
  std::vector<MatrixXcd> gens;
  for (int i = 0; i < parent_.generator_count(); ++i)
    gens.push_back((basis_.adjoint() * parent_.gen(i) * basis_).eval());
  // Restriction of a real bundle to the realified span keeps real entries
  // only when the basis is real; restricted subbundles are tracked over C
  // for real parents with complex bases.
  Field f = parent_.field();
  if (f == Field::Real) {
    for (const auto& g : gens)
      if (g.imag().cwiseAbs().maxCoeff() > 1e-10) {
        f = Field::Complex;
        break;
      }
  }
  std::vector<MatrixXcd> cleaned = gens;
  if (f == Field::Real)
    for (auto& g : cleaned) g = g.real().cast<cplx>();
  if (parent_.manifold()) return Monodromy(parent_.manifold(), f, std::move(cleaned));
  return Monodromy(parent_.generator_count(), parent_.relators(), f, std::move(cleaned));
}

MatrixXcd orthogonal_complement(const MatrixXcd& basis, int ambient_dim) {
  MatrixXcd p = MatrixXcd::Identity(ambient_dim, ambient_dim) - basis * basis.adjoint();
  return orthonormalize(p);
}

Monodromy quotient(const Monodromy& a, const FlatSubbundle& s) {
  s.validate();
  MatrixXcd qc = orthogonal_complement(s.basis(), a.rank());
  if (qc.cols() + s.basis().cols() != a.rank()) fail("RankOutOfRange", "complement dimension mismatch");
  if (qc.cols() == 0) fail("RankOutOfRange", "quotient of the bundle by itself is empty");
  std::vector<MatrixXcd> gens;
  for (int i = 0; i < a.generator_count(); ++i) gens.push_back((qc.adjoint() * a.gen(i) * qc).eval());
  Field f = a.field();
  if (f == Field::Real) {
    for (const auto& g : gens)
      if (g.imag().cwiseAbs().maxCoeff() > 1e-10) {
        f = Field::Complex;
        break;
      }
  }
  if (a.manifold()) return Monodromy(a.manifold(), f, std::move(gens));
  return Monodromy(a.generator_count(), a.relators(), f, std::move(gens));
}

MultiIndexTable::MultiIndexTable(int n, int k) : n_(n), k_(k) {
  if (k < 0 || k > n) {
    return;  // empty table; degree overflow handled by callers
  }
  std::vector<int> cur(k);
  // Lexicographic enumeration of increasing k-subsets of {0..n-1}.
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == k) {
      lookup_[cur] = static_cast<int>(subsets_.size());
      subsets_.push_back(cur);
      return;
    }
    for (int i = start; i <= n - (k - depth); ++i) {
      cur[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  if (k == 0) {
    subsets_.push_back({});
    lookup_[{}] = 0;
  } else {
    rec(0, 0);
  }
}

int MultiIndexTable::index_of(const std::vector<int>& sorted_subset) const {
  auto it = lookup_.find(sorted_subset);
  if (it == lookup_.end()) fail("BadMultiIndex", "subset not in table");
  return it->second;
}

std::pair<int, std::vector<int>> MultiIndexTable::merge(const std::vector<int>& a,
                                                        const std::vector<int>& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  int inversions = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return {0, {}};
    if (a[i] < b[j]) {
      out.push_back(a[i++]);
    } else {
      out.push_back(b[j++]);
      inversions += static_cast<int>(a.size() - i);
    }
  }
  while (i < a.size()) out.push_back(a[i++]);
  while (j < b.size()) out.push_back(b[j++]);
  return {(inversions % 2 == 0) ? 1 : -1, out};
}

MatrixXcd compound_matrix(const MatrixXcd& m, int k) {
  int n = static_cast<int>(m.rows());
  MultiIndexTable t(n, k);
  MatrixXcd c(t.size(), t.size());
  for (int a = 0; a < t.size(); ++a) {
    for (int b = 0; b < t.size(); ++b) {
      MatrixXcd sub(k, k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sub(i, j) = m(t.subset(a)[i], t.subset(b)[j]);
      c(a, b) = sub.determinant();
    }
  }
  return c;
}

MatrixXd compound_matrix(const MatrixXd& m, int k) {
  return compound_matrix(MatrixXcd(m.cast<cplx>()), k).real();
}

}  // namespace ahe
