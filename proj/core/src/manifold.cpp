#include "ahe/manifold.hpp"

#include <cmath>
#include <deque>

namespace ahe {

std::vector<Word> commutator_relators(int generator_count) {
  std::vector<Word> rel;
  for (int i = 1; i <= generator_count; ++i)
    for (int j = i + 1; j <= generator_count; ++j) rel.push_back({i, j, -i, -j});
  return rel;
}

AffineManifold::AffineManifold(int dim, ManifoldKind kind, std::vector<AffineMap> generators,
                               std::vector<Word> relators, int grid_resolution)
    : dim_(dim), kind_(kind), gens_(std::move(generators)), relators_(std::move(relators)),
      N_(grid_resolution) {
  if (dim_ < 1) fail("BadManifold", "dimension must be positive");
  if (N_ < 4 * halo) fail("BadManifold", "grid resolution too small for the stencil halo");
  for (const auto& g : gens_) {
    if (g.A.rows() != dim_ || g.A.cols() != dim_ || g.b.size() != dim_)
      fail("BadManifold", "generator shape does not match the manifold dimension");
  }
  npoints_ = 1;
  for (int i = 0; i < dim_; ++i) npoints_ *= N_;
  cell_volume_ = std::pow(1.0 / N_, dim_);
}

void AffineManifold::build_integer_actions() const {
  // Integer grid actions. Ghost transport needs deck maps that send grid
  // points to grid points: integer linear part and N*b integral.
  for (const auto& g : gens_) {
    Eigen::MatrixXi A(dim_, dim_);
    VectorXi nb(dim_);
    for (int r = 0; r < dim_; ++r) {
      for (int c = 0; c < dim_; ++c) {
        double v = g.A(r, c);
        A(r, c) = static_cast<int>(std::lround(v));
        if (std::abs(v - A(r, c)) > 1e-9)
          fail("GridIncompatible", "generator linear part is not integral");
      }
      double bv = g.b(r) * N_;
      nb(r) = static_cast<int>(std::lround(bv));
      if (std::abs(bv - nb(r)) > 1e-9)
        fail("GridIncompatible", "generator translation is not a multiple of 1/N");
    }
    Ai_.push_back(A);
    Nbi_.push_back(nb);
    MatrixXd inv = g.A.inverse();
    Eigen::MatrixXi Ain(dim_, dim_);
    for (int r = 0; r < dim_; ++r)
      for (int c = 0; c < dim_; ++c) {
        Ain(r, c) = static_cast<int>(std::lround(inv(r, c)));
        if (std::abs(inv(r, c) - Ain(r, c)) > 1e-9)
          fail("GridIncompatible", "generator inverse is not integral");
      }
    Ai_inv_.push_back(Ain);
  }
}

void AffineManifold::ensure_ghost_table() const {
  if (ghost_built_) return;
  build_integer_actions();
  // Identity word is id 0.
  word_maps_.push_back(AffineMap::identity(dim_));
  word_letters_.push_back({});
  word_ids_[{}] = 0;
  build_ghost_table();
  ghost_built_ = true;
}

AffineManifold AffineManifold::torus(int dim, int grid_resolution) {
  std::vector<AffineMap> gens;
  for (int i = 0; i < dim; ++i) {
    AffineMap g = AffineMap::identity(dim);
    g.b(i) = 1.0;
    gens.push_back(g);
  }
  return AffineManifold(dim, ManifoldKind::Torus, std::move(gens), commutator_relators(dim),
                        grid_resolution);
}

AffineManifold AffineManifold::heisenberg(int grid_resolution) {
  // gamma(p,q,r): (x,y,z) -> (x+p, y+q, z+p*y+r) for (1,0,0), (0,1,0), (0,0,1).
  auto make = [](int p, int q, int r) {
    AffineMap g = AffineMap::identity(3);
    g.A(2, 1) = p;
    g.b(0) = p;
    g.b(1) = q;
    g.b(2) = r;
    return g;
  };
  std::vector<AffineMap> gens{make(1, 0, 0), make(0, 1, 0), make(0, 0, 1)};
  // [g1,g2] = g3, and g3 is central.
  std::vector<Word> rel{{1, 2, -1, -2, -3}, {1, 3, -1, -3}, {2, 3, -2, -3}};
  return AffineManifold(3, ManifoldKind::TwistedQuotient, std::move(gens), std::move(rel),
                        grid_resolution);
}

AffineMap AffineManifold::evaluate_word(const Word& w) const {
  // Word letters compose left-to-right: {1,2,-1} means g1 ∘ g2 ∘ g1^{-1}.
  AffineMap m = AffineMap::identity(dim_);
  for (int letter : w) {
    int idx = std::abs(letter) - 1;
    if (idx < 0 || idx >= generator_count()) fail("BadWord", "relator letter out of range");
    const AffineMap& g = gens_[idx];
    m = m.compose(letter > 0 ? g : g.inverse());
  }
  return m;
}

ValidationReport AffineManifold::validate() const {
  ValidationReport rep;
  for (const auto& g : gens_) rep.det_deviation.push_back(std::abs(g.A.determinant() - 1.0));
  for (const auto& w : relators_) rep.relation_residual.push_back(evaluate_word(w).identity_residual());
  rep.max_det_deviation =
      rep.det_deviation.empty() ? 0.0 : *std::max_element(rep.det_deviation.begin(), rep.det_deviation.end());
  rep.max_relation_residual = rep.relation_residual.empty()
                                  ? 0.0
                                  : *std::max_element(rep.relation_residual.begin(), rep.relation_residual.end());
  rep.valid = rep.max_det_deviation < tol::special_det && rep.max_relation_residual < tol::manifold_relation;
  return rep;
}

long AffineManifold::index_of(const VectorXi& k) const {
  long idx = 0;
  for (int i = dim_ - 1; i >= 0; --i) idx = idx * N_ + k(i);
  return idx;
}

VectorXi AffineManifold::coords_of(long idx) const {
  VectorXi k(dim_);
  for (int i = 0; i < dim_; ++i) {
    k(i) = static_cast<int>(idx % N_);
    idx /= N_;
  }
  return k;
}

VectorXd AffineManifold::point(long idx) const {
  VectorXi k = coords_of(idx);
  VectorXd x(dim_);
  for (int i = 0; i < dim_; ++i) x(i) = static_cast<double>(k(i)) / N_;
  return x;
}

int AffineManifold::intern_word(const Letters& letters) const {
  auto it = word_ids_.find(letters);
  if (it != word_ids_.end()) return it->second;
  AffineMap m = AffineMap::identity(dim_);
  for (auto [gi, sign] : letters) {
    const AffineMap& g = gens_[gi];
    m = m.compose(sign > 0 ? g : g.inverse());  // letters left-to-right
  }
  int id = static_cast<int>(word_maps_.size());
  word_maps_.push_back(m);
  word_letters_.push_back(letters);
  word_ids_[letters] = id;
  return id;
}

void AffineManifold::build_ghost_table() const {
  auto in_range = [&](const VectorXi& p) {
    for (int i = 0; i < dim_; ++i)
      if (p(i) < 0 || p(i) >= N_) return false;
    return true;
  };
  auto apply_gen_inverse = [&](int gi, const VectorXi& p) -> VectorXi {
    return Ai_inv_[gi] * (p - Nbi_[gi]);
  };

  // BFS over deck words, deterministic order. State carries the letters of
  // the *inverse* word applied so far; the resolved word is their reversal
  // with flipped signs.
  auto bfs_resolve = [&](const VectorXi& start) -> std::optional<Ghost> {
    struct State {
      VectorXi p;
      Letters inv_letters;
    };
    std::deque<State> queue{{start, {}}};
    std::map<std::vector<int>, bool> seen;
    auto keyed = [&](const VectorXi& p) {
      return std::vector<int>(p.data(), p.data() + p.size());
    };
    seen[keyed(start)] = true;
    const int max_depth = 8;
    while (!queue.empty()) {
      State s = queue.front();
      queue.pop_front();
      if (in_range(s.p)) {
        // A recorded letter (g, +1) means g^{-1} was applied to the point, so
        // ghost = g^{+1} ∘ ... (interior); the resolved word is inv_letters
        // read left-to-right with the recorded signs.
        return Ghost{index_of(s.p), intern_word(s.inv_letters)};
      }
      if (static_cast<int>(s.inv_letters.size()) >= max_depth) continue;
      for (int gi = 0; gi < generator_count(); ++gi) {
        for (int sign : {+1, -1}) {
          VectorXi q = sign > 0 ? apply_gen_inverse(gi, s.p)
                                : VectorXi(Ai_[gi] * s.p + Nbi_[gi]);
          auto key = keyed(q);
          if (seen.count(key)) continue;
          seen[key] = true;
          Letters l = s.inv_letters;
          l.emplace_back(gi, sign);
          queue.push_back({q, l});
        }
      }
    }
    return std::nullopt;
  };

  // Pre-resolve the axis-aligned halo: every k ± m e_axis that leaves the
  // fundamental domain for m <= halo.
  for (long idx = 0; idx < npoints_; ++idx) {
    VectorXi k = coords_of(idx);
    for (int axis = 0; axis < dim_; ++axis) {
      if (k(axis) >= halo && k(axis) < N_ - halo) continue;
      for (int off = -halo; off <= halo; ++off) {
        if (off == 0) continue;
        VectorXi p = k;
        p(axis) += off;
        if (in_range(p)) continue;
        std::vector<int> key(p.data(), p.data() + p.size());
        if (ghost_cache_.count(key)) continue;
        auto g = bfs_resolve(p);
        if (!g) fail("GhostUnresolved", "deck word search failed for a halo point");
        ghost_cache_[key] = *g;
      }
    }
  }
}

AffineManifold::Ghost AffineManifold::resolve(const VectorXi& k) const {
  ensure_ghost_table();
  bool inside = true;
  for (int i = 0; i < dim_; ++i)
    if (k(i) < 0 || k(i) >= N_) inside = false;
  if (inside) return {index_of(k), 0};
  std::vector<int> key(k.data(), k.data() + k.size());
  auto it = ghost_cache_.find(key);
  if (it == ghost_cache_.end()) fail("GhostUnresolved", "point outside the precomputed halo");
  return it->second;
}

AffineManifold::Ghost AffineManifold::neighbor(long idx, int axis, int offset) const {
  VectorXi k = coords_of(idx);
  k(axis) += offset;
  return resolve(k);
}

}  // namespace ahe
