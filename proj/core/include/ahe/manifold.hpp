#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "ahe/common.hpp"

namespace ahe {

// Affine map x -> A x + b on R^n.
struct AffineMap {
  MatrixXd A;
  VectorXd b;

  VectorXd apply(const VectorXd& x) const { return A * x + b; }
  AffineMap compose(const AffineMap& inner) const {  // this ∘ inner
    return {A * inner.A, A * inner.b + b};
  }
  AffineMap inverse() const {
    MatrixXd ai = A.inverse();
    return {ai, -(ai * b)};
  }
  double identity_residual() const {
    int n = static_cast<int>(A.rows());
    return (A - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff();
  }
  static AffineMap identity(int n) { return {MatrixXd::Identity(n, n), VectorXd::Zero(n)}; }
};

enum class ManifoldKind { Torus, TwistedQuotient };

struct ValidationReport {
  std::vector<double> det_deviation;      // |det A_i - 1| per generator
  std::vector<double> relation_residual;  // per declared relator word
  bool valid = false;
  double max_det_deviation = 0.0;
  double max_relation_residual = 0.0;
};

// A relator is a word in generators: signed 1-based indices, e.g. {1,2,-1,-2}.
using Word = std::vector<int>;

// Letters of a resolved ghost word: (generator index 0-based, sign ±1).
using Letters = std::vector<std::pair<int, int>>;

// Compact special flat affine manifold presented by affine holonomy generators,
// with a uniform grid on the fundamental domain [0,1)^n. Grid points are k/N.
class AffineManifold {
 public:
  AffineManifold(int dim, ManifoldKind kind, std::vector<AffineMap> generators,
                 std::vector<Word> relators, int grid_resolution);

  static AffineManifold torus(int dim, int grid_resolution);
  // (x,y,z) -> (x+p, y+q, z+p*y+r) integral Heisenberg-type generators for
  // the parameter triples provided; relators must be supplied by the caller
  // through the general constructor when they differ from the defaults.
  static AffineManifold heisenberg(int grid_resolution);

  int dim() const { return dim_; }
  int resolution() const { return N_; }
  ManifoldKind kind() const { return kind_; }
  const std::vector<AffineMap>& generators() const { return gens_; }
  const std::vector<Word>& relators() const { return relators_; }
  int generator_count() const { return static_cast<int>(gens_.size()); }

  ValidationReport validate() const;

  // --- grid ---
  long npoints() const { return npoints_; }
  long index_of(const VectorXi& k) const;
  VectorXi coords_of(long idx) const;
  VectorXd point(long idx) const;  // k/N in [0,1)^n
  double cell_volume() const { return cell_volume_; }

  // --- ghost resolution ---
  // Resolve the (possibly out-of-range) integer grid point to an interior
  // point and the deck word gamma with ghost = gamma(interior).
  struct Ghost {
    long point_index;
    int word_id;  // 0 = identity word
  };
  Ghost resolve(const VectorXi& k) const;
  // Neighbor along `axis` at signed `offset` grid steps (|offset| <= halo).
  Ghost neighbor(long idx, int axis, int offset) const;

  const AffineMap& word_map(int word_id) const { return word_maps_[word_id]; }
  const Letters& word_letters(int word_id) const { return word_letters_[word_id]; }
  int word_count() const { return static_cast<int>(word_maps_.size()); }

  AffineMap evaluate_word(const Word& w) const;

  // Build the deck-word halo table (idempotent). Implicit on first ghost
  // access; call explicitly before multi-threaded grid sweeps.
  void ensure_ghost_table() const;

  static constexpr int halo = 2;  // 4th-order central stencils

 private:
  void build_integer_actions() const;
  void build_ghost_table() const;
  int intern_word(const Letters& letters) const;

  int dim_;
  ManifoldKind kind_;
  std::vector<AffineMap> gens_;
  std::vector<Word> relators_;
  int N_;
  long npoints_;
  double cell_volume_;

  // Integer actions: grid integer p -> Ai p + N bi. Built lazily with the
  // ghost table so that invalid manifolds can still be validated.
  mutable bool ghost_built_ = false;
  mutable std::vector<Eigen::MatrixXi> Ai_;
  mutable std::vector<VectorXi> Nbi_;
  mutable std::vector<Eigen::MatrixXi> Ai_inv_;

  mutable std::vector<AffineMap> word_maps_;
  mutable std::vector<Letters> word_letters_;
  mutable std::map<std::vector<int>, Ghost> ghost_cache_;
  mutable std::map<Letters, int> word_ids_;
};

// Pairwise commutator relators [i,j] for an abelian presentation.
std::vector<Word> commutator_relators(int generator_count);

}  // namespace ahe
