#pragma once

#include <optional>

#include "ahe/manifold.hpp"

namespace ahe {

enum class Field { Real, Complex };

// A flat bundle presented by its monodromy representation: one invertible
// matrix per generator of the deck group (or of an abstract finitely
// presented group in synthetic mode).
class Monodromy {
 public:
  // Manifold-tied bundle; relators are taken from the manifold.
  Monodromy(const AffineManifold* manifold, Field field, std::vector<MatrixXcd> generators);
  // Synthetic mode: abstract group with declared relators (possibly none).
  Monodromy(int generator_count, std::vector<Word> relators, Field field,
            std::vector<MatrixXcd> generators);

  int rank() const { return rank_; }
  Field field() const { return field_; }
  int generator_count() const { return static_cast<int>(gens_.size()); }
  const MatrixXcd& gen(int i) const { return gens_[i]; }
  const MatrixXcd& gen_inverse(int i) const { return gen_inv_[i]; }
  const std::vector<MatrixXcd>& generators() const { return gens_; }
  const std::vector<Word>& relators() const { return relators_; }
  const AffineManifold* manifold() const { return manifold_; }
  bool synthetic() const { return manifold_ == nullptr; }

  // True after complexify(); the entrywise conjugation involution is then a
  // valid bundle automorphism and invariance checks against it make sense.
  bool conjugation_tracked() const { return conjugation_tracked_; }

  double relation_residual() const;
  double min_abs_det() const;
  void validate() const;

  bool commuting(double rel_tol = 1e-10) const;

  MatrixXcd word_matrix(const Word& w) const;
  MatrixXcd word_matrix(const Letters& letters) const;

  // Determinant character per generator: log |det rho(g_i)|.
  VectorXd log_abs_det_character() const;

  static Monodromy tensor(const Monodromy& a, const Monodromy& b);
  static Monodromy dual(const Monodromy& a);
  static Monodromy wedge_power(const Monodromy& a, int j);
  static Monodromy hom(const Monodromy& a, const Monodromy& b);  // Hom(a, b)
  static Monodromy direct_sum(const Monodromy& a, const Monodromy& b);
  static Monodromy complexify(const Monodromy& a);

 private:
  void check_shapes();

  const AffineManifold* manifold_ = nullptr;
  int abstract_generator_count_ = 0;
  std::vector<Word> relators_;
  Field field_;
  int rank_;
  std::vector<MatrixXcd> gens_;
  std::vector<MatrixXcd> gen_inv_;
  bool conjugation_tracked_ = false;
};

// A flat subbundle as a monodromy-invariant subspace of the fiber.
class FlatSubbundle {
 public:
  FlatSubbundle(const Monodromy& parent, const MatrixXcd& span_columns);

  const Monodromy& parent() const { return parent_; }
  const MatrixXcd& basis() const { return basis_; }  // orthonormal r x k
  int dim() const { return static_cast<int>(basis_.cols()); }

  // max over generators of ||(I - P) rho(g) P||.
  double invariance_residual() const;
  void validate() const;

  // Monodromy restricted to the subspace (basis-coordinates).
  Monodromy restricted() const;

 private:
  Monodromy parent_;
  MatrixXcd basis_;
};

// Monodromy induced on the quotient fiber V / s (orthogonal-complement model).
Monodromy quotient(const Monodromy& a, const FlatSubbundle& s);

// Orthonormal basis of the orthogonal complement of the subbundle.
MatrixXcd orthogonal_complement(const MatrixXcd& basis, int ambient_dim);

// Compound matrix: rows/cols indexed by increasing k-subsets, entries are
// k x k minors. Used for exterior powers and for form-index transport.
MatrixXcd compound_matrix(const MatrixXcd& m, int k);
MatrixXd compound_matrix(const MatrixXd& m, int k);

// Increasing multi-index table for fixed (n, k).
class MultiIndexTable {
 public:
  MultiIndexTable(int n, int k);
  int size() const { return static_cast<int>(subsets_.size()); }
  const std::vector<int>& subset(int idx) const { return subsets_[idx]; }
  int index_of(const std::vector<int>& sorted_subset) const;
  // Merge two disjoint sorted subsets; sign of the interleaving permutation.
  // Returns sign 0 when the subsets overlap.
  static std::pair<int, std::vector<int>> merge(const std::vector<int>& a, const std::vector<int>& b);

 private:
  int n_, k_;
  std::vector<std::vector<int>> subsets_;
  std::map<std::vector<int>, int> lookup_;
};

}  // namespace ahe
