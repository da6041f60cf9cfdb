#pragma once

#include "ahe/monodromy.hpp"

namespace ahe {

// Certification level of a subspace search.
//   CompleteCommuting:  joint generalized eigenspace analysis, complete.
//   CertifiedExhaustive: rank <= 4 randomized search with the documented
//                        exhaustive eigenspace-sum protocol.
//   Heuristic:          randomized search only.
enum class SearchStatus { CompleteCommuting, CertifiedExhaustive, Heuristic };

std::string to_string(SearchStatus s);

// One atom of the joint spectral decomposition for commuting generators:
// a joint generalized eigenspace (complex case), or its realification /
// conjugate-pair merge (real case).
struct SpectralAtom {
  MatrixXcd basis;                  // orthonormal columns in the ambient fiber
  VectorXcd joint_eigenvalues;      // one representative eigenvalue per generator
  std::vector<MatrixXcd> chain;     // canonical nested submodules, ambient coords
  std::vector<int> chain_dims;      // dims of the chain entries (strictly increasing)
  MatrixXcd socle;                  // joint kernel of the nilpotent parts (ambient coords)
  bool semisimple = false;          // nilpotent parts vanish
  bool unique_chain = false;        // the dim-m submodule is unique for every m
  bool conjugate_pair = false;      // real field: realified chi + conj(chi) pair
  int dim() const { return static_cast<int>(basis.cols()); }
  // log|det| of the restricted monodromy per generator, divided by dim:
  // the per-unit-rank determinant character density of the atom.
  VectorXd character_density;
};

// Joint spectral atoms for commuting generators over the bundle's field.
// Empty result when the generators do not commute.
std::optional<std::vector<SpectralAtom>> spectral_atoms(const Monodromy& a);

struct InvariantSubspace {
  MatrixXcd basis;  // orthonormal r x k
  bool isolated = true;
  // For the commuting path: multiplicity drawn from each atom.
  std::vector<int> atom_multiplicity;
  std::string family;  // human-readable family description, empty if isolated
};

struct SubspaceSearch {
  SearchStatus status = SearchStatus::Heuristic;
  std::vector<InvariantSubspace> spaces;
};

// All invariant k-dimensional subspaces (isolated representatives plus one
// representative per continuous family). Complete for commuting generators;
// randomized with the documented protocol otherwise.
SubspaceSearch invariant_subspaces(const Monodromy& a, int k, std::uint64_t seed = 0x5eedu);

// Every proper invariant subspace (dimension 1..rank-1, same contract).
SubspaceSearch all_invariant_subspaces(const Monodromy& a, std::uint64_t seed = 0x5eedu);

bool is_irreducible(const Monodromy& a, std::uint64_t seed = 0x5eedu);

struct Decomposition {
  bool completely_reducible = false;
  std::vector<MatrixXcd> summands;  // invariant, pairwise complementary
  SearchStatus status = SearchStatus::Heuristic;
};

// Split into indecomposable summands via random commutant elements
// (Fitting decomposition); deterministic for a fixed seed.
std::vector<MatrixXcd> fitting_summands(const Monodromy& a, std::uint64_t seed = 0x5eedu);

// Decomposition into irreducible summands when one exists.
Decomposition complete_reduction(const Monodromy& a, std::uint64_t seed = 0x5eedu);

// Commutant of the representation over its field of definition.
std::vector<MatrixXcd> commutant_basis(const Monodromy& a);

}  // namespace ahe
