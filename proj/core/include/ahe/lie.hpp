#pragma once

#include "ahe/filtration.hpp"
#include "ahe/heat_flow.hpp"

namespace ahe {

enum class GroupFamily { GL_C, SL_C, SO_C, Sp_C, GL_R, SL_R };

std::string to_string(GroupFamily f);
GroupFamily group_family_from_string(const std::string& s);

// Matrix reductive group with a precomputed Lie algebra basis, structure
// constants, and the (nondegenerate) trace form.
class ReductiveGroupSpec {
 public:
  static ReductiveGroupSpec make(GroupFamily family, int n);

  GroupFamily family() const { return family_; }
  int defining_size() const { return n_; }
  int lie_dim() const { return static_cast<int>(basis_.size()); }
  int lie_rank() const;               // rank of the root system (Cartan dim)
  int borel_dim() const;              // dim of a Borel subalgebra
  bool is_real() const { return family_ == GroupFamily::GL_R || family_ == GroupFamily::SL_R; }
  GroupFamily complexified_family() const;

  const std::vector<MatrixXcd>& algebra_basis() const { return basis_; }
  // coordinates of X in the basis, via the trace form
  VectorXcd algebra_coords(const MatrixXcd& x) const;
  MatrixXcd algebra_element(const VectorXcd& coords) const;
  // bracket in coordinates
  VectorXcd bracket_coords(const VectorXcd& a, const VectorXcd& b) const;

  double membership_residual(const MatrixXcd& g) const;
  double trace_form_min_singular() const;  // nondegeneracy margin

 private:
  GroupFamily family_;
  int n_;
  std::vector<MatrixXcd> basis_;
  MatrixXcd gram_;      // B(b_i, b_j) = tr(b_i b_j)
  MatrixXcd gram_inv_;
};

// Flat principal bundle for a matrix group: monodromy in the defining
// representation with verified group membership.
class PrincipalBundle {
 public:
  PrincipalBundle(const AffineManifold* manifold, ReductiveGroupSpec spec,
                  std::vector<MatrixXcd> generators);
  PrincipalBundle(int generator_count, std::vector<Word> relators, ReductiveGroupSpec spec,
                  std::vector<MatrixXcd> generators);

  const ReductiveGroupSpec& spec() const { return spec_; }
  const Monodromy& defining() const { return defining_; }
  const AffineManifold& manifold() const;
  double membership_residual() const;
  void validate() const;

 private:
  ReductiveGroupSpec spec_;
  Monodromy defining_;
};

// Monodromy of the adjoint vector bundle: Ad(rho(g)) on the Lie algebra in
// the precomputed basis.
Monodromy ad_bundle(const PrincipalBundle& e);

bool is_semistable_principal(const PrincipalBundle& e, const DegreeFunctional& d,
                             std::uint64_t seed = 0x5eedu);
bool is_polystable_principal(const PrincipalBundle& e, const DegreeFunctional& d,
                             std::uint64_t seed = 0x5eedu);

struct InvariantSubalgebraReport {
  MatrixXcd middle_term;  // basis inside the Lie-algebra coordinate space
  Filtration filtration;
  int length = 0;
  bool length_odd = false;
  double invariance_residual = 0.0;
  double bracket_closure_residual = 0.0;
  int borel_candidate_dim = 0;
  int borel_expected_dim = 0;
  bool certificates_pass = false;
  SearchStatus status = SearchStatus::Heuristic;
};

// Middle term of the Harder-Narasimhan filtration of ad(E), with the
// parabolic-subalgebra certificates.
InvariantSubalgebraReport hn_reduction(const PrincipalBundle& e, const DegreeFunctional& d,
                                       std::uint64_t seed = 0x5eedu);

// Middle term of the socle filtration of ad(E) (semistable bundles).
InvariantSubalgebraReport socle_reduction(const PrincipalBundle& e, const DegreeFunctional& d,
                                          std::uint64_t seed = 0x5eedu);

PrincipalBundle complexify_principal(const PrincipalBundle& e);

struct RealComplexEquivalence {
  bool semistable_real = false, semistable_complex = false;
  bool polystable_real = false, polystable_complex = false;
  double conjugation_invariance = 0.0;  // of the maximal semistable subbundle of ad ⊗ C
  bool consistent = false;
};
RealComplexEquivalence equivalence_check(const PrincipalBundle& e, const DegreeFunctional& d,
                                         std::uint64_t seed = 0x5eedu);

struct HEPrincipalReport {
  FlowReport ad_flow;
  std::optional<FlowReport> defining_flow;  // GL / SL families
  double centrality_residual = 0.0;
  double trace_constancy = 0.0;       // GL families, defining rep
  double bracket_residual = 0.0;      // covariant constancy of the bracket tensor
  double conjugation_residual = 0.0;  // real families
  bool pass = false;
};

HEPrincipalReport he_structure_principal(const PrincipalBundle& e, const MetricField& g,
                                         const FlowParams& params = {}, std::uint64_t seed = 0x5eedu);

}  // namespace ahe
