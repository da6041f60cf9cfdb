#pragma once

#include <functional>

#include "ahe/metric.hpp"
#include "ahe/monodromy.hpp"

namespace ahe {

// Transport law for the payload of a bundle-valued form across deck words.
//   None:              plain tensor, only the form indices transform.
//   Endomorphism:      S(gamma x) = rho S(x) rho^{-1}
//   MetricLike:        H(gamma x) = rho^{-dagger} H(x) rho^{-1}
//   AdditiveCharacter: scalar with phi(gamma x) = phi(x) + c_gamma, the
//                      constant given by an additive character of the group
//                      (log-determinant potentials). Dies after one
//                      derivative: the output of d / dbar is a plain tensor.
enum class BundleLaw { None, Endomorphism, MetricLike, AdditiveCharacter };

// Affine (p,q)-form sampled on the fundamental-domain grid. Coefficients are
// stored on strictly increasing multi-indices in each group, optionally with
// a matrix payload (endomorphism- or metric-valued forms).
class PQForm {
 public:
  PQForm(const AffineManifold& m, int p, int q, int payload = 1, BundleLaw law = BundleLaw::None,
         const Monodromy* rho = nullptr);

  static PQForm function(const AffineManifold& m,
                         const std::function<cplx(const VectorXd&)>& f);

  // Scalar (0,0)-form with an additive twist: value(gamma_i x) = value(x) +
  // addend(i). Used for log-determinant potentials of twisted bundle metrics.
  static PQForm twisted_scalar(const AffineManifold& m, const VectorXd& addend_per_generator,
                               const std::function<cplx(const VectorXd&)>& f);

  const AffineManifold& manifold() const { return *m_; }
  int p() const { return p_; }
  int q() const { return q_; }
  int payload() const { return payload_; }
  BundleLaw law() const { return law_; }
  const Monodromy* rho() const { return rho_; }
  int islots() const { return itable_.size(); }
  int jslots() const { return jtable_.size(); }
  int nslots() const { return itable_.size() * jtable_.size(); }
  const MultiIndexTable& itable() const { return itable_; }
  const MultiIndexTable& jtable() const { return jtable_; }

  Eigen::Map<MatrixXcd> at(long pt, int slot) {
    return Eigen::Map<MatrixXcd>(&data_[(pt * nslots() + slot) * payload_ * payload_], payload_, payload_);
  }
  Eigen::Map<const MatrixXcd> at(long pt, int slot) const {
    return Eigen::Map<const MatrixXcd>(&data_[(pt * nslots() + slot) * payload_ * payload_], payload_,
                                       payload_);
  }
  int slot(int islot, int jslot) const { return islot * jtable_.size() + jslot; }
  cplx scalar_at(long pt, int slot_index) const { return at(pt, slot_index)(0, 0); }
  const cplx* raw(long pt, int slot_index) const {
    return &data_[(pt * nslots() + slot_index) * payload_ * payload_];
  }

  // Value of the full slot stack at the (possibly ghost) neighbor of `pt`
  // along `axis` at `offset` steps, with all transports applied.
  // Writes nslots() payload matrices into `out`.
  void neighbor_slots(long pt, int axis, int offset, std::vector<MatrixXcd>& out) const;

  double sup_abs() const;
  double max_imag() const;

  PQForm& operator+=(const PQForm& other);
  PQForm& operator*=(cplx scale);

 private:
  friend PQForm dolbeault_d(const PQForm&);
  friend PQForm dolbeault_dbar(const PQForm&);

  const AffineManifold* m_;
  int p_, q_;
  int payload_;
  BundleLaw law_;
  const Monodromy* rho_;
  VectorXd addends_;  // per-generator additive constants (AdditiveCharacter)
  MultiIndexTable itable_, jtable_;
  std::vector<cplx> data_;

  // cached transport data per deck word id
  struct Transport {
    MatrixXcd lam_p, lam_q;  // compound matrices of A_w^{-T}
    MatrixXcd left, right;   // payload transform: value' = left * value * right
    double addend;           // AdditiveCharacter constant of the word
    bool trivial_form;       // lam matrices are identity
    bool trivial_payload;
  };
  const Transport& transport(int word_id) const;
  mutable std::vector<std::optional<Transport>> transport_cache_;
};

PQForm dolbeault_d(const PQForm& f);
PQForm dolbeault_dbar(const PQForm& f);
// Convenience: d(dbar(f)).
PQForm dolbeault_ddbar(const PQForm& f);

PQForm wedge(const PQForm& a, const PQForm& b);

// The (1,1)-form of the metric g.
PQForm omega_form(const AffineManifold& m, const MetricField& g);
// omega^k by repeated wedge; k = 0 gives the constant (0,0)-form 1.
PQForm omega_power(const AffineManifold& m, const MetricField& g, int k);

// Integral over M against the covariant-constant volume form: requires an
// (n,n)-form, returns mean of the single coefficient times the unit
// fundamental-domain volume.
cplx integrate_over_nu(const PQForm& top);

// sup-norm of dd_bar(omega^{n-1}) resp. dd_bar(omega^{d-2}).
double check_gauduchon(const AffineManifold& m, const MetricField& g);
double check_astheno(const AffineManifold& m, const MetricField& g);

}  // namespace ahe
