#pragma once

#include "ahe/forms.hpp"

namespace ahe {

// Positive-definite Hermitian bundle metric sampled on the grid, with the
// twisted transformation law H(gamma x) = rho^{-dagger} H(x) rho^{-1}.
class HermitianMetricField {
 public:
  explicit HermitianMetricField(const Monodromy& rho);  // identity field
  HermitianMetricField(const Monodromy& rho,
                       const std::function<MatrixXcd(const VectorXd&)>& f);

  const Monodromy& bundle() const { return *rho_; }
  const AffineManifold& manifold() const { return *m_; }
  int rank() const { return r_; }

  Eigen::Map<MatrixXcd> at(long pt) { return Eigen::Map<MatrixXcd>(&data_[pt * r_ * r_], r_, r_); }
  Eigen::Map<const MatrixXcd> at(long pt) const {
    return Eigen::Map<const MatrixXcd>(&data_[pt * r_ * r_], r_, r_);
  }

  double min_eigenvalue() const;
  double hermiticity_residual() const;
  // Smoothness of the equivariant continuation across the seams: ghost
  // transport versus one-sided extrapolation from the interior.
  double equivariance_residual() const;
  double condition_number() const;  // max over points of eigmax/eigmin

  void hermitize();  // project each point onto its Hermitian part
  void validate() const;

  // (0,0)-form view with the MetricLike transport law, for derivative ops.
  PQForm to_form() const;
  // log det H as a twisted scalar with the determinant-character addends.
  PQForm log_det_potential() const;

 private:
  const Monodromy* rho_;
  const AffineManifold* m_;
  int r_;
  std::vector<cplx> data_;
};

// Admissible bundle metric H0(x) = B(x)^dagger B(x), B = exp(-sum_i x^i L_i)
// with exp(L_i) = rho_i and commuting logs. Exact twist compatibility for
// bundles with commuting generators whose logarithms land in a common
// commuting family; throws CannotSynthesize otherwise.
HermitianMetricField synthesize_admissible_metric(const Monodromy& rho);

// Weakest usable variant for degree work: only the determinant character of
// the twist is matched (H = e^{phi/r} I with phi linear). Always available
// when the log-determinant character extends to a linear potential.
HermitianMetricField synthesize_detcompatible_metric(const Monodromy& rho);

// Interpret `raw` as periodic data in the admissible gauge: returns
// B(x)^dagger raw(x) B(x) with the same twist factor B used by
// synthesize_admissible_metric. The identity maps to the synthesized metric;
// unitary bundles are returned unchanged.
HermitianMetricField gauge_admissible(const Monodromy& rho, const HermitianMetricField& raw);

// c1(h) = -d(dbar(log det H)) as a (1,1)-form.
PQForm first_chern_form(const HermitianMetricField& h);

// The degree functional: either the Chern-form integral against (g, nu), or
// an abstract linear functional on log-determinant characters.
class DegreeFunctional {
 public:
  enum class Mode { Abstract, Numeric };

  static DegreeFunctional abstract_weights(VectorXd weights);
  static DegreeFunctional numeric(const AffineManifold& m, const MetricField& g);

  Mode mode() const { return mode_; }
  const VectorXd& weights() const { return weights_; }
  const AffineManifold* manifold() const { return m_; }
  const MetricField* metric() const { return g_; }

  // deg(V). Numeric mode synthesizes a default metric when h is null.
  double degree(const Monodromy& v, const HermitianMetricField* h = nullptr) const;
  double slope(const Monodromy& v, const HermitianMetricField* h = nullptr) const;

  double subbundle_degree(const FlatSubbundle& s, const HermitianMetricField* parent_h = nullptr) const;
  double subbundle_slope(const FlatSubbundle& s, const HermitianMetricField* parent_h = nullptr) const;

  // Abstract-mode degree of a determinant character (sum of w_i * c_i).
  double degree_of_character(const VectorXd& log_abs_det) const;

 private:
  Mode mode_ = Mode::Abstract;
  VectorXd weights_;
  const AffineManifold* m_ = nullptr;
  const MetricField* g_ = nullptr;
};

// Volume of M in the metric g: integral of omega^n / nu.
double gauduchon_volume(const AffineManifold& m, const MetricField& g);

}  // namespace ahe
