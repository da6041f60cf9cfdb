#pragma once

#include "ahe/expr.hpp"
#include "ahe/manifold.hpp"

namespace ahe {

// Riemannian metric sampled on the fundamental-domain grid. Fields live on
// [0,1)^n; values outside are defined by the tensor transformation law
// g(gamma x) = A^{-T} g(x) A^{-1} through the manifold's ghost words.
class MetricField {
 public:
  static MetricField constant(const AffineManifold& m, const MatrixXd& g);
  static MetricField from_expressions(const AffineManifold& m,
                                      const std::vector<std::vector<Expr>>& entries);

  const AffineManifold& manifold() const { return *m_; }
  bool is_constant() const { return constant_; }

  MatrixXd at(long idx) const;
  MatrixXd inverse_at(long idx) const;
  double det_at(long idx) const;

  double min_eigenvalue() const;

  // Deviation of the stored field from the equivariant continuation across
  // the fundamental-domain seams. Zero (to roundoff) for genuinely
  // equivariant fields; order-one when the declared entries do not satisfy
  // the transformation law.
  double equivariance_residual() const;

  void validate() const;  // SPD everywhere + equivariance

 private:
  MetricField(const AffineManifold& m) : m_(&m) {}

  const AffineManifold* m_;
  bool constant_ = true;
  MatrixXd g0_;
  std::vector<Expr> exprs_;  // row-major n*n when not constant
  std::vector<double> data_; // cached samples, row-major per point
};

}  // namespace ahe
