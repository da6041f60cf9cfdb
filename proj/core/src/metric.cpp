#include "ahe/metric.hpp"

namespace ahe {

MetricField MetricField::constant(const AffineManifold& m, const MatrixXd& g) {
  if (g.rows() != m.dim() || g.cols() != m.dim())
    fail("BadMetric", "metric matrix shape does not match the manifold dimension");
  MetricField f(m);
  f.constant_ = true;
  f.g0_ = 0.5 * (g + g.transpose());
  return f;
}

MetricField MetricField::from_expressions(const AffineManifold& m,
                                          const std::vector<std::vector<Expr>>& entries) {
  int n = m.dim();
  if (static_cast<int>(entries.size()) != n)
    fail("BadMetric", "metric entry grid must be n x n");
  MetricField f(m);
  f.constant_ = false;
  f.exprs_.resize(n * n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(entries[i].size()) != n) fail("BadMetric", "metric entry grid must be n x n");
    for (int j = 0; j < n; ++j) f.exprs_[i * n + j] = entries[i][j];
  }
  f.data_.resize(m.npoints() * n * n);
  for (long p = 0; p < m.npoints(); ++p) {
    VectorXd x = m.point(p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.5 * (f.exprs_[i * n + j].eval(x) + f.exprs_[j * n + i].eval(x));
        f.data_[p * n * n + i * n + j] = v;
      }
  }
  return f;
}

MatrixXd MetricField::at(long idx) const {
  int n = m_->dim();
  if (constant_) return g0_;
  return Eigen::Map<const MatrixXd>(&data_[idx * n * n], n, n);
}

MatrixXd MetricField::inverse_at(long idx) const { return at(idx).inverse(); }

double MetricField::det_at(long idx) const { return at(idx).determinant(); }

double MetricField::min_eigenvalue() const {
  int n = m_->dim();
  double worst = std::numeric_limits<double>::infinity();
  long count = constant_ ? 1 : m_->npoints();
  for (long p = 0; p < count; ++p) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(at(p));
    worst = std::min(worst, es.eigenvalues().minCoeff());
    if (n == 0) break;
  }
  return worst;
}

double MetricField::equivariance_residual() const {
  // Compare the transported seam value against the declared field evaluated
  // at the ghost coordinates (expression metrics), or against the constant
  // (constant metrics).
  const AffineManifold& m = *m_;
  int n = m.dim();
  int N = m.resolution();
  double worst = 0.0;
  for (long idx = 0; idx < m.npoints(); ++idx) {
    VectorXi k = m.coords_of(idx);
    bool boundary = false;
    for (int a = 0; a < n; ++a)
      if (k(a) < AffineManifold::halo || k(a) >= N - AffineManifold::halo) boundary = true;
    if (!boundary) continue;
    for (int a = 0; a < n; ++a) {
      for (int off : {-AffineManifold::halo, -1, 1, AffineManifold::halo}) {
        VectorXi kk = k;
        kk(a) += off;
        bool outside = false;
        for (int i = 0; i < n; ++i)
          if (kk(i) < 0 || kk(i) >= N) outside = true;
        if (!outside) continue;
        auto ghost = m.resolve(kk);
        const AffineMap& w = m.word_map(ghost.word_id);
        MatrixXd ainv = w.A.inverse();
        MatrixXd transported = ainv.transpose() * at(ghost.point_index) * ainv;
        MatrixXd declared;
        if (constant_) {
          declared = g0_;
        } else {
          VectorXd y(n);
          for (int i = 0; i < n; ++i) y(i) = static_cast<double>(kk(i)) / N;
          declared.resize(n, n);
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              declared(i, j) = 0.5 * (exprs_[i * n + j].eval(y) + exprs_[j * n + i].eval(y));
        }
        worst = std::max(worst, (transported - declared).cwiseAbs().maxCoeff());
      }
    }
  }
  return worst;
}

void MetricField::validate() const {
  double mineig = min_eigenvalue();
  if (mineig <= tol::spd_floor)
    fail("BadMetric", "metric not positive definite, min eigenvalue " + std::to_string(mineig));
  double eq = equivariance_residual();
  if (eq > tol::field_equivariance)
    fail("BadMetric", "metric violates the equivariant transformation law, residual " + std::to_string(eq));
}

}  // namespace ahe
