#include "ahe/degree.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace ahe {

HermitianMetricField::HermitianMetricField(const Monodromy& rho) : rho_(&rho) {
  if (!rho.manifold()) fail("MissingManifold", "bundle metrics need a manifold-tied bundle");
  m_ = rho.manifold();
  r_ = rho.rank();
  data_.assign(static_cast<std::size_t>(m_->npoints()) * r_ * r_, cplx(0, 0));
  for (long pt = 0; pt < m_->npoints(); ++pt) at(pt) = MatrixXcd::Identity(r_, r_);
}

HermitianMetricField::HermitianMetricField(const Monodromy& rho,
                                           const std::function<MatrixXcd(const VectorXd&)>& f)
    : HermitianMetricField(rho) {
  for (long pt = 0; pt < m_->npoints(); ++pt) {
    MatrixXcd v = f(m_->point(pt));
    at(pt) = 0.5 * (v + v.adjoint());
  }
}

double HermitianMetricField::min_eigenvalue() const {
  double worst = std::numeric_limits<double>::infinity();
  for (long pt = 0; pt < m_->npoints(); ++pt) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(at(pt));
    worst = std::min(worst, es.eigenvalues().minCoeff());
  }
  return worst;
}

double HermitianMetricField::hermiticity_residual() const {
  double worst = 0.0;
  for (long pt = 0; pt < m_->npoints(); ++pt)
    worst = std::max(worst, (at(pt) - at(pt).adjoint()).cwiseAbs().maxCoeff());
  return worst;
}

double HermitianMetricField::condition_number() const {
  double worst = 1.0;
  for (long pt = 0; pt < m_->npoints(); ++pt) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(at(pt));
    double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (lo <= 0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, hi / lo);
  }
  return worst;
}

void HermitianMetricField::hermitize() {
  for (long pt = 0; pt < m_->npoints(); ++pt) {
    MatrixXcd v = at(pt);
    at(pt) = 0.5 * (v + v.adjoint());
  }
}

double HermitianMetricField::equivariance_residual() const {
  // Ghost value vs 8-point backward extrapolation from interior samples: a
  // smooth equivariant continuation makes both agree to O(h^8), which keeps
  // the truncation floor of genuinely admissible exponential metrics well
  // below the 1e-8 acceptance band; seam-discontinuous impostors read O(1).
  const AffineManifold& m = *m_;
  int n = m.dim();
  int N = m.resolution();
  PQForm f = to_form();
  double worst = 0.0;
  std::vector<MatrixXcd> ghost;
  for (long pt = 0; pt < m.npoints(); ++pt) {
    VectorXi k = m.coords_of(pt);
    for (int a = 0; a < n; ++a) {
      if (k(a) != 0 && k(a) != N - 1) continue;
      int dir = (k(a) == 0) ? -1 : +1;
      f.neighbor_slots(pt, a, dir, ghost);
      MatrixXcd extrap = MatrixXcd::Zero(r_, r_);
      const double w[8] = {8.0, -28.0, 56.0, -70.0, 56.0, -28.0, 8.0, -1.0};
      bool ok = true;
      for (int s = 0; s < 8; ++s) {
        VectorXi kk = k;
        kk(a) -= dir * s;
        if (kk(a) < 0 || kk(a) >= N) {
          ok = false;
          break;
        }
        extrap += w[s] * MatrixXcd(at(m.index_of(kk)));
      }
      if (!ok) continue;
      double scale = std::max(1.0, extrap.norm());
      worst = std::max(worst, (ghost[0] - extrap).norm() / scale);
    }
  }
  return worst;
}

void HermitianMetricField::validate() const {
  if (hermiticity_residual() > 1e-10) fail("NonPositiveMetric", "bundle metric is not Hermitian");
  double lo = min_eigenvalue();
  if (lo <= tol::spd_floor)
    fail("NonPositiveMetric", "bundle metric not positive definite, min eigenvalue " + std::to_string(lo));
  double eq = equivariance_residual();
  if (eq > tol::metric_twist)
    fail("BadMetric", "bundle metric violates twisted equivariance, residual " + std::to_string(eq));
}

PQForm HermitianMetricField::to_form() const {
  PQForm f(*m_, 0, 0, r_, BundleLaw::MetricLike, rho_);
  for (long pt = 0; pt < m_->npoints(); ++pt) f.at(pt, 0) = at(pt);
  return f;
}

PQForm HermitianMetricField::log_det_potential() const {
  VectorXd addends(rho_->generator_count());
  VectorXd chars = rho_->log_abs_det_character();
  for (int i = 0; i < rho_->generator_count(); ++i) addends(i) = -2.0 * chars(i);
  PQForm f = PQForm::twisted_scalar(*m_, addends, [](const VectorXd&) { return cplx(0, 0); });
  for (long pt = 0; pt < m_->npoints(); ++pt) {
    cplx d = at(pt).determinant();
    if (std::abs(d) <= 0) fail("NonPositiveMetric", "singular bundle metric");
    f.at(pt, 0)(0, 0) = std::log(std::abs(d));
  }
  return f;
}

namespace {

// Commuting logarithms L_i with exp(L_i) = rho_i, via the holomorphic
// functional calculus on each generator. A deterministic branch rotation
// keeps eigenvalues off the principal cut.
std::vector<MatrixXcd> commuting_logs(const Monodromy& rho) {
  if (!rho.commuting(1e-8)) fail("CannotSynthesize", "generators do not commute");
  std::vector<MatrixXcd> logs;
  for (int i = 0; i < rho.generator_count(); ++i) {
    MatrixXcd g = rho.gen(i);
    Eigen::ComplexEigenSolver<MatrixXcd> es(g);
    double theta = 0.0;
    bool ok = false;
    for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
      theta = attempt * 0.37;
      ok = true;
      for (int k = 0; k < es.eigenvalues().size(); ++k) {
        cplx lam = es.eigenvalues()(k) * std::exp(cplx(0, theta));
        if (lam.real() < 0 && std::abs(lam.imag()) < 1e-6 * std::abs(lam)) ok = false;
      }
    }
    if (!ok) fail("CannotSynthesize", "could not find a branch for the matrix logarithm");
    MatrixXcd rotated = g * std::exp(cplx(0, theta));
    MatrixXcd l = rotated.log();
    l -= cplx(0, theta) * MatrixXcd::Identity(g.rows(), g.cols());
    logs.push_back(l);
  }
  // Functions of commuting matrices commute; verify numerically anyway.
  for (std::size_t i = 0; i < logs.size(); ++i)
    for (std::size_t j = i + 1; j < logs.size(); ++j)
      if ((logs[i] * logs[j] - logs[j] * logs[i]).norm() > 1e-7 * std::max(1.0, logs[i].norm() * logs[j].norm()))
        fail("CannotSynthesize", "generator logarithms do not commute");
  // exp(L) must reproduce the generator.
  for (std::size_t i = 0; i < logs.size(); ++i) {
    MatrixXcd back = logs[i].exp();
    if ((back - rho.gen(static_cast<int>(i))).norm() > 1e-8 * std::max(1.0, rho.gen(static_cast<int>(i)).norm()))
      fail("CannotSynthesize", "matrix logarithm does not invert exp");
  }
  return logs;
}

}  // namespace

namespace {

// Twist factor B(x) = exp(-sum_i x^i L_i) with exp(L_i) = rho_i and
// commuting logs; B(x)^dagger B(x) is an exactly equivariant metric, and
// conjugation by B carries periodic fields into the admissible gauge.
// Nullopt for unitary bundles (B = I suffices).
std::optional<std::function<MatrixXcd(const VectorXd&)>> twist_factor(const Monodromy& rho) {
  if (!rho.manifold()) fail("MissingManifold", "bundle metrics need a manifold-tied bundle");
  const AffineManifold& m = *rho.manifold();
  bool unitary = true;
  for (int i = 0; i < rho.generator_count(); ++i) {
    MatrixXcd g = rho.gen(i);
    if ((g.adjoint() * g - MatrixXcd::Identity(rho.rank(), rho.rank())).norm() > 1e-10) unitary = false;
  }
  if (unitary) return std::nullopt;
  // The exponential-potential construction matches the twist exactly only
  // when generator i is the plain translation by e_i.
  if (m.kind() != ManifoldKind::Torus || m.generator_count() != m.dim())
    fail("CannotSynthesize", "non-unitary metric synthesis supports torus presentations only");
  auto logs = std::make_shared<std::vector<MatrixXcd>>(commuting_logs(rho));
  int r = rho.rank();
  return [logs, r](const VectorXd& x) {
    MatrixXcd l = MatrixXcd::Zero(r, r);
    for (int i = 0; i < static_cast<int>(logs->size()); ++i) l -= x(i) * (*logs)[i];
    return MatrixXcd(l.exp());
  };
}

}  // namespace

HermitianMetricField synthesize_admissible_metric(const Monodromy& rho) {
  auto b = twist_factor(rho);
  if (!b) return HermitianMetricField(rho);
  return HermitianMetricField(rho, [&](const VectorXd& x) {
    MatrixXcd bx = (*b)(x);
    return MatrixXcd(bx.adjoint() * bx);
  });
}

HermitianMetricField gauge_admissible(const Monodromy& rho, const HermitianMetricField& raw) {
  auto b = twist_factor(rho);
  if (!b) return raw;
  const AffineManifold& m = *rho.manifold();
  HermitianMetricField out = raw;
  for (long pt = 0; pt < m.npoints(); ++pt) {
    MatrixXcd bx = (*b)(m.point(pt));
    out.at(pt) = bx.adjoint() * MatrixXcd(raw.at(pt)) * bx;
  }
  return out;
}

HermitianMetricField synthesize_detcompatible_metric(const Monodromy& rho) {
  if (!rho.manifold()) fail("MissingManifold", "bundle metrics need a manifold-tied bundle");
  const AffineManifold& m = *rho.manifold();
  VectorXd chars = rho.log_abs_det_character();
  // phi(x) = -2 v.x with v^T A_i = v^T, v.b_i = log|det rho_i|; then
  // H = e^{phi/r} I matches the determinant part of the twist.
  int n = m.dim();
  int ng = m.generator_count();
  MatrixXd lhs(ng * n + ng, n);
  VectorXd rhsv(ng * n + ng);
  int row = 0;
  for (int i = 0; i < ng; ++i) {
    const AffineMap& g = m.generators()[i];
    MatrixXd d = g.A.transpose() - MatrixXd::Identity(n, n);
    for (int k = 0; k < n; ++k) {
      lhs.row(row) = d.row(k);
      rhsv(row) = 0.0;
      ++row;
    }
    lhs.row(row) = g.b.transpose();
    rhsv(row) = chars(i);
    ++row;
  }
  VectorXd v = lhs.colPivHouseholderQr().solve(rhsv);
  if ((lhs * v - rhsv).norm() > 1e-8)
    fail("CannotSynthesize", "determinant character admits no linear potential");
  int r = rho.rank();
  return HermitianMetricField(rho, [&](const VectorXd& x) {
    double phi = -2.0 * v.dot(x);
    return MatrixXcd(std::exp(phi / r) * MatrixXcd::Identity(r, r));
  });
}

PQForm first_chern_form(const HermitianMetricField& h) {
  if (h.min_eigenvalue() <= tol::spd_floor)
    fail("NonPositiveMetric", "first Chern form of a non-positive metric");
  PQForm phi = h.log_det_potential();
  PQForm c1 = dolbeault_ddbar(phi);
  c1 *= cplx(-1.0, 0.0);
  return c1;
}

DegreeFunctional DegreeFunctional::abstract_weights(VectorXd weights) {
  DegreeFunctional d;
  d.mode_ = Mode::Abstract;
  d.weights_ = std::move(weights);
  return d;
}

DegreeFunctional DegreeFunctional::numeric(const AffineManifold& m, const MetricField& g) {
  DegreeFunctional d;
  d.mode_ = Mode::Numeric;
  d.m_ = &m;
  d.g_ = &g;
  return d;
}

double DegreeFunctional::degree_of_character(const VectorXd& log_abs_det) const {
  if (mode_ != Mode::Abstract) fail("InconsistentMode", "character degree needs Abstract mode");
  if (weights_.size() != log_abs_det.size())
    fail("BadDegree", "weight count does not match generator count");
  return weights_.dot(log_abs_det);
}

double DegreeFunctional::degree(const Monodromy& v, const HermitianMetricField* h) const {
  if (mode_ == Mode::Abstract) return degree_of_character(v.log_abs_det_character());
  // Numeric mode.
  if (!m_ || v.manifold() != m_) fail("GroupMismatch", "bundle is not over the functional's manifold");
  double gres = check_gauduchon(*m_, *g_);
  if (gres > tol::gauduchon_default)
    fail("GauduchonFail", "metric fails the Gauduchon condition, residual " + std::to_string(gres));
  std::optional<HermitianMetricField> synth;
  if (!h) {
    synth = synthesize_detcompatible_metric(v);
    h = &*synth;
  }
  PQForm c1 = first_chern_form(*h);
  PQForm wn1 = omega_power(*m_, *g_, m_->dim() - 1);
  return integrate_over_nu(wedge(c1, wn1)).real();
}

double DegreeFunctional::slope(const Monodromy& v, const HermitianMetricField* h) const {
  return degree(v, h) / v.rank();
}

double DegreeFunctional::subbundle_degree(const FlatSubbundle& s,
                                          const HermitianMetricField* parent_h) const {
  s.validate();
  if (mode_ == Mode::Abstract) return degree_of_character(s.restricted().log_abs_det_character());
  Monodromy rest = s.restricted();
  if (!parent_h) return degree(rest, nullptr);
  // Restrict the parent metric to the subbundle: H_W = Q^dagger H Q.
  const MatrixXcd q = s.basis();
  HermitianMetricField hw(rest);
  for (long pt = 0; pt < rest.manifold()->npoints(); ++pt)
    hw.at(pt) = q.adjoint() * parent_h->at(pt) * q;
  return degree(rest, &hw);
}

double DegreeFunctional::subbundle_slope(const FlatSubbundle& s,
                                         const HermitianMetricField* parent_h) const {
  return subbundle_degree(s, parent_h) / s.dim();
}

double gauduchon_volume(const AffineManifold& m, const MetricField& g) {
  PQForm wn = omega_power(m, g, m.dim());
  return integrate_over_nu(wn).real();
}

}  // namespace ahe
