#include "ahe/lie.hpp"

namespace ahe {

std::string to_string(GroupFamily f) {
  switch (f) {
    case GroupFamily::GL_C: return "GL(C)";
    case GroupFamily::SL_C: return "SL(C)";
    case GroupFamily::SO_C: return "SO(C)";
    case GroupFamily::Sp_C: return "Sp(C)";
    case GroupFamily::GL_R: return "GL(R)";
    case GroupFamily::SL_R: return "SL(R)";
  }
  return "unknown";
}

GroupFamily group_family_from_string(const std::string& s) {
  if (s == "GL(C)" || s == "GL_C" || s == "GLC") return GroupFamily::GL_C;
  if (s == "SL(C)" || s == "SL_C" || s == "SLC") return GroupFamily::SL_C;
  if (s == "SO(C)" || s == "SO_C" || s == "SOC") return GroupFamily::SO_C;
  if (s == "Sp(C)" || s == "Sp_C" || s == "SPC") return GroupFamily::Sp_C;
  if (s == "GL(R)" || s == "GL_R" || s == "GLR") return GroupFamily::GL_R;
  if (s == "SL(R)" || s == "SL_R" || s == "SLR") return GroupFamily::SL_R;
  fail("ParseError", "unknown group family: " + s);
}

namespace {

MatrixXcd unit(int n, int i, int j) {
  MatrixXcd m = MatrixXcd::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

MatrixXcd symplectic_form(int n) {
  int m = n / 2;
  MatrixXcd j = MatrixXcd::Zero(n, n);
  j.topRightCorner(m, m) = MatrixXcd::Identity(m, m);
  j.bottomLeftCorner(m, m) = -MatrixXcd::Identity(m, m);
  return j;
}

}  // namespace

ReductiveGroupSpec ReductiveGroupSpec::make(GroupFamily family, int n) {
  ReductiveGroupSpec s;
  s.family_ = family;
  s.n_ = n;
  if (n < 1) fail("BadGroup", "defining size must be positive");
  switch (family) {
    case GroupFamily::GL_C:
    case GroupFamily::GL_R:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s.basis_.push_back(unit(n, i, j));
      break;
    case GroupFamily::SL_C:
    case GroupFamily::SL_R:
      if (n < 2) fail("BadGroup", "SL needs size >= 2");
      // root vectors e_{ij}, then the Cartan differences
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) s.basis_.push_back(unit(n, i, j));
      for (int k = 0; k + 1 < n; ++k) s.basis_.push_back(unit(n, k, k) - unit(n, k + 1, k + 1));
      break;
    case GroupFamily::SO_C:
      if (n < 2) fail("BadGroup", "SO needs size >= 2");
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) s.basis_.push_back(unit(n, i, j) - unit(n, j, i));
      break;
    case GroupFamily::Sp_C: {
      if (n % 2 != 0) fail("BadGroup", "Sp needs even size");
      int m = n / 2;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          MatrixXcd a = MatrixXcd::Zero(n, n);
          a.block(0, 0, m, m) = unit(m, i, j);
          a.block(m, m, m, m) = -unit(m, i, j).transpose();
          s.basis_.push_back(a);
        }
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
          MatrixXcd b = MatrixXcd::Zero(n, n);
          b.block(0, m, m, m) = unit(m, i, j) + unit(m, j, i);
          s.basis_.push_back(b);
          MatrixXcd c = MatrixXcd::Zero(n, n);
          c.block(m, 0, m, m) = unit(m, i, j) + unit(m, j, i);
          s.basis_.push_back(c);
        }
      break;
    }
  }
  int dim = static_cast<int>(s.basis_.size());
  s.gram_.resize(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) s.gram_(i, j) = (s.basis_[i] * s.basis_[j]).trace();
  Eigen::JacobiSVD<MatrixXcd> svd(s.gram_);
  if (svd.singularValues().minCoeff() < 1e-10)
    fail("BadGroup", "trace form is numerically degenerate on the algebra");
  s.gram_inv_ = s.gram_.inverse();
  return s;
}

int ReductiveGroupSpec::lie_rank() const {
  switch (family_) {
    case GroupFamily::GL_C:
    case GroupFamily::GL_R: return n_;
    case GroupFamily::SL_C:
    case GroupFamily::SL_R: return n_ - 1;
    case GroupFamily::SO_C: return n_ / 2;
    case GroupFamily::Sp_C: return n_ / 2;
  }
  return 0;
}

int ReductiveGroupSpec::borel_dim() const { return (lie_dim() + lie_rank()) / 2; }

GroupFamily ReductiveGroupSpec::complexified_family() const {
  if (family_ == GroupFamily::GL_R) return GroupFamily::GL_C;
  if (family_ == GroupFamily::SL_R) return GroupFamily::SL_C;
  return family_;
}

VectorXcd ReductiveGroupSpec::algebra_coords(const MatrixXcd& x) const {
  int dim = lie_dim();
  VectorXcd rhs(dim);
  for (int i = 0; i < dim; ++i) rhs(i) = (basis_[i] * x).trace();
  return gram_inv_ * rhs;
}

MatrixXcd ReductiveGroupSpec::algebra_element(const VectorXcd& coords) const {
  MatrixXcd x = MatrixXcd::Zero(n_, n_);
  for (int i = 0; i < lie_dim(); ++i) x += coords(i) * basis_[i];
  return x;
}

VectorXcd ReductiveGroupSpec::bracket_coords(const VectorXcd& a, const VectorXcd& b) const {
  MatrixXcd xa = algebra_element(a), xb = algebra_element(b);
  return algebra_coords(xa * xb - xb * xa);
}

double ReductiveGroupSpec::membership_residual(const MatrixXcd& g) const {
  double res = 0.0;
  switch (family_) {
    case GroupFamily::GL_C: break;
    case GroupFamily::GL_R: res = g.imag().cwiseAbs().maxCoeff(); break;
    case GroupFamily::SL_C: res = std::abs(g.determinant() - 1.0); break;
    case GroupFamily::SL_R:
      res = std::max(g.imag().cwiseAbs().maxCoeff(), std::abs(g.determinant() - 1.0));
      break;
    case GroupFamily::SO_C:
      res = (g.transpose() * g - MatrixXcd::Identity(n_, n_)).cwiseAbs().maxCoeff();
      res = std::max(res, std::abs(g.determinant() - 1.0));
      break;
    case GroupFamily::Sp_C: {
      MatrixXcd j = symplectic_form(n_);
      res = (g.transpose() * j * g - j).cwiseAbs().maxCoeff();
      break;
    }
  }
  return res;
}

double ReductiveGroupSpec::trace_form_min_singular() const {
  Eigen::JacobiSVD<MatrixXcd> svd(gram_);
  return svd.singularValues().minCoeff();
}

PrincipalBundle::PrincipalBundle(const AffineManifold* manifold, ReductiveGroupSpec spec,
                                 std::vector<MatrixXcd> generators)
    : spec_(std::move(spec)),
      defining_(manifold, spec_.is_real() ? Field::Real : Field::Complex, std::move(generators)) {}

PrincipalBundle::PrincipalBundle(int generator_count, std::vector<Word> relators,
                                 ReductiveGroupSpec spec, std::vector<MatrixXcd> generators)
    : spec_(std::move(spec)),
      defining_(generator_count, std::move(relators), spec_.is_real() ? Field::Real : Field::Complex,
                std::move(generators)) {}

const AffineManifold& PrincipalBundle::manifold() const {
  if (!defining_.manifold()) fail("MissingManifold", "synthetic principal bundle has no manifold");
  return *defining_.manifold();
}

double PrincipalBundle::membership_residual() const {
  double worst = 0.0;
  for (int i = 0; i < defining_.generator_count(); ++i)
    worst = std::max(worst, spec_.membership_residual(defining_.gen(i)));
  return worst;
}

void PrincipalBundle::validate() const {
  double res = membership_residual();
  if (res > tol::group_membership)
    fail("GroupMembership", "generator leaves the structure group, residual " + std::to_string(res));
  defining_.validate();
}

Monodromy ad_bundle(const PrincipalBundle& e) {
  const ReductiveGroupSpec& s = e.spec();
  int dim = s.lie_dim();
  std::vector<MatrixXcd> gens;
  for (int gi = 0; gi < e.defining().generator_count(); ++gi) {
    const MatrixXcd& g = e.defining().gen(gi);
    MatrixXcd ginv = e.defining().gen_inverse(gi);
    MatrixXcd ad(dim, dim);
    for (int j = 0; j < dim; ++j)
      ad.col(j) = s.algebra_coords(g * s.algebra_basis()[j] * ginv);
    if (e.spec().is_real()) ad = ad.real().cast<cplx>();
    gens.push_back(ad);
  }
  Field f = e.spec().is_real() ? Field::Real : Field::Complex;
  if (e.defining().manifold()) return Monodromy(e.defining().manifold(), f, std::move(gens));
  return Monodromy(e.defining().generator_count(), e.defining().relators(), f, std::move(gens));
}

bool is_semistable_principal(const PrincipalBundle& e, const DegreeFunctional& d, std::uint64_t seed) {
  Classification c = classify(ad_bundle(e), d, seed);
  return c.verdict != StabilityVerdict::Unstable;
}

bool is_polystable_principal(const PrincipalBundle& e, const DegreeFunctional& d, std::uint64_t seed) {
  Classification c = classify(ad_bundle(e), d, seed);
  return c.verdict == StabilityVerdict::PolystableNotStable || c.verdict == StabilityVerdict::Stable;
}

namespace {

// Bracket-closure residual of a subspace of the algebra (coordinates).
double bracket_residual_of(const ReductiveGroupSpec& s, const MatrixXcd& basis) {
  int k = static_cast<int>(basis.cols());
  int dim = s.lie_dim();
  MatrixXcd p = basis * basis.adjoint();
  MatrixXcd rest = MatrixXcd::Identity(dim, dim) - p;
  double worst = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      VectorXcd br = s.bracket_coords(basis.col(i), basis.col(j));
      double scale = std::max(1.0, br.norm());
      worst = std::max(worst, (rest * br).norm() / scale);
    }
  return worst;
}

// Largest solvable subalgebra found inside `sub` by the randomized
// nonnegative-eigenvalue construction around regular elements.
int borel_candidate_dim(const ReductiveGroupSpec& s, const MatrixXcd& sub, std::uint64_t seed) {
  int k = static_cast<int>(sub.cols());
  int dim = s.lie_dim();
  std::mt19937_64 rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  auto bracket_matrix = [&](const VectorXcd& x) {
    // ad(x) restricted to the subspace, in the subspace's coordinates
    MatrixXcd out(k, k);
    MatrixXcd pseudo = (sub.adjoint() * sub).inverse() * sub.adjoint();
    for (int j = 0; j < k; ++j) out.col(j) = pseudo * s.bracket_coords(x, sub.col(j));
    return out;
  };
  auto solvable_dim = [&](MatrixXcd cand) -> int {
    // close under bracket first
    for (int iter = 0; iter < dim; ++iter) {
      MatrixXcd grown = cand;
      for (int i = 0; i < cand.cols(); ++i)
        for (int j = i + 1; j < cand.cols(); ++j) {
          VectorXcd br = s.bracket_coords(cand.col(i), cand.col(j));
          if ((br - cand * (cand.adjoint() * br)).norm() > 1e-8) {
            MatrixXcd ext(dim, grown.cols() + 1);
            ext << grown, br.normalized();
            grown = orthonormalize(ext);
          }
        }
      if (grown.cols() == cand.cols()) break;
      cand = grown;
    }
    // derived series must terminate at zero
    MatrixXcd ds = cand;
    for (int iter = 0; iter <= dim; ++iter) {
      if (ds.cols() == 0) return static_cast<int>(cand.cols());
      MatrixXcd der(dim, 0);
      for (int i = 0; i < ds.cols(); ++i)
        for (int j = i + 1; j < ds.cols(); ++j) {
          VectorXcd br = s.bracket_coords(ds.col(i), ds.col(j));
          if (br.norm() > 1e-9) der = join_spans(der, br.normalized());
        }
      if (der.cols() >= ds.cols()) return 0;  // not solvable
      ds = der;
    }
    return 0;
  };

  int best = 0;
  for (int attempt = 0; attempt < 32; ++attempt) {
    VectorXcd coeff(k);
    for (int i = 0; i < k; ++i) coeff(i) = cplx(u(rng), u(rng));
    VectorXcd x = sub * coeff;
    MatrixXcd adx = bracket_matrix(x);
    Eigen::ComplexEigenSolver<MatrixXcd> es(adx);
    if (es.info() != Eigen::Success) continue;
    // span of eigenvectors with Re(lambda) >= -tol
    std::vector<int> keep;
    for (int i = 0; i < k; ++i)
      if (es.eigenvalues()(i).real() >= -1e-8 * std::max(1.0, adx.norm())) keep.push_back(i);
    MatrixXcd cand(dim, static_cast<int>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i)
      cand.col(static_cast<int>(i)) = sub * es.eigenvectors().col(keep[i]);
    cand = orthonormalize(cand);
    best = std::max(best, solvable_dim(cand));
  }
  return best;
}

InvariantSubalgebraReport reduction_report(const PrincipalBundle& e, const Monodromy& ad,
                                           const Filtration& f, std::uint64_t seed) {
  InvariantSubalgebraReport rep;
  rep.filtration = f;
  rep.length = f.length();
  rep.length_odd = (rep.length % 2 == 1);
  if (!rep.length_odd)
    fail("OddityViolation", "filtration length of the adjoint bundle is even: " +
                                std::to_string(rep.length));
  rep.middle_term = f.steps[(rep.length + 1) / 2 - 1].basis;
  rep.status = f.status;

  MatrixXcd p = rep.middle_term * rep.middle_term.adjoint();
  MatrixXcd rest = MatrixXcd::Identity(ad.rank(), ad.rank()) - p;
  for (int i = 0; i < ad.generator_count(); ++i)
    rep.invariance_residual = std::max(
        rep.invariance_residual,
        (rest * ad.gen(i) * p).norm() / std::max(1.0, ad.gen(i).norm()));
  rep.bracket_closure_residual = bracket_residual_of(e.spec(), rep.middle_term);
  rep.borel_expected_dim = e.spec().borel_dim();
  rep.borel_candidate_dim = borel_candidate_dim(e.spec(), rep.middle_term, seed);
  rep.certificates_pass = rep.invariance_residual <= tol::invariance &&
                          rep.bracket_closure_residual <= tol::invariance &&
                          rep.borel_candidate_dim >= rep.borel_expected_dim;
  return rep;
}

}  // namespace

InvariantSubalgebraReport hn_reduction(const PrincipalBundle& e, const DegreeFunctional& d,
                                       std::uint64_t seed) {
  Monodromy ad = ad_bundle(e);
  Filtration f = hn_filtration(ad, d, seed);
  return reduction_report(e, ad, f, seed);
}

InvariantSubalgebraReport socle_reduction(const PrincipalBundle& e, const DegreeFunctional& d,
                                          std::uint64_t seed) {
  if (!is_semistable_principal(e, d, seed))
    fail("NotSemistable", "socle reduction applies to semistable principal bundles");
  Monodromy ad = ad_bundle(e);
  Filtration f = socle_filtration(ad, d, seed);
  return reduction_report(e, ad, f, seed);
}

PrincipalBundle complexify_principal(const PrincipalBundle& e) {
  if (!e.spec().is_real()) fail("AlreadyComplex", "bundle structure group is already complex");
  ReductiveGroupSpec cspec = ReductiveGroupSpec::make(e.spec().complexified_family(),
                                                      e.spec().defining_size());
  if (e.defining().manifold())
    return PrincipalBundle(e.defining().manifold(), cspec, e.defining().generators());
  return PrincipalBundle(e.defining().generator_count(), e.defining().relators(), cspec,
                         e.defining().generators());
}

RealComplexEquivalence equivalence_check(const PrincipalBundle& e, const DegreeFunctional& d,
                                         std::uint64_t seed) {
  RealComplexEquivalence r;
  PrincipalBundle ec = complexify_principal(e);
  r.semistable_real = is_semistable_principal(e, d, seed);
  r.semistable_complex = is_semistable_principal(ec, d, seed);
  r.polystable_real = is_polystable_principal(e, d, seed);
  r.polystable_complex = is_polystable_principal(ec, d, seed);

  // The maximal semistable subbundle of ad ⊗ C is conjugation-invariant.
  Monodromy adc = Monodromy::complexify(ad_bundle(e));
  DestabilizingResult md = max_destabilizing(adc, d, seed);
  MatrixXcd conj = orthonormalize(md.basis.conjugate());
  r.conjugation_invariance = principal_angle_distance(conj, md.basis);

  r.consistent = (r.semistable_real == r.semistable_complex) &&
                 (r.polystable_real == r.polystable_complex) &&
                 r.conjugation_invariance <= tol::subspace_match;
  return r;
}

HEPrincipalReport he_structure_principal(const PrincipalBundle& e, const MetricField& g,
                                         const FlowParams& params, std::uint64_t seed) {
  const AffineManifold& m = e.manifold();
  DegreeFunctional d = DegreeFunctional::numeric(m, g);
  if (!is_polystable_principal(e, d, seed))
    fail("NotPolystable", "Hermitian-Einstein structures exist for polystable bundles only");

  HEPrincipalReport rep;
  Monodromy ad = ad_bundle(e);
  HermitianMetricField h0 = synthesize_admissible_metric(ad);
  rep.ad_flow = flow_run(ad, d, g, h0, params);
  if (rep.ad_flow.verdict != FlowVerdict::Converged) {
    rep.pass = false;
    return rep;
  }
  const HermitianMetricField& had = *rep.ad_flow.metric;

  // The center acts trivially in the adjoint representation, so the
  // contracted curvature of the adjoint flow must vanish outright.
  {
    PQForm r = chern_curvature(had);
    std::vector<MatrixXcd> lam = lambda_contract(r, g);
    for (const auto& s : lam) rep.centrality_residual = std::max(rep.centrality_residual, s.norm());
  }

  // Bracket compatibility: the connection annihilates the bracket tensor.
  {
    const ReductiveGroupSpec& spec = e.spec();
    int dim = spec.lie_dim();
    PQForm theta = connection_form(had);
    // precompute bracket tensor on basis pairs
    std::vector<VectorXcd> theta0(dim * dim);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        theta0[a * dim + b] = spec.bracket_coords(VectorXcd::Unit(dim, a), VectorXcd::Unit(dim, b));
    for (long pt = 0; pt < m.npoints(); ++pt) {
      for (int i = 0; i < m.dim(); ++i) {
        MatrixXcd a_i = theta.at(pt, i);
        double worst = 0.0;
        for (int a = 0; a < dim; ++a)
          for (int b = a + 1; b < dim; ++b) {
            VectorXcd lhs = a_i * theta0[a * dim + b];
            VectorXcd rhs = VectorXcd::Zero(dim);
            for (int c = 0; c < dim; ++c) {
              if (std::abs(a_i(c, a)) > 1e-300) rhs += a_i(c, a) * theta0[c * dim + b];
              if (std::abs(a_i(c, b)) > 1e-300) rhs += a_i(c, b) * theta0[a * dim + c];
            }
            worst = std::max(worst, (lhs - rhs).norm());
          }
        rep.bracket_residual = std::max(rep.bracket_residual, worst);
      }
    }
  }

  // Real families: the connection must be real (conjugation invariance).
  if (e.spec().is_real()) {
    PQForm theta = connection_form(had);
    for (long pt = 0; pt < m.npoints(); ++pt)
      for (int i = 0; i < m.dim(); ++i)
        rep.conjugation_residual =
            std::max(rep.conjugation_residual, MatrixXcd(theta.at(pt, i)).imag().cwiseAbs().maxCoeff());
  }

  // GL / SL families: run the defining representation too; the trace part of
  // the contraction is the central component and must be constant.
  GroupFamily fam = e.spec().family();
  if (fam == GroupFamily::GL_C || fam == GroupFamily::GL_R || fam == GroupFamily::SL_C ||
      fam == GroupFamily::SL_R) {
    HermitianMetricField hd0 = synthesize_admissible_metric(e.defining());
    rep.defining_flow = flow_run(e.defining(), d, g, hd0, params);
    if (rep.defining_flow->verdict == FlowVerdict::Converged) {
      PQForm r = chern_curvature(*rep.defining_flow->metric);
      std::vector<MatrixXcd> lam = lambda_contract(r, g);
      int n = e.spec().defining_size();
      double mean_tr = 0.0;
      for (const auto& s : lam) mean_tr += s.trace().real();
      mean_tr /= static_cast<double>(lam.size());
      for (const auto& s : lam) {
        rep.trace_constancy = std::max(rep.trace_constancy, std::abs(s.trace().real() - mean_tr));
        MatrixXcd traceless = s - (s.trace() / static_cast<double>(n)) * MatrixXcd::Identity(n, n);
        rep.centrality_residual = std::max(rep.centrality_residual, traceless.norm());
      }
    }
  }

  rep.pass = rep.centrality_residual <= 1e-5 && rep.bracket_residual <= 1e-5 &&
             rep.trace_constancy <= 1e-5 && rep.conjugation_residual <= 1e-5;
  return rep;
}

}  // namespace ahe
