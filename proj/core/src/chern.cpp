#include "ahe/chern.hpp"

#include <cmath>

#include "ahe/lie.hpp"

namespace ahe {

PQForm trace_form(const PQForm& f) {
  PQForm out(f.manifold(), f.p(), f.q());
  for (long pt = 0; pt < f.manifold().npoints(); ++pt)
    for (int s = 0; s < f.nslots(); ++s) out.at(pt, s)(0, 0) = f.at(pt, s).trace();
  return out;
}

PQForm second_chern_form(const HermitianMetricField& h) {
  const AffineManifold& m = h.manifold();
  if (m.dim() < 2) fail("DimensionTooSmall", "second Chern form needs dimension >= 2");
  PQForm r = chern_curvature(h);
  PQForm tr = trace_form(r);
  PQForm trtr = wedge(tr, tr);
  PQForm rr = trace_form(wedge(r, r));
  PQForm out = trtr;
  rr *= cplx(-1.0, 0.0);
  out += rr;
  out *= cplx(0.5, 0.0);
  return out;
}

std::pair<double, double> bogomolov_integral(const HermitianMetricField& h, const MetricField& g) {
  const AffineManifold& m = h.manifold();
  int d = m.dim();
  int r = h.rank();
  PQForm c2 = second_chern_form(h);
  PQForm c1 = first_chern_form(h);
  PQForm c1sq = wedge(c1, c1);
  PQForm combo = c2;
  combo *= cplx(2.0 * r, 0.0);
  c1sq *= cplx(-(r - 1.0), 0.0);
  combo += c1sq;

  PQForm density = (d == 2) ? combo : wedge(combo, omega_power(m, g, d - 2));
  double value = integrate_over_nu(density).real();
  double pmin = std::numeric_limits<double>::infinity();
  for (long pt = 0; pt < m.npoints(); ++pt)
    pmin = std::min(pmin, density.scalar_at(pt, 0).real());
  return {value, pmin};
}

HermitianMetricField perturb_conformal(const HermitianMetricField& h, double eps, std::uint64_t seed) {
  const AffineManifold& m = h.manifold();
  std::mt19937_64 rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int n = m.dim();
  std::vector<double> ac(n), as(n), phase(n);
  for (int i = 0; i < n; ++i) {
    ac[i] = u(rng);
    as[i] = u(rng);
    phase[i] = u(rng);
  }
  HermitianMetricField out = h;
  for (long pt = 0; pt < m.npoints(); ++pt) {
    VectorXd x = m.point(pt);
    double f = 0.0;
    for (int i = 0; i < n; ++i)
      f += ac[i] * std::cos(2 * M_PI * x(i) + phase[i]) + as[i] * std::sin(2 * M_PI * x(i));
    out.at(pt) = std::exp(eps * f) * MatrixXcd(h.at(pt));
  }
  return out;
}

namespace {

double require_astheno(const AffineManifold& m, const MetricField& g) {
  double res = check_astheno(m, g);
  if (res > tol::gauduchon_default)
    fail("AsthenoFail", "metric is not astheno-Kahler, residual " + std::to_string(res));
  return res;
}

}  // namespace

BogomolovReport bogomolov_value(const Monodromy& v, const MetricField& g,
                                const HermitianMetricField* h, const DegreeFunctional& d,
                                int metric_samples, std::uint64_t seed) {
  const AffineManifold& m = *v.manifold();
  if (m.dim() < 2) fail("DimensionTooSmall", "the inequality needs dimension >= 2");
  BogomolovReport rep;
  rep.astheno_residual = require_astheno(m, g);

  Classification cl = classify(v, d, seed);
  if (cl.verdict == StabilityVerdict::Unstable)
    fail("NotSemistable", "the inequality applies to semistable bundles");

  std::optional<HermitianMetricField> synth;
  if (!h) {
    synth = synthesize_admissible_metric(v);
    h = &*synth;
  }
  auto [value, pmin] = bogomolov_integral(*h, g);
  rep.value = value;
  rep.pointwise_min = pmin;
  rep.samples.push_back(value);
  for (int s = 1; s < metric_samples; ++s) {
    HermitianMetricField hp = perturb_conformal(*h, 0.05, seed + 17 * s);
    rep.samples.push_back(bogomolov_integral(hp, g).first);
  }
  double lo = *std::min_element(rep.samples.begin(), rep.samples.end());
  double hi = *std::max_element(rep.samples.begin(), rep.samples.end());
  rep.spread = hi - lo;
  rep.pass = rep.value >= -1e-6 && rep.astheno_residual <= tol::gauduchon_default;
  rep.detail = "verdict " + to_string(cl.verdict);
  return rep;
}

BogomolovReport bogomolov_ad(const PrincipalBundle& e, const MetricField& g, int metric_samples,
                             std::uint64_t seed) {
  const AffineManifold& m = e.manifold();
  if (m.dim() < 2) fail("DimensionTooSmall", "the inequality needs dimension >= 2");
  BogomolovReport rep;
  rep.astheno_residual = require_astheno(m, g);

  DegreeFunctional d = DegreeFunctional::numeric(m, g);
  if (!is_semistable_principal(e, d, seed))
    fail("NotSemistable", "the adjoint inequality applies to semistable principal bundles");

  Monodromy ad = ad_bundle(e);
  HermitianMetricField h = synthesize_admissible_metric(ad);

  // c2(ad) integral with the self-duality check on c1(ad)^2.
  auto eval = [&](const HermitianMetricField& hh) {
    const int dd = m.dim();
    PQForm c2 = second_chern_form(hh);
    PQForm density = (dd == 2) ? c2 : wedge(c2, omega_power(m, g, dd - 2));
    double val = integrate_over_nu(density).real();
    PQForm c1 = first_chern_form(hh);
    PQForm c1sq = wedge(c1, c1);
    PQForm c1d = (dd == 2) ? c1sq : wedge(c1sq, omega_power(m, g, dd - 2));
    double c1v = integrate_over_nu(c1d).real();
    return std::make_pair(val, c1v);
  };

  auto [value, c1v] = eval(h);
  rep.value = value;
  rep.c1sq_integral = std::abs(c1v);
  rep.samples.push_back(value);
  {
    PQForm c2 = second_chern_form(h);
    PQForm density = (m.dim() == 2) ? c2 : wedge(c2, omega_power(m, g, m.dim() - 2));
    double pmin = std::numeric_limits<double>::infinity();
    for (long pt = 0; pt < m.npoints(); ++pt)
      pmin = std::min(pmin, density.scalar_at(pt, 0).real());
    rep.pointwise_min = pmin;
  }
  for (int s = 1; s < metric_samples; ++s) {
    HermitianMetricField hp = perturb_conformal(h, 0.05, seed + 31 * s);
    auto [vs, cs] = eval(hp);
    rep.samples.push_back(vs);
    rep.c1sq_integral = std::max(rep.c1sq_integral, std::abs(cs));
  }
  double lo = *std::min_element(rep.samples.begin(), rep.samples.end());
  double hi = *std::max_element(rep.samples.begin(), rep.samples.end());
  rep.spread = hi - lo;
  rep.pass = rep.value >= -1e-6 && rep.c1sq_integral <= 1e-6;
  return rep;
}

double bogomolov_graded_sum(const Monodromy& v, const MetricField& g, const DegreeFunctional& d,
                            std::uint64_t seed) {
  Filtration f = socle_filtration(v, d, seed);
  double sum = 0.0;
  MatrixXcd prev(v.rank(), 0);
  for (const auto& step : f.steps) {
    // graded piece: F_i ∩ F_{i-1}^perp
    MatrixXcd piece = step.basis;
    if (prev.cols() > 0) {
      MatrixXcd proj = piece - prev * (prev.adjoint() * piece);
      piece = orthonormalize(proj);
    }
    Monodromy restr = FlatSubbundle(v, piece).restricted();
    HermitianMetricField h = synthesize_admissible_metric(restr);
    sum += bogomolov_integral(h, g).first;
    prev = step.basis;
  }
  return sum;
}

}  // namespace ahe
