#include <doctest.h>

#include <cmath>

#include "ahe/heat_flow.hpp"
#include "ahe/filtration.hpp"
#include "support.hpp"

using namespace ahe;

namespace {
constexpr double two_pi = 2.0 * M_PI;

MatrixXcd m1(double x) {
  MatrixXcd m(1, 1);
  m << x;
  return m;
}

MatrixXcd expdiag2(double a, double b) {
  MatrixXcd m = MatrixXcd::Zero(2, 2);
  m.diagonal() << std::exp(a), std::exp(b);
  return m;
}

}  // namespace

TEST_CASE("curvature of the identity metric on a trivial bundle vanishes") {
  AffineManifold m = AffineManifold::torus(2, 16);
  Monodromy v(&m, Field::Complex, {MatrixXcd::Identity(2, 2), MatrixXcd::Identity(2, 2)});
  HermitianMetricField h(v);
  CHECK(chern_curvature(h).sup_abs() < 1e-14);
}

TEST_CASE("rank-1 exponential metric: R = d dbar phi") {
  AffineManifold m = AffineManifold::torus(2, 64);
  Monodromy v(&m, Field::Complex, {m1(1), m1(1)});
  auto phi = [](const VectorXd& x) { return std::sin(two_pi * x(0)) * std::cos(two_pi * x(1)); };
  HermitianMetricField h(v, [&](const VectorXd& x) { return MatrixXcd(m1(std::exp(-phi(x)))); });
  PQForm r = chern_curvature(h);
  // (d dbar phi)_{ij} = d_i d_j phi
  double worst = 0.0;
  for (long pt = 0; pt < m.npoints(); ++pt) {
    VectorXd x = m.point(pt);
    double s = std::sin(two_pi * x(0)), c = std::cos(two_pi * x(1));
    double d11 = -two_pi * two_pi * s * c;
    double d12 = -two_pi * two_pi * std::cos(two_pi * x(0)) * std::sin(two_pi * x(1));
    double d22 = -two_pi * two_pi * s * c;
    worst = std::max(worst, std::abs(r.at(pt, r.slot(0, 0))(0, 0).real() - d11));
    worst = std::max(worst, std::abs(r.at(pt, r.slot(0, 1))(0, 0).real() - d12));
    worst = std::max(worst, std::abs(r.at(pt, r.slot(1, 1))(0, 0).real() - d22));
  }
  CHECK(worst < 5e-3);
}

TEST_CASE("unitary monodromy with the identity metric is an exact fixed point") {
  AffineManifold m = AffineManifold::torus(2, 16);
  MatrixXcd u1 = MatrixXcd::Zero(2, 2), u2 = MatrixXcd::Zero(2, 2);
  u1.diagonal() << std::polar(1.0, 0.5), std::polar(1.0, -0.3);
  u2.diagonal() << std::polar(1.0, 1.1), std::polar(1.0, 0.9);
  Monodromy v(&m, Field::Complex, {u1, u2});
  HermitianMetricField h(v);
  CHECK(chern_curvature(h).sup_abs() < 1e-12);

  MetricField g = MetricField::constant(m, MatrixXd::Identity(2, 2));
  DegreeFunctional d = DegreeFunctional::numeric(m, g);
  FlowReport rep = flow_run(v, d, g, h);
  CHECK(rep.verdict == FlowVerdict::Converged);
  CHECK(rep.steps == 0);
}

TEST_CASE("lambda contraction matches the symbolic value and scales with g") {
  AffineManifold m = AffineManifold::torus(2, 64);
  Monodromy v(&m, Field::Complex, {m1(1), m1(1)});
  HermitianMetricField h(v, [&](const VectorXd& x) {
    return MatrixXcd(m1(std::exp(-std::sin(two_pi * x(0)))));
  });
  PQForm r = chern_curvature(h);
  MetricField g = MetricField::constant(m, MatrixXd::Identity(2, 2));
  auto lam = lambda_contract(r, g);
  // R_{11} = d1 d1 sin = -(2 pi)^2 sin; Lambda = g^{11} R_{11}
  double worst = 0.0;
  for (long pt = 0; pt < m.npoints(); ++pt) {
    double expect = -two_pi * two_pi * std::sin(two_pi * m.point(pt)(0));
    worst = std::max(worst, std::abs(lam[pt](0, 0).real() - expect));
  }
  CHECK(worst < 5e-3);  // 4th-order truncation of the (2 pi)^2 wave at N=64

  MetricField g2 = MetricField::constant(m, 2.0 * MatrixXd::Identity(2, 2));
  auto lam2 = lambda_contract(r, g2);
  for (long pt : {0L, 100L, 500L})
    CHECK(std::abs(lam2[pt](0, 0) - 0.5 * lam[pt](0, 0)) < 1e-12);
}

TEST_CASE("einstein constant vanishes for degree-zero setups") {
  AffineManifold m = AffineManifold::torus(1, 64);
  MetricField g = MetricField::constant(m, MatrixXd::Identity(1, 1));
  DegreeFunctional d = DegreeFunctional::numeric(m, g);
  Monodromy v(&m, Field::Complex, {m1(std::exp(0.7))});
  CHECK(std::abs(einstein_constant(v, d, g)) < 1e-9);

  DegreeFunctional da = DegreeFunctional::abstract_weights(VectorXd::Zero(1));
  CHECK(einstein_constant(v, da, g) == 0.0);
  DegreeFunctional dbad = DegreeFunctional::abstract_weights(VectorXd::Ones(1));
  CHECK_THROWS_AS(einstein_constant(v, dbad, g), Error);
}

TEST_CASE("closed-form hermitian-einstein metric on the circle") {
  // rho = e^a over S^1: H = e^{-2 a x} solves Lambda K = 0 exactly
  AffineManifold m = AffineManifold::torus(1, 64);
  double a = 0.8;
  Monodromy v(&m, Field::Complex, {m1(std::exp(a))});
  HermitianMetricField h(v, [&](const VectorXd& x) { return MatrixXcd(m1(std::exp(-2 * a * x(0)))); });
  CHECK(h.equivariance_residual() < 1e-9);
  PQForm r = chern_curvature(h);
  CHECK(r.sup_abs() < 1e-10);
}

TEST_CASE("flow converges to the closed form for diag(e, e^2) over the circle") {
  AffineManifold m = AffineManifold::torus(1, 64);
  MetricField g = MetricField::constant(m, MatrixXd::Identity(1, 1));
  DegreeFunctional d = DegreeFunctional::numeric(m, g);
  Monodromy v(&m, Field::Complex, {expdiag2(1.0, 2.0)});

  HermitianMetricField h0(v);  // identity start, rough seam
  FlowReport rep = flow_run(v, d, g, h0);
  REQUIRE(rep.verdict == FlowVerdict::Converged);
  CHECK(rep.final_residual < tol::flow_residual);
  CHECK(rep.equivariance_residual < 1e-7);

  // gauge-fixed comparison through the connection form against the closed form
  HermitianMetricField hstar(v, [&](const VectorXd& x) {
    MatrixXcd hm = MatrixXcd::Zero(2, 2);
    hm(0, 0) = std::exp(-2.0 * x(0));
    hm(1, 1) = std::exp(-4.0 * x(0));
    return hm;
  });
  CHECK(connection_distance(*rep.metric, hstar) < 1e-5);
}

TEST_CASE("flow uniqueness: connection is initialization-independent") {
  // N = 32: the slow mode of the off-diagonal block decays at rate
  // |log(lambda2/lambda1)|^2 ~ 1, so reaching 1e-6 needs flow time ~ 12,
  // which fits the step budget at this resolution.
  AffineManifold m = AffineManifold::torus(1, 32);
  MetricField g = MetricField::constant(m, MatrixXd::Identity(1, 1));
  DegreeFunctional d = DegreeFunctional::numeric(m, g);
  Monodromy v(&m, Field::Complex, {expdiag2(1.0, 2.0)});

  FlowParams params;
  params.max_steps = 60000;  // generic starts need flow time ~ 13 at this rate

  HermitianMetricField h0(v);
  FlowReport r1 = flow_run(v, d, g, h0, params);
  // same start twice: identical connections
  FlowReport r1b = flow_run(v, d, g, h0, params);
  REQUIRE(r1.verdict == FlowVerdict::Converged);
  REQUIRE(r1b.verdict == FlowVerdict::Converged);
  CHECK(connection_distance(*r1.metric, *r1b.metric) < 1e-12);

  // random SPD start
  auto rng = make_rng(4242);
  MatrixXcd b = random_complex_matrix(2, 2, rng, 0.4) + 1.5 * MatrixXcd::Identity(2, 2);
  MatrixXcd spd = b.adjoint() * b;
  HermitianMetricField h1(v, [&](const VectorXd&) { return spd; });
  FlowReport r2 = flow_run(v, d, g, h1, params);
  REQUIRE(r2.verdict == FlowVerdict::Converged);
  CHECK(connection_distance(*r1.metric, *r2.metric) < 1e-5);

  // scaling the metric leaves the connection exactly invariant
  HermitianMetricField h5(v, [&](const VectorXd&) { return MatrixXcd(5.0 * spd); });
  FlowReport r3 = flow_run(v, d, g, h5, params);
  REQUIRE(r3.verdict == FlowVerdict::Converged);
  CHECK(connection_distance(*r2.metric, *r3.metric) < 1e-8);
}

TEST_CASE("jordan monodromy never converges: blow-up with the forced line extracted") {
  // N = 8 and a long budget: the metric degenerates linearly in flow time,
  // and the extraction sharpens like 1/cond.
  AffineManifold m = AffineManifold::torus(1, 8);
  MetricField g = MetricField::constant(m, MatrixXd::Identity(1, 1));
  DegreeFunctional d = DegreeFunctional::numeric(m, g);
  MatrixXcd j(2, 2);
  j << 1, 1, 0, 1;
  Monodromy v(&m, Field::Complex, {j});

  // the input is semistable but not polystable
  CHECK(classify(v, d).verdict == StabilityVerdict::SemistableNotPolystable);

  HermitianMetricField h0 = synthesize_admissible_metric(v);
  FlowParams p;
  p.max_steps = 60000;
  p.trace_stride = 100;
  FlowReport rep = flow_run(v, d, g, h0, p);
  CHECK(rep.verdict != FlowVerdict::Converged);
  CHECK(rep.condition_ratio > 10.0);  // steady degeneration
  REQUIRE(rep.destabilizing.has_value());
  MatrixXcd e1 = MatrixXcd::Zero(2, 1);
  e1(0, 0) = 1.0;
  CHECK(principal_angle_distance(orthonormalize(rep.destabilizing->basis), e1) < 1e-2);
  CHECK(rep.destabilizing->alignment_residual < 1e-2);
}

TEST_CASE("energy is monotone along a converging flow") {
  AffineManifold m = AffineManifold::torus(1, 32);
  MetricField g = MetricField::constant(m, MatrixXd::Identity(1, 1));
  DegreeFunctional d = DegreeFunctional::numeric(m, g);
  Monodromy v(&m, Field::Complex, {expdiag2(0.5, -0.5)});
  HermitianMetricField h0(v);
  FlowReport rep = flow_run(v, d, g, h0);
  REQUIRE(rep.verdict == FlowVerdict::Converged);
  int violations = 0;
  for (std::size_t i = 1; i < rep.trace.size(); ++i)
    if (rep.trace[i].energy > rep.trace[i - 1].energy * 1.05) ++violations;
  CHECK(violations == 0);
  // positivity all along
  for (const auto& row : rep.trace) CHECK(row.min_eig > 0.0);
}

TEST_CASE("flat sections are parallel for the converged connection") {
  AffineManifold m = AffineManifold::torus(1, 64);
  MetricField g = MetricField::constant(m, MatrixXd::Identity(1, 1));
  DegreeFunctional d = DegreeFunctional::numeric(m, g);
  // diag(1, e): e1 is fixed by the monodromy
  Monodromy v(&m, Field::Complex, {expdiag2(0.0, 1.0)});
  MatrixXcd flat = flat_section_space(v);
  REQUIRE(flat.cols() == 1);
  HermitianMetricField h0(v);
  FlowReport rep = flow_run(v, d, g, h0);
  REQUIRE(rep.verdict == FlowVerdict::Converged);
  CHECK(flat_section_parallel_check(v, *rep.metric, flat.col(0)) < 1e-5);

  // trivial bundle: the constant section is exactly parallel for H = I
  Monodromy triv(&m, Field::Complex, {m1(1)});
  HermitianMetricField hi(triv);
  VectorXcd e1(1);
  e1 << 1.0;
  CHECK(flat_section_parallel_check(triv, hi, e1) < 1e-14);
}

TEST_CASE("real rotation pair over Z^2 has no flat section") {
  AffineManifold m = AffineManifold::torus(2, 16);
  auto rot = [](double th) {
    MatrixXcd r(2, 2);
    r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    return r;
  };
  Monodromy v(&m, Field::Real, {rot(0.7), rot(1.1)});
  CHECK(flat_section_space(v).cols() == 0);
  HermitianMetricField h(v);
  VectorXcd s(2);
  s << 1.0, 0.0;
  CHECK_THROWS_AS(flat_section_parallel_check(v, h, s), Error);
}

TEST_CASE("converged contraction is block diagonal for direct sums") {
  AffineManifold m = AffineManifold::torus(1, 32);
  MetricField g = MetricField::constant(m, MatrixXd::Identity(1, 1));
  DegreeFunctional d = DegreeFunctional::numeric(m, g);
  Monodromy v(&m, Field::Complex, {expdiag2(0.6, -0.6)});
  HermitianMetricField h0(v);
  FlowReport rep = flow_run(v, d, g, h0);
  REQUIRE(rep.verdict == FlowVerdict::Converged);
  PQForm r = chern_curvature(*rep.metric);
  auto lam = lambda_contract(r, g);
  double off = 0.0;
  for (const auto& s : lam) off = std::max(off, std::abs(s(0, 1)));
  CHECK(off < 1e-5);
}

TEST_CASE("checkpoints round-trip") {
  AffineManifold m = AffineManifold::torus(1, 16);
  Monodromy v(&m, Field::Complex, {expdiag2(0.3, -0.3)});
  HermitianMetricField h(v, [&](const VectorXd& x) {
    MatrixXcd hm = MatrixXcd::Identity(2, 2);
    hm(0, 0) = 1.0 + 0.25 * std::sin(two_pi * x(0));
    return hm;
  });
  save_checkpoint("/tmp/ahe_test_ckpt.bin", 0xabcdef12u, 321, 1.5, h);
  auto cp = load_checkpoint("/tmp/ahe_test_ckpt.bin");
  REQUIRE(cp.has_value());
  CHECK(cp->scenario_key == 0xabcdef12u);
  CHECK(cp->steps == 321);
  CHECK(cp->time == doctest::Approx(1.5));
  CHECK(cp->rank == 2);
  REQUIRE(cp->npoints == m.npoints());
  double worst = 0.0;
  for (long pt = 0; pt < m.npoints(); ++pt) {
    Eigen::Map<const MatrixXcd> mm(&cp->data[pt * 4], 2, 2);
    worst = std::max(worst, (mm - MatrixXcd(h.at(pt))).cwiseAbs().maxCoeff());
  }
  CHECK(worst == 0.0);
}
