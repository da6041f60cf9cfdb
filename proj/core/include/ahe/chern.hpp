#pragma once

#include "ahe/filtration.hpp"
#include "ahe/heat_flow.hpp"

namespace ahe {

class PrincipalBundle;

// c2(h) = (tr R ∧ tr R - tr(R ∧ R)) / 2 as a scalar (2,2)-form.
PQForm second_chern_form(const HermitianMetricField& h);

// trace of an endomorphism-valued form, slotwise.
PQForm trace_form(const PQForm& f);

struct BogomolovReport {
  double value = 0.0;                // primary-metric value of the integral
  std::vector<double> samples;       // values across sampled admissible metrics
  double spread = 0.0;               // max - min over samples
  double astheno_residual = 0.0;
  double pointwise_min = 0.0;        // min over grid of the density (primary metric)
  double c1sq_integral = 0.0;        // adjoint bundles: the self-duality check
  bool pass = false;
  std::string detail;
};

// Integral of (2r c2 - (r-1) c1^2) ∧ omega^{d-2} / nu for a semistable flat
// bundle under an astheno-Kahler metric, with a metric-independence sweep.
BogomolovReport bogomolov_value(const Monodromy& v, const MetricField& g,
                                const HermitianMetricField* h, const DegreeFunctional& d,
                                int metric_samples = 3, std::uint64_t seed = 0x5eedu);

// Integral of c2(ad E) ∧ omega^{d-2} / nu for a semistable principal bundle,
// plus the c1(ad)^2 self-duality check across sampled metrics.
BogomolovReport bogomolov_ad(const PrincipalBundle& e, const MetricField& g,
                             int metric_samples = 3, std::uint64_t seed = 0x5eedu);

// Sum of the inequality values over the graded pieces of the socle-type
// filtration (the reduction step of the semistable case), for cross-checking
// against the direct value.
double bogomolov_graded_sum(const Monodromy& v, const MetricField& g, const DegreeFunctional& d,
                            std::uint64_t seed = 0x5eedu);

// The raw integral for one metric (no sweep): (2r c2 - (r-1) c1^2) ∧
// omega^{d-2} / nu, plus the pointwise minimum of the density.
std::pair<double, double> bogomolov_integral(const HermitianMetricField& h, const MetricField& g);

// Conformal perturbation of an admissible metric by exp(eps * f) with a
// random periodic trigonometric f; preserves twisted equivariance.
HermitianMetricField perturb_conformal(const HermitianMetricField& h, double eps, std::uint64_t seed);

}  // namespace ahe
