#pragma once

#include "ahe/degree.hpp"

namespace ahe {

// Curvature R = dbar(H^{-1} dH) of the metric connection, an
// endomorphism-valued (1,1)-form.
PQForm chern_curvature(const HermitianMetricField& h);

// Connection form theta = H^{-1} dH, endomorphism-valued (1,0).
PQForm connection_form(const HermitianMetricField& h);

// Pointwise contraction g^{ij} R_{i,j}: one endomorphism per grid point.
std::vector<MatrixXcd> lambda_contract(const PQForm& curvature, const MetricField& g);

// Einstein constant: lambda = n deg(V) / (rank * Vol_g), Vol_g the omega^n
// volume. Abstract-mode functionals require degree 0.
double einstein_constant(const Monodromy& v, const DegreeFunctional& d, const MetricField& g);

struct FlowParams {
  double dt = 0.0;           // 0 = adaptive 0.2 / (max |eig| + 1)
  int max_steps = tol::flow_max_steps;
  double residual_tol = tol::flow_residual;
  double cond_limit = tol::flow_cond_limit;
  int trace_stride = 1;      // record every k-th step in the trace
};

enum class FlowVerdict { Converged, Diverged, Undecided };

std::string to_string(FlowVerdict v);

struct FlowTraceRow {
  int step;
  double time;
  double residual;
  double min_eig;
  double max_eig;
  double energy;
};

struct DestabilizingCandidate {
  MatrixXcd basis;                  // eigen-split of the time-averaged contraction
  double alignment_residual = 1.0;  // principal-angle distance to the nearest invariant subspace
  MatrixXcd matched_invariant;      // the nearest invariant subspace (may be empty)
};

struct FlowReport {
  FlowVerdict verdict = FlowVerdict::Undecided;
  int steps = 0;
  double time = 0.0;
  double final_residual = 0.0;
  double initial_residual = 0.0;
  double condition_ratio = 1.0;  // cond(H) / cond(H0)
  double lambda = 0.0;
  double equivariance_residual = 0.0;  // of the final metric
  double energy = 0.0;
  bool step_unstable = false;
  bool gauged_initialization = false;  // raw data was carried into the admissible gauge
  std::vector<FlowTraceRow> trace;
  std::optional<HermitianMetricField> metric;  // final H
  std::optional<DestabilizingCandidate> destabilizing;
};

// Donaldson-type heat flow H <- H^{1/2} exp(-dt S) H^{1/2} with
// S the metric-frame hermitization of Lambda_g K(H) - lambda I.
FlowReport flow_run(const Monodromy& v, const DegreeFunctional& d, const MetricField& g,
                    const HermitianMetricField& h0, const FlowParams& params = {});

// Resume a flow from a previously saved state.
FlowReport flow_resume(const Monodromy& v, const DegreeFunctional& d, const MetricField& g,
                       const HermitianMetricField& h_saved, int steps_done, double time_done,
                       const FlowParams& params = {});

// sup distance between the connection forms of two converged metrics.
double connection_distance(const HermitianMetricField& a, const HermitianMetricField& b);

// Covariant-derivative residual of the constant extension of a monodromy-
// fixed fiber vector under the metric connection of h.
double flat_section_parallel_check(const Monodromy& v, const HermitianMetricField& h,
                                   const VectorXcd& s);

// Fiber vectors fixed by every generator (orthonormal basis of the joint
// fixed space); empty when no flat section exists.
MatrixXcd flat_section_space(const Monodromy& v);

// --- checkpointing ---
// Binary checkpoint: scenario key, step count, flow time, field data.
void save_checkpoint(const std::string& path, std::uint64_t scenario_key, int steps, double time,
                     const HermitianMetricField& h);
struct Checkpoint {
  std::uint64_t scenario_key;
  int steps;
  double time;
  std::vector<cplx> data;
  int rank;
  long npoints;
};
std::optional<Checkpoint> load_checkpoint(const std::string& path);

}  // namespace ahe
