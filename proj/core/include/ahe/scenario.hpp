#pragma once

#include <memory>

#include "ahe/chern.hpp"
#include "ahe/lie.hpp"
#include "ahe/oracle.hpp"

#include <json.hpp>

namespace ahe {

using Json = nlohmann::ordered_json;

enum class Task {
  CheckManifold,
  Degree,
  Classify,
  HN,
  Socle,
  HESolve,
  Bogomolov,
  PrincipalClassify,
  PrincipalHN,
  PrincipalSocle,
  PrincipalHE,
  Oracle
};

Task task_from_string(const std::string& s);
std::string to_string(Task t);

struct ScenarioParams {
  int grid = 64;
  double dt = 0.0;
  int max_steps = tol::flow_max_steps;
  double residual_tol = tol::flow_residual;
  double cond_limit = tol::flow_cond_limit;
  std::uint64_t seed = 0x5eedu;
  int metric_samples = 3;
};

// A fully constructed scenario: manifold, base metric, bundle or principal
// bundle, degree-functional mode, task, and numeric parameters.
struct Scenario {
  std::shared_ptr<AffineManifold> manifold;  // null in synthetic mode
  std::optional<MetricField> metric;
  std::optional<Monodromy> bundle;
  std::optional<PrincipalBundle> principal;
  bool numeric_degree = false;
  VectorXd weights;  // abstract mode
  Task task = Task::Classify;
  ScenarioParams params;
  std::uint64_t hash = 0;

  DegreeFunctional degree_functional() const;
};

// Parse and validate a scenario file. Optional overrides replace the grid
// resolution and seed before objects are built.
Scenario load_scenario(const std::string& path, std::optional<int> grid_override = {},
                       std::optional<std::uint64_t> seed_override = {});
Scenario parse_scenario(const Json& doc, std::optional<int> grid_override = {},
                        std::optional<std::uint64_t> seed_override = {});

// Execute the scenario's task; writes report.json (and trace.csv /
// checkpoint.bin for flows) under out_dir. Returns the report.
Json run_scenario(const Scenario& s, const std::string& out_dir, bool resume = false);

// Matrix <-> JSON helpers (row-major, entries either numbers or [re, im]).
MatrixXcd parse_matrix(const Json& j, int rows, int cols);
Json dump_matrix(const MatrixXcd& m);

// The conventions block embedded in every report.
Json conventions_block();

}  // namespace ahe
