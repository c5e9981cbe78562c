#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pmflow/experiments.hpp"

namespace pmflow {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One parsed run configuration. Defaults are materialized on load, so the
// canonical form (and its hash) is independent of which optional keys the
// file spelled out.
struct RunConfig {
  int dim = 2;
  int n_cells = 128;
  double box_length = 4.0;
  MediumParams medium;
  PotentialSpec potential;
  InitialData initial;
  double T = 0.5;
  int samples = 200;
  SolverConfig solver;
  std::string out_dir = "out";
  int checkpoint_every = 0;  // steps; 0 disables
  std::vector<double> sweep_gammas = {5.0, 10.0, 20.0, 40.0, 80.0, 160.0};

  Grid make_grid() const;
  GammaSweepPlan to_plan() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

nlohmann::json canonical_json(const RunConfig& c);
std::string config_hash(const RunConfig& c);  // fnv1a-64 hex of the canonical dump

}  // namespace pmflow
