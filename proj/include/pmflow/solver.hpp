#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmflow/constitutive.hpp"
#include "pmflow/grid.hpp"
#include "pmflow/potential.hpp"

namespace pmflow {

struct SolverConfig {
  double dt_initial = 1e-3;
  double dt_max = 1e-2;
  double cfl = 0.9;           // fraction of the drift stability bound
  double newton_tol = 1e-10;  // relative nonlinear residual
  int newton_max_iter = 50;
  double lin_tol = 1e-11;  // relative CG residual
  int max_dt_halvings = 10;
  double seam_tol = 1e-10;  // support touching the seam, nu = 0 only
  double dt_growth = 1.5;

  void validate() const;
};

struct SimState {
  double t = 0.0;
  std::int64_t step = 0;
  MediumParams params;
  ScalarField n;
  ScalarField p;      // n^gamma, kept in sync with n
  ScalarField sigma;  // sigma(n), kept in sync with n
  double dt_next = 0.0;  // adaptive step carried across steps and checkpoints

  SimState(ScalarField n0, MediumParams mp, double t0 = 0.0);
  void refresh_caches();
};

struct StepFailure : std::runtime_error {
  double residual;
  StepFailure(const std::string& msg, double res)
      : std::runtime_error(msg), residual(res) {}
};

struct SeamViolation : std::runtime_error {
  double when;
  SeamViolation(double t, double mass);
};

// largest stable drift step at the state's current time
double drift_cfl_dt(const SimState& s, const PotentialSpec& pot,
                    const SolverConfig& cfg, double horizon);

// one IMEX step: explicit upwind drift, then backward Euler diffusion.
// Commits only on success; throws StepFailure with the final Newton
// residual otherwise.
void step(SimState& s, const PotentialSpec& pot, const SolverConfig& cfg,
          double dt, double horizon);

struct RunHooks {
  std::function<void(const SimState&)> on_step;    // every accepted step
  std::function<void(const SimState&)> on_sample;  // at requested times
};

// advances to T, truncating dt to land exactly on each sample time; on
// StepFailure the step is retried with dt halved, up to the configured
// number of halvings
std::vector<SimState> run(SimState s, const PotentialSpec& pot,
                          const SolverConfig& cfg, double T,
                          const std::vector<double>& sample_times,
                          const RunHooks& hooks = {});

// prefix.field + prefix.json; the sidecar carries enough to make the
// continuation bitwise identical to an uninterrupted run
void write_checkpoint(const std::string& prefix, const SimState& s,
                      const std::string& config_hash);
SimState read_checkpoint(const std::string& prefix,
                         std::string* config_hash_out = nullptr);

}  // namespace pmflow
