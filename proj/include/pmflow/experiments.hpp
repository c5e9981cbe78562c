#pragma once

#include <string>
#include <vector>

#include "pmflow/estimator.hpp"
#include "pmflow/solver.hpp"

namespace pmflow {

// Initial density profiles. pressure_level realizes the profile as the
// pressure and takes the gamma-th root, which keeps the geometry of the
// congested region comparable across stiffness values; raw density data
// freezes the large-gamma dynamics instead.
struct InitialData {
  enum class Profile {
    constant,
    gaussian_bump,
    annulus,
    barenblatt,
    random_smooth
  };
  Profile profile = Profile::constant;
  double amplitude = 1.0;
  double center_x = 0.0, center_y = 0.0;
  double width = 1.0;          // bump width, annulus edge handled separately
  double inner_radius = 0.0;   // annulus
  double outer_radius = 1.0;   // annulus and bump support radius
  double bb_C = 0.1;           // barenblatt profile constant
  double tau0 = 0.25;          // barenblatt internal start time
  unsigned seed = 1;           // random_smooth
  bool pressure_level = false;

  ScalarField realize(const Grid& g, const MediumParams& mp) const;
  void validate() const;
};

// closed-form source solution of u_tau = lap(u^m) at internal time tau
double barenblatt_value(int dim, double m, double C, double tau, double r);
double barenblatt_support_radius(int dim, double m, double C, double tau);

struct GammaSweepPlan {
  std::vector<double> gammas = {5.0, 10.0, 20.0, 40.0, 80.0, 160.0};
  double nu = 0.0;
  int dim = 2;
  int n_cells = 128;
  double box_length = 4.0;
  double T = 0.75;
  int samples = 200;  // number of sample intervals over [0, T]
  PotentialSpec potential;
  InitialData initial;
  SolverConfig solver;

  void validate() const;
  Grid make_grid() const;
  std::vector<double> sample_times() const;
};

struct PerGammaOutcome {
  double gamma = 0.0;
  bool ok = false;
  std::string error;
  EstimateSeries series;
  Accumulated acc;
  std::vector<BoundCheck> checks;
  std::vector<double> n_final, p_final, sigma_final;
};

struct CauchyRow {
  double gamma_a = 0.0, gamma_b = 0.0;
  double n_l2_sup = 0.0;     // sup over sample times of ||n_a - n_b||_L2
  double sigma_l2h1 = 0.0;   // space-time L2 H1 distance of sigma
};

struct SweepResult {
  GammaSweepPlan plan;
  std::vector<PerGammaOutcome> outcomes;
  std::vector<CauchyRow> cauchy;  // consecutive gamma pairs, both runs ok
};

// sequential over gammas with a rolling snapshot window, so only two
// per-sample field sets are alive at a time
SweepResult run_sweep(const GammaSweepPlan& plan);

struct LimitFields {
  Grid grid;
  double gamma_used = 0.0;
  std::vector<double> n_inf, sigma_inf, p_inf;
  double overshoot = 0.0;
  double compl_residual = 0.0;  // int p_inf (1 - n_inf)_+
  double cauchy_first = 0.0, cauchy_last = 0.0;
};

// takes the largest-gamma fields as the stiff-limit candidate; refuses
// unless the Cauchy tail dropped below tail_factor times the first gap
LimitFields extract_limit(const SweepResult& sweep, double tail_factor = 0.25);

struct FocusingRow {
  double gamma = 0.0;
  bool ok = false;
  std::string error;
  double grad_p_lq_max[4] = {0.0, 0.0, 0.0, 0.0};  // q = 2, 4, 6, 8
  bool hole_closed = false;
  double t_closed = 0.0;
};

struct FocusingResult {
  std::vector<FocusingRow> rows;
};

// annulus collapse with no potential and nu = 0; tracks the max-in-time
// L^q norms of grad p and the hole closing time
FocusingResult focusing_study(const GammaSweepPlan& plan);

void write_sweep_outputs(const std::string& dir, const SweepResult& result,
                         const std::string& config_hash);
void write_limit_outputs(const std::string& dir, const LimitFields& limit,
                         const std::string& config_hash);
void write_focusing_csv(const std::string& path, const FocusingResult& result);

}  // namespace pmflow
