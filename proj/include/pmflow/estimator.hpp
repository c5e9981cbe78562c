#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pmflow/potential.hpp"
#include "pmflow/solver.hpp"

namespace pmflow {

// Snapshot of every tracked functional at one sample time. Spatial
// integrals carry no outer root: *_l2sq and *_l4_4 are int |.|^2 and
// int |.|^4 respectively.
struct EstimateRow {
  double t = 0.0;
  std::int64_t step = 0;
  double mass = 0.0;
  double p_sup = 0.0, n_sup = 0.0;
  double p_l1 = 0.0;
  double grad_p_l2sq = 0.0;
  double grad_p_l4_4 = 0.0;
  double p_hess_sq = 0.0;  // int p |D2 p|^2
  double p_lap_sq = 0.0;   // int p |lap p|^2
  double grad_sig_l2sq = 0.0;
  double grad_sig_l4_4 = 0.0;
  double lap_sig_sq = 0.0;
  double weighted_plapf = 0.0;  // (gamma - 2/3) int p |lap(p + V)|^2
  double p2_lap_sq = 0.0;       // int p^2 |lap p|^2
  double p2_hess_sq = 0.0;      // int p^2 |D2 p|^2
  double compl_residual = 0.0;  // int p (1 - n)_+
  double overshoot = 0.0;       // max(0, n_sup - 1)
  double energy_g = 0.0;
  double entropy = 0.0;  // int n log n, the extra dissipated term when nu > 0
  bool energy_inf_finite = false;
  double energy_inf = 0.0;
};

struct EstimateSeries {
  std::vector<EstimateRow> rows;
};

// solver-scheme (centered) derivatives at the state's own resolution
EstimateRow snapshot_functionals(const SimState& s, const PotentialSpec& pot,
                                 double horizon);

// trapezoid in time over the sampled rows
struct Accumulated {
  double grad_p_l2 = 0.0;   // int int |grad p|^2
  double grad_p_l4 = 0.0;   // int int |grad p|^4
  double p_hess = 0.0;      // int int p |D2 p|^2
  double p_lap = 0.0;
  double grad_sig_l2 = 0.0;
  double grad_sig_l4 = 0.0;
  double lap_sig = 0.0;
  double weighted = 0.0;
};
Accumulated accumulate(const EstimateSeries& series);

struct BoundCheck {
  std::string name;
  double lhs = 0.0, rhs = 0.0;
  double margin = 0.0;  // (rhs - lhs) / max(|rhs|, eps)
  bool pass = false;
};

// a priori bounds evaluated against the potential budget; rows must start
// at t = 0 so the initial norms can be read off the first row
std::vector<BoundCheck> bound_checks(const EstimateSeries& series,
                                     const PotentialBudget& budget,
                                     const MediumParams& mp);

void write_series_csv(const std::string& path, const EstimateSeries& series);
void write_summary_json(const std::string& path, const EstimateSeries& series,
                        const std::vector<BoundCheck>& checks,
                        const MediumParams& mp, const std::string& config_hash);

}  // namespace pmflow
