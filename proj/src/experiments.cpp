#include "pmflow/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "pmflow/field_io.hpp"
#include "pmflow/ops.hpp"
#include "pmflow/rng.hpp"

namespace pmflow {
namespace {

double periodic_delta(double x, double c, double L) {
  double d = x - c;
  return d - L * std::round(d / L);
}

double periodic_r(const Grid& g, int ix, int iy, double cx, double cy) {
  double dx = periodic_delta(g.coord(0, ix), cx, g.length(0));
  if (g.dim() == 1) return std::fabs(dx);
  double dy = periodic_delta(g.coord(1, iy), cy, g.length(1));
  return std::hypot(dx, dy);
}

}  // namespace

void InitialData::validate() const {
  if (!(amplitude >= 0.0))
    throw std::invalid_argument("initial.amplitude must be nonnegative");
  switch (profile) {
    case Profile::gaussian_bump:
      if (!(width > 0.0) || !(outer_radius > 0.0))
        throw std::invalid_argument("initial: bump needs width and outer_radius > 0");
      break;
    case Profile::annulus:
      if (!(outer_radius > inner_radius) || !(inner_radius >= 0.0))
        throw std::invalid_argument("initial: annulus needs 0 <= inner < outer");
      break;
    case Profile::barenblatt:
      if (!(bb_C > 0.0) || !(tau0 > 0.0))
        throw std::invalid_argument("initial: barenblatt needs bb_C, tau0 > 0");
      if (pressure_level)
        throw std::invalid_argument("initial: barenblatt profile is density data");
      break;
    default:
      break;
  }
}

double barenblatt_value(int dim, double m, double C, double tau, double r) {
  double d = dim;
  double alpha = d / (d * (m - 1.0) + 2.0);
  double beta = alpha / d;
  double k = alpha * (m - 1.0) / (2.0 * d * m);
  double inner = C - k * r * r * std::pow(tau, -2.0 * beta);
  if (inner <= 0.0) return 0.0;
  return std::pow(tau, -alpha) * std::pow(inner, 1.0 / (m - 1.0));
}

double barenblatt_support_radius(int dim, double m, double C, double tau) {
  double d = dim;
  double alpha = d / (d * (m - 1.0) + 2.0);
  double beta = alpha / d;
  double k = alpha * (m - 1.0) / (2.0 * d * m);
  return std::sqrt(C / k) * std::pow(tau, beta);
}

ScalarField InitialData::realize(const Grid& g, const MediumParams& mp) const {
  validate();
  ScalarField out(g);
  const int ny = g.dim() == 2 ? g.ny() : 1;

  auto profile_value = [&](int ix, int iy) -> double {
    double r = periodic_r(g, ix, iy, center_x, center_y);
    switch (profile) {
      case Profile::constant:
        return amplitude;
      case Profile::gaussian_bump: {
        double eR = std::exp(-outer_radius * outer_radius / (2.0 * width * width));
        double f = (std::exp(-r * r / (2.0 * width * width)) - eR) / (1.0 - eR);
        return amplitude * std::max(0.0, f);
      }
      case Profile::annulus: {
        if (r <= inner_radius || r >= outer_radius) return 0.0;
        double u = (r - inner_radius) / (outer_radius - inner_radius);
        double sp = std::sin(std::numbers::pi * u);
        return amplitude * sp * sp;
      }
      case Profile::barenblatt:
        return barenblatt_value(g.dim(), mp.gamma + 1.0, bb_C, tau0, r);
      case Profile::random_smooth:
        return 0.0;  // handled below, needs the whole field at once
    }
    return 0.0;
  };

  if (profile == Profile::random_smooth) {
    Rng rng(seed);
    struct Mode {
      double a;
      int kx, ky;
      bool sx, sy;
    };
    std::vector<Mode> modes;
    double sum_abs = 0.0;
    for (int m = 0; m < 6; ++m) {
      Mode md{rng.uniform(-1.0, 1.0), rng.uniform_int(1, 3),
              g.dim() == 2 ? rng.uniform_int(0, 3) : 0,
              rng.uniform_int(0, 1) == 1, rng.uniform_int(0, 1) == 1};
      modes.push_back(md);
      sum_abs += std::fabs(md.a);
    }
    const double twopi = 2.0 * std::numbers::pi;
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < g.nx(); ++ix) {
        double raw = 0.0;
        for (const auto& md : modes) {
          double px = twopi * md.kx * g.coord(0, ix) / g.length(0);
          double fy = 1.0;
          if (g.dim() == 2) {
            double py = twopi * md.ky * g.coord(1, iy) / g.length(1);
            fy = md.sy ? std::sin(py) : std::cos(py);
          }
          raw += md.a * (md.sx ? std::sin(px) : std::cos(px)) * fy;
        }
        out.at(ix, iy) = 0.5 * amplitude * (1.0 + raw / (1.05 * sum_abs));
      }
    return out;
  }

  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < g.nx(); ++ix) {
      double val = profile_value(ix, iy);
      if (pressure_level) val = density_of_pressure(val, mp);
      out.at(ix, iy) = val;
    }
  return out;
}

void GammaSweepPlan::validate() const {
  if (gammas.empty()) throw std::invalid_argument("sweep: no gamma values");
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] > 1.0))
      throw std::invalid_argument("sweep: gamma values must exceed 1");
    if (i > 0 && gammas[i] <= gammas[i - 1])
      throw std::invalid_argument("sweep: gamma values must increase");
  }
  if (!(nu >= 0.0)) throw std::invalid_argument("sweep: nu must be nonnegative");
  if (dim != 1 && dim != 2) throw std::invalid_argument("sweep: dim must be 1 or 2");
  if (!(T > 0.0)) throw std::invalid_argument("sweep: T must be positive");
  if (samples < 1) throw std::invalid_argument("sweep: need at least one sample");
  solver.validate();
  initial.validate();
}

Grid GammaSweepPlan::make_grid() const {
  return dim == 1 ? Grid::line(n_cells, box_length)
                  : Grid::square(n_cells, box_length);
}

std::vector<double> GammaSweepPlan::sample_times() const {
  std::vector<double> ts(samples + 1);
  for (int j = 0; j <= samples; ++j) ts[j] = T * j / samples;
  ts.back() = T;
  return ts;
}

namespace {

struct SnapshotSet {
  std::vector<std::vector<double>> n, sigma;
};

double l2_field_norm(const Grid& g, const std::vector<double>& a,
                     const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s * g.cell_volume());
}

CauchyRow cauchy_distance(const Grid& g, const std::vector<double>& times,
                          double ga, double gb, const SnapshotSet& A,
                          const SnapshotSet& B) {
  CauchyRow row;
  row.gamma_a = ga;
  row.gamma_b = gb;
  std::size_t count = std::min(A.n.size(), B.n.size());
  std::vector<double> h1sq(count, 0.0);
  for (std::size_t j = 0; j < count; ++j) {
    row.n_l2_sup = std::max(row.n_l2_sup, l2_field_norm(g, A.n[j], B.n[j]));
    ScalarField diff(g);
    for (std::size_t i = 0; i < diff.v.size(); ++i)
      diff.v[i] = A.sigma[j][i] - B.sigma[j][i];
    double d2 = 0.0;
    for (double x : diff.v) d2 += x * x;
    d2 *= g.cell_volume();
    VectorField gd = gradient(diff, Scheme::centered2);
    double g2 = 0.0;
    for (int a = 0; a < g.dim(); ++a)
      for (double x : gd[a]) g2 += x * x;
    g2 *= g.cell_volume();
    h1sq[j] = d2 + g2;
  }
  double acc = 0.0;
  for (std::size_t j = 1; j < count; ++j)
    acc += 0.5 * (times[j] - times[j - 1]) * (h1sq[j] + h1sq[j - 1]);
  row.sigma_l2h1 = std::sqrt(acc);
  return row;
}

}  // namespace

SweepResult run_sweep(const GammaSweepPlan& plan) {
  plan.validate();
  plan.potential.validate(plan.dim);
  Grid grid = plan.make_grid();
  PotentialBudget budget = assemble_budget(plan.potential, grid, plan.T,
                                           std::max(16, plan.samples), plan.nu);
  std::vector<double> times = plan.sample_times();

  SweepResult result;
  result.plan = plan;

  SnapshotSet prev_snap;
  double prev_gamma = 0.0;
  bool prev_ok = false;

  for (double gamma : plan.gammas) {
    MediumParams mp{gamma, plan.nu};
    PerGammaOutcome outcome;
    outcome.gamma = gamma;
    SnapshotSet snap;
    try {
      SimState state(plan.initial.realize(grid, mp), mp);
      RunHooks hooks;
      hooks.on_sample = [&](const SimState& s) {
        outcome.series.rows.push_back(
            snapshot_functionals(s, plan.potential, plan.T));
        snap.n.push_back(s.n.v);
        snap.sigma.push_back(s.sigma.v);
      };
      std::vector<SimState> finals =
          run(state, plan.potential, plan.solver, plan.T, times, hooks);
      if (finals.empty()) throw std::runtime_error("run returned no samples");
      const SimState& last = finals.back();
      outcome.n_final = last.n.v;
      outcome.p_final = last.p.v;
      outcome.sigma_final = last.sigma.v;
      outcome.acc = accumulate(outcome.series);
      outcome.checks = bound_checks(outcome.series, budget, mp);
      outcome.ok = true;
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.error = e.what();
    }

    if (outcome.ok && prev_ok)
      result.cauchy.push_back(
          cauchy_distance(grid, times, prev_gamma, gamma, prev_snap, snap));

    prev_snap = std::move(snap);
    prev_gamma = gamma;
    prev_ok = outcome.ok;
    result.outcomes.push_back(std::move(outcome));
  }
  return result;
}

LimitFields extract_limit(const SweepResult& sweep, double tail_factor) {
  if (sweep.outcomes.empty())
    throw std::invalid_argument("extract_limit: empty sweep");
  const PerGammaOutcome& last = sweep.outcomes.back();
  if (!last.ok)
    throw std::runtime_error("extract_limit: largest-gamma run failed: " +
                             last.error);
  if (sweep.cauchy.empty())
    throw std::runtime_error("extract_limit: no Cauchy differences available");
  double first = sweep.cauchy.front().n_l2_sup;
  double tail = sweep.cauchy.back().n_l2_sup;
  if (!(tail <= tail_factor * first))
    throw std::runtime_error(
        "extract_limit: Cauchy tail " + std::to_string(tail) +
        " not below " + std::to_string(tail_factor) + " * " +
        std::to_string(first) + ", limit not trusted");

  LimitFields out{sweep.plan.make_grid()};
  out.gamma_used = last.gamma;
  out.n_inf = last.n_final;
  out.sigma_inf = last.sigma_final;
  out.cauchy_first = first;
  out.cauchy_last = tail;
  out.p_inf.resize(out.n_inf.size());
  for (std::size_t i = 0; i < out.p_inf.size(); ++i)
    out.p_inf[i] = limit_pressure_from_sigma(out.sigma_inf[i], sweep.plan.nu);
  double over = 0.0, compl_sum = 0.0;
  for (std::size_t i = 0; i < out.n_inf.size(); ++i) {
    over = std::max(over, out.n_inf[i] - 1.0);
    compl_sum += out.p_inf[i] * std::max(0.0, 1.0 - out.n_inf[i]);
  }
  out.overshoot = std::max(0.0, over);
  out.compl_residual = compl_sum * out.grid.cell_volume();
  return out;
}

FocusingResult focusing_study(const GammaSweepPlan& plan) {
  plan.validate();
  if (plan.nu != 0.0)
    throw std::invalid_argument("focusing_study: needs nu = 0");
  if (!plan.potential.zero())
    throw std::invalid_argument("focusing_study: needs a zero potential");
  if (plan.initial.profile != InitialData::Profile::annulus)
    throw std::invalid_argument("focusing_study: needs annulus initial data");

  Grid grid = plan.make_grid();
  std::vector<double> times = plan.sample_times();
  const double close_threshold = 1e-3 * std::max(plan.initial.amplitude, 1e-12);
  int cx = grid.wrap(0, static_cast<int>(std::round(plan.initial.center_x /
                                                    grid.spacing(0))));
  int cy = grid.dim() == 2
               ? grid.wrap(1, static_cast<int>(std::round(
                                  plan.initial.center_y / grid.spacing(1))))
               : 0;

  FocusingResult result;
  for (double gamma : plan.gammas) {
    MediumParams mp{gamma, plan.nu};
    FocusingRow row;
    row.gamma = gamma;
    try {
      SimState state(plan.initial.realize(grid, mp), mp);
      RunHooks hooks;
      hooks.on_sample = [&](const SimState& s) {
        VectorField gp = gradient(s.p, Scheme::centered2);
        ScalarField mag(grid);
        for (std::size_t i = 0; i < mag.v.size(); ++i) {
          double g2 = gp[0][i] * gp[0][i];
          if (grid.dim() == 2) g2 += gp[1][i] * gp[1][i];
          mag.v[i] = std::sqrt(g2);
        }
        const double qs[4] = {2.0, 4.0, 6.0, 8.0};
        for (int qi = 0; qi < 4; ++qi)
          row.grad_p_lq_max[qi] =
              std::max(row.grad_p_lq_max[qi], lp_norm(mag, qs[qi]));
        if (!row.hole_closed && s.p.at(cx, cy) > close_threshold) {
          row.hole_closed = true;
          row.t_closed = s.t;
        }
      };
      run(state, plan.potential, plan.solver, plan.T, times, hooks);
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    result.rows.push_back(row);
  }
  return result;
}

namespace {

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c == ',' || c == '\n') c = ';';
  return out;
}

std::string gamma_tag(double gamma) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", gamma);
  return buf;
}

}  // namespace

void write_sweep_outputs(const std::string& dir, const SweepResult& result,
                         const std::string& config_hash) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::FILE* out = std::fopen((dir + "/sweep.csv").c_str(), "w");
    if (!out) throw std::runtime_error("write_sweep_outputs: cannot open sweep.csv");
    std::fprintf(out,
                 "gamma,ok,error,acc_grad_p_l2,acc_grad_p_l4,acc_p_hess,"
                 "acc_p_lap,acc_grad_sig_l2,acc_grad_sig_l4,acc_lap_sig,"
                 "acc_weighted,p_sup_max,n_sup_max,overshoot_max,"
                 "compl_final,bounds_pass\n");
    for (const auto& o : result.outcomes) {
      double p_sup_max = 0.0, n_sup_max = 0.0, overshoot_max = 0.0;
      double compl_final = 0.0;
      bool bounds_pass = o.ok;
      for (const auto& r : o.series.rows) {
        p_sup_max = std::max(p_sup_max, r.p_sup);
        n_sup_max = std::max(n_sup_max, r.n_sup);
        overshoot_max = std::max(overshoot_max, r.overshoot);
      }
      if (!o.series.rows.empty()) compl_final = o.series.rows.back().compl_residual;
      for (const auto& c : o.checks) bounds_pass = bounds_pass && c.pass;
      std::fprintf(out, "%.17g,%d,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                        "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                   o.gamma, o.ok ? 1 : 0, sanitize(o.error).c_str(),
                   o.acc.grad_p_l2, o.acc.grad_p_l4, o.acc.p_hess, o.acc.p_lap,
                   o.acc.grad_sig_l2, o.acc.grad_sig_l4, o.acc.lap_sig,
                   o.acc.weighted, p_sup_max, n_sup_max, overshoot_max,
                   compl_final, bounds_pass ? 1 : 0);
    }
    std::fclose(out);
  }
  {
    std::FILE* out = std::fopen((dir + "/cauchy.csv").c_str(), "w");
    if (!out) throw std::runtime_error("write_sweep_outputs: cannot open cauchy.csv");
    std::fprintf(out, "gamma_a,gamma_b,n_l2_sup,sigma_l2h1\n");
    for (const auto& c : result.cauchy)
      std::fprintf(out, "%.17g,%.17g,%.17g,%.17g\n", c.gamma_a, c.gamma_b,
                   c.n_l2_sup, c.sigma_l2h1);
    std::fclose(out);
  }
  MediumParams mp{2.0, result.plan.nu};
  for (const auto& o : result.outcomes) {
    mp.gamma = o.gamma;
    std::string tag = gamma_tag(o.gamma);
    write_series_csv(dir + "/series_g" + tag + ".csv", o.series);
    write_summary_json(dir + "/summary_g" + tag + ".json", o.series, o.checks,
                       mp, config_hash);
  }
}

void write_limit_outputs(const std::string& dir, const LimitFields& limit,
                         const std::string& config_hash) {
  namespace fs = std::filesystem;
  std::string sub = dir + "/limit_fields";
  fs::create_directories(sub);
  ScalarField tmp(limit.grid);
  tmp.v = limit.n_inf;
  write_field_binary(sub + "/n_inf.field", tmp);
  tmp.v = limit.sigma_inf;
  write_field_binary(sub + "/sigma_inf.field", tmp);
  tmp.v = limit.p_inf;
  write_field_binary(sub + "/p_inf.field", tmp);
  nlohmann::json j;
  j["gamma_used"] = limit.gamma_used;
  j["overshoot"] = limit.overshoot;
  j["compl_residual"] = limit.compl_residual;
  j["cauchy_first"] = limit.cauchy_first;
  j["cauchy_last"] = limit.cauchy_last;
  j["config_hash"] = config_hash;
  std::ofstream out(sub + "/limit.json");
  if (!out) throw std::runtime_error("write_limit_outputs: cannot open limit.json");
  out << j.dump(2) << "\n";
}

void write_focusing_csv(const std::string& path, const FocusingResult& result) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("write_focusing_csv: cannot open " + path);
  std::fprintf(out,
               "gamma,ok,error,grad_p_l2_max,grad_p_l4_max,grad_p_l6_max,"
               "grad_p_l8_max,hole_closed,t_closed\n");
  for (const auto& r : result.rows)
    std::fprintf(out, "%.17g,%d,%s,%.17g,%.17g,%.17g,%.17g,%d,%.17g\n",
                 r.gamma, r.ok ? 1 : 0, sanitize(r.error).c_str(),
                 r.grad_p_lq_max[0], r.grad_p_lq_max[1], r.grad_p_lq_max[2],
                 r.grad_p_lq_max[3], r.hole_closed ? 1 : 0, r.t_closed);
  std::fclose(out);
}

}  // namespace pmflow
