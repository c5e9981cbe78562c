#include "pmflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "pmflow/field_io.hpp"
#include "pmflow/ops.hpp"

namespace pmflow {
namespace {

constexpr double kDtFloor = 1e-12;
constexpr double kNegTol = 1e-13;  // worst allowed undershoot of an implicit solve

void apply_lap(const Grid& g, const std::vector<double>& in,
               std::vector<double>& out) {
  const int nx = g.nx(), ny = g.dim() == 2 ? g.ny() : 1;
  const double ax = 1.0 / (g.spacing(0) * g.spacing(0));
  const double ay = g.dim() == 2 ? 1.0 / (g.spacing(1) * g.spacing(1)) : 0.0;
  out.resize(in.size());
  for (int iy = 0; iy < ny; ++iy) {
    int yp = g.wrap(1, iy + 1), ym = g.wrap(1, iy - 1);
    for (int ix = 0; ix < nx; ++ix) {
      int xp = g.wrap(0, ix + 1), xm = g.wrap(0, ix - 1);
      std::size_t i = g.index(ix, iy);
      double v = (in[g.index(xp, iy)] - 2.0 * in[i] + in[g.index(xm, iy)]) * ax;
      if (g.dim() == 2)
        v += (in[g.index(ix, yp)] - 2.0 * in[i] + in[g.index(ix, ym)]) * ay;
      out[i] = v;
    }
  }
}

double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// donor-cell upwind drift, conservative face fluxes from -grad V
void drift_update(const Grid& g, const std::vector<double>& n,
                  const std::vector<double>& V, double dt,
                  std::vector<double>& out) {
  out = n;
  for (int axis = 0; axis < g.dim(); ++axis) {
    const double h = g.spacing(axis);
    const double coef = dt / h;
    const int nx = g.nx(), ny = g.dim() == 2 ? g.ny() : 1;
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        std::size_t i = g.index(ix, iy);
        std::size_t ip = axis == 0 ? g.index(g.wrap(0, ix + 1), iy)
                                   : g.index(ix, g.wrap(1, iy + 1));
        double a = -(V[ip] - V[i]) / h;
        double flux = a > 0.0 ? a * n[i] : a * n[ip];
        out[i] -= coef * flux;
        out[ip] += coef * flux;
      }
  }
}

// CG on (I - dt S L S) z = rhs with S = diag(s), Jacobi preconditioned.
// The operator is SPD because -L is positive semidefinite. The stiff block
// is confined to the congested core, so the cheap diagonal preconditioner
// beats sweep-based ones here.
bool cg_solve(const Grid& g, const std::vector<double>& s, double dt,
              const std::vector<double>& rhs, std::vector<double>& z,
              double rel_tol, int max_iter) {
  const std::size_t N = rhs.size();
  double lap_diag = 2.0 / (g.spacing(0) * g.spacing(0));
  if (g.dim() == 2) lap_diag += 2.0 / (g.spacing(1) * g.spacing(1));

  std::vector<double> r = rhs, pdir(N), Ap(N), tmp(N), prec(N), zz(N);
  z.assign(N, 0.0);
  for (std::size_t i = 0; i < N; ++i)
    prec[i] = 1.0 / (1.0 + dt * s[i] * s[i] * lap_diag);

  double rhs_norm = l2(rhs);
  if (rhs_norm == 0.0) return true;
  const double target = rel_tol * rhs_norm;

  auto matvec = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::size_t i = 0; i < N; ++i) tmp[i] = s[i] * v[i];
    apply_lap(g, tmp, out);
    for (std::size_t i = 0; i < N; ++i) out[i] = v[i] - dt * s[i] * out[i];
  };

  for (std::size_t i = 0; i < N; ++i) zz[i] = prec[i] * r[i];
  pdir = zz;
  double rz = 0.0;
  for (std::size_t i = 0; i < N; ++i) rz += r[i] * zz[i];

  for (int it = 0; it < max_iter; ++it) {
    matvec(pdir, Ap);
    double pAp = 0.0;
    for (std::size_t i = 0; i < N; ++i) pAp += pdir[i] * Ap[i];
    if (!(pAp > 0.0)) return false;
    double alpha = rz / pAp;
    for (std::size_t i = 0; i < N; ++i) {
      z[i] += alpha * pdir[i];
      r[i] -= alpha * Ap[i];
    }
    if (l2(r) <= target) return true;
    double rz_new = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      zz[i] = prec[i] * r[i];
      rz_new += r[i] * zz[i];
    }
    double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < N; ++i) pdir[i] = zz[i] + beta * pdir[i];
  }
  return false;
}

double min_of(const std::vector<double>& v) {
  double m = v.empty() ? 0.0 : v[0];
  for (double x : v) m = std::min(m, x);
  return m;
}

// backward Euler solve of n - dt lap sigma(n) = b. Newton with the
// similarity-transformed SPD linear solve; falls back to a chord direction
// with coefficients lagged at b when progress stalls (the Jacobian
// degenerates on vacuum for nu = 0). Returns the mass-exact assignment
// b + dt lap sigma(n).
std::vector<double> implicit_diffusion(const Grid& g, const MediumParams& mp,
                                       const std::vector<double>& b, double dt,
                                       const SolverConfig& cfg) {
  const std::size_t N = b.size();
  std::vector<double> n = b, sig(N), w(N), s(N), G(N), lap_sig(N), z, delta(N),
      n_try(N), sig_try(N), lap_try(N), G_try(N);
  const double b_scale = std::max(l2(b), 1e-300);

  // Newton iterates may dip negative before the line search pulls them back;
  // extend sigma linearly there (C^1 match at zero) instead of rejecting.
  auto sig_ext = [&](double x) {
    return x > 0.0 ? sigma_of_density(x, mp) : mp.nu * x;
  };
  auto sigp_ext = [&](double x) { return x > 0.0 ? sigma_prime(x, mp) : mp.nu; };

  auto residual = [&](const std::vector<double>& nn, std::vector<double>& sg,
                      std::vector<double>& lp, std::vector<double>& GG) {
    for (std::size_t i = 0; i < N; ++i) sg[i] = sig_ext(nn[i]);
    apply_lap(g, sg, lp);
    for (std::size_t i = 0; i < N; ++i) GG[i] = nn[i] - dt * lp[i] - b[i];
    return l2(GG);
  };

  double res = residual(n, sig, lap_sig, G);
  bool lagged = false;
  int cg_budget = static_cast<int>(std::min<std::size_t>(N, 6000));

  for (int it = 0; it < cfg.newton_max_iter; ++it) {
    if (res <= cfg.newton_tol * b_scale) {
      // what gets committed is the mass-exact reassignment, so positivity
      // must hold for that field, not for the Newton iterate
      double cmin = 0.0;
      for (std::size_t i = 0; i < N; ++i)
        cmin = std::min(cmin, b[i] + dt * lap_sig[i]);
      if (cmin >= -kNegTol) {
        for (std::size_t i = 0; i < N; ++i) n[i] = b[i] + dt * lap_sig[i];
        return n;
      }
    }
    const std::vector<double>& lin_point = lagged ? b : n;
    for (std::size_t i = 0; i < N; ++i) {
      w[i] = sigp_ext(lin_point[i]);
      s[i] = std::sqrt(w[i]);
    }
    // J delta = -G via (I - dt S L S) z = -S G, delta = -G + dt L S z
    std::vector<double> rhs(N);
    for (std::size_t i = 0; i < N; ++i) rhs[i] = -s[i] * G[i];
    if (!cg_solve(g, s, dt, rhs, z, cfg.lin_tol, cg_budget))
      throw StepFailure("implicit diffusion: linear solve stalled", res);
    for (std::size_t i = 0; i < N; ++i) delta[i] = s[i] * z[i];
    apply_lap(g, delta, lap_try);
    for (std::size_t i = 0; i < N; ++i) delta[i] = -G[i] + dt * lap_try[i];

    double lambda = 1.0;
    double res_try = res;
    bool improved = false;
    for (int ls = 0; ls < 8; ++ls) {
      for (std::size_t i = 0; i < N; ++i) n_try[i] = n[i] + lambda * delta[i];
      res_try = residual(n_try, sig_try, lap_try, G_try);
      if (res_try < res) {
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (improved) {
      n.swap(n_try);
      sig.swap(sig_try);
      lap_sig.swap(lap_try);
      G.swap(G_try);
      bool stalled = res_try > 0.9 * res;
      res = res_try;
      if (stalled && !lagged) {
        lagged = true;
      } else if (stalled && lagged) {
        throw StepFailure("implicit diffusion: stalled", res);
      }
    } else if (!lagged) {
      lagged = true;
    } else {
      throw StepFailure("implicit diffusion: no descent", res);
    }
  }
  throw StepFailure("implicit diffusion: iteration budget exhausted", res);
}

void seam_check(const SimState& s, double tol) {
  if (s.params.nu > 0.0) return;
  const Grid& g = s.n.grid;
  double worst = 0.0;
  for (int iy = 0; iy < (g.dim() == 2 ? g.ny() : 1); ++iy)
    for (int ix = 0; ix < g.nx(); ++ix) {
      bool edge = ix == 0 || ix == g.nx() - 1;
      if (g.dim() == 2) edge = edge || iy == 0 || iy == g.ny() - 1;
      if (edge) worst = std::max(worst, std::fabs(s.n.at(ix, iy)));
    }
  if (worst > tol) throw SeamViolation(s.t, worst);
}

}  // namespace

void SolverConfig::validate() const {
  if (!(dt_initial > 0.0) || !(dt_max > 0.0) || dt_initial > dt_max)
    throw std::invalid_argument("solver: need 0 < dt_initial <= dt_max");
  if (!(cfl > 0.0) || cfl > 1.0)
    throw std::invalid_argument("solver: cfl must lie in (0, 1]");
  if (!(newton_tol > 0.0) || !(lin_tol > 0.0))
    throw std::invalid_argument("solver: tolerances must be positive");
  if (newton_max_iter < 1 || max_dt_halvings < 0)
    throw std::invalid_argument("solver: iteration limits out of range");
  if (!(dt_growth >= 1.0))
    throw std::invalid_argument("solver: dt_growth must be >= 1");
  if (!(seam_tol >= 0.0))
    throw std::invalid_argument("solver: seam_tol must be >= 0");
}

SimState::SimState(ScalarField n0, MediumParams mp, double t0)
    : t(t0), params(mp), n(std::move(n0)), p(n.grid), sigma(n.grid) {
  params.validate();
  refresh_caches();
}

void SimState::refresh_caches() {
  for (std::size_t i = 0; i < n.v.size(); ++i) {
    p.v[i] = pressure_of_density(n.v[i], params);
    sigma.v[i] = sigma_of_density(n.v[i], params);
  }
}

SeamViolation::SeamViolation(double t, double mass)
    : std::runtime_error([&] {
        char buf[96];
        std::snprintf(buf, sizeof buf,
                      "support reached the torus seam at t = %.6g "
                      "(boundary density %.3g)",
                      t, mass);
        return std::string(buf);
      }()),
      when(t) {}

double drift_cfl_dt(const SimState& s, const PotentialSpec& pot,
                    const SolverConfig& cfg, double horizon) {
  if (pot.zero()) return cfg.dt_max;
  const Grid& g = s.n.grid;
  PotentialSample ps = sample_potential(pot, g, s.t, horizon);
  double speed_sum = 0.0;
  double h_min = g.spacing(0);
  for (int axis = 0; axis < g.dim(); ++axis) {
    h_min = std::min(h_min, g.spacing(axis));
    double worst = 0.0;
    const int nx = g.nx(), ny = g.dim() == 2 ? g.ny() : 1;
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        std::size_t i = g.index(ix, iy);
        std::size_t ip = axis == 0 ? g.index(g.wrap(0, ix + 1), iy)
                                   : g.index(ix, g.wrap(1, iy + 1));
        worst = std::max(worst,
                         std::fabs(ps.V.v[ip] - ps.V.v[i]) / g.spacing(axis));
      }
    speed_sum += worst;
  }
  double dt = cfg.cfl * h_min / (2.0 * speed_sum + 1e-30);
  dt = std::min(dt, cfg.dt_max);
  if (dt < kDtFloor)
    throw std::runtime_error("drift_cfl_dt: stable step below 1e-12");
  return dt;
}

void step(SimState& s, const PotentialSpec& pot, const SolverConfig& cfg,
          double dt, double horizon) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const Grid& g = s.n.grid;
  std::vector<double> drifted;
  if (pot.zero()) {
    drifted = s.n.v;
  } else {
    PotentialSample ps = sample_potential(pot, g, s.t, horizon);
    drift_update(g, s.n.v, ps.V.v, dt, drifted);
  }
  std::vector<double> n_new = implicit_diffusion(g, s.params, drifted, dt, cfg);
  require_finite(n_new, "step");
  s.n.v = std::move(n_new);
  s.t += dt;
  s.step += 1;
  s.refresh_caches();
}

std::vector<SimState> run(SimState s, const PotentialSpec& pot,
                          const SolverConfig& cfg, double T,
                          const std::vector<double>& sample_times,
                          const RunHooks& hooks) {
  cfg.validate();
  pot.validate(s.n.grid.dim());
  for (std::size_t i = 1; i < sample_times.size(); ++i)
    if (sample_times[i] <= sample_times[i - 1])
      throw std::invalid_argument("run: sample times must increase");
  if (!sample_times.empty() &&
      (sample_times.front() < 0.0 || sample_times.back() > T + 1e-12))
    throw std::invalid_argument("run: sample times outside [0, T]");

  seam_check(s, cfg.seam_tol);
  std::vector<SimState> samples;
  std::size_t si = 0;
  // a resumed state skips the samples it already passed
  while (si < sample_times.size() &&
         sample_times[si] < s.t - 1e-11 * std::max(1.0, T))
    ++si;
  auto maybe_record = [&]() {
    while (si < sample_times.size() &&
           std::fabs(s.t - sample_times[si]) <= 1e-11 * std::max(1.0, T)) {
      samples.push_back(s);
      if (hooks.on_sample) hooks.on_sample(s);
      ++si;
    }
  };
  maybe_record();

  if (s.dt_next <= 0.0) s.dt_next = std::min(cfg.dt_initial, cfg.dt_max);
  const double t_end_tol = 1e-11 * std::max(1.0, T);

  while (s.t < T - t_end_tol) {
    double dt = std::min(s.dt_next, drift_cfl_dt(s, pot, cfg, T));
    dt = std::min(dt, T - s.t);
    if (si < sample_times.size() && sample_times[si] > s.t)
      dt = std::min(dt, sample_times[si] - s.t);
    if (dt < kDtFloor) throw std::runtime_error("run: dt underflow");

    bool accepted = false;
    double last_res = 0.0;
    for (int attempt = 0; attempt <= cfg.max_dt_halvings; ++attempt) {
      try {
        step(s, pot, cfg, dt, T);
        accepted = true;
        break;
      } catch (const StepFailure& f) {
        last_res = f.residual;
        dt *= 0.5;
        if (dt < kDtFloor) break;
      }
    }
    if (!accepted)
      throw StepFailure("run: step rejected after dt halvings", last_res);

    s.dt_next = std::min(cfg.dt_max, dt * cfg.dt_growth);
    seam_check(s, cfg.seam_tol);
    if (hooks.on_step) hooks.on_step(s);
    maybe_record();
  }
  return samples;
}

void write_checkpoint(const std::string& prefix, const SimState& s,
                      const std::string& config_hash) {
  write_field_binary(prefix + ".field", s.n);
  nlohmann::json j;
  j["format"] = "pmflow-checkpoint-1";
  j["gamma"] = s.params.gamma;
  j["nu"] = s.params.nu;
  j["t"] = s.t;
  j["step"] = s.step;
  j["dt_next"] = s.dt_next;
  j["config_hash"] = config_hash;
  std::ofstream out(prefix + ".json");
  if (!out) throw std::runtime_error("write_checkpoint: cannot open " + prefix);
  out << j.dump(2) << "\n";
}

SimState read_checkpoint(const std::string& prefix,
                         std::string* config_hash_out) {
  std::ifstream in(prefix + ".json");
  if (!in) throw std::runtime_error("read_checkpoint: cannot open " + prefix);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "pmflow-checkpoint-1")
    throw std::runtime_error("read_checkpoint: unknown format");
  MediumParams mp{j.at("gamma").get<double>(), j.at("nu").get<double>()};
  SimState s(read_field_binary(prefix + ".field"), mp, j.at("t").get<double>());
  s.step = j.at("step").get<std::int64_t>();
  s.dt_next = j.value("dt_next", 0.0);
  if (config_hash_out) *config_hash_out = j.value("config_hash", "");
  return s;
}

}  // namespace pmflow
