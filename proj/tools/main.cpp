#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <string>

#include "pmflow/config.hpp"
#include "pmflow/field_io.hpp"
#include "pmflow/identities.hpp"
#include "pmflow/report.hpp"

namespace fs = std::filesystem;
using namespace pmflow;

namespace {

int clamp_threads(int requested) {
  int t = requested < 1 ? 1 : requested;
  if (const char* cap = std::getenv("PMFLOW_MAX_THREADS")) {
    int c = std::atoi(cap);
    if (c >= 1 && c < t) t = c;
  }
  return t;
}

std::string fnv_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct CheckLine {
  std::string name;
  bool pass;
  std::string detail;
};

int print_checks(const std::vector<CheckLine>& lines) {
  bool all = true;
  for (const auto& l : lines) {
    std::printf("[%s] %s%s%s\n", l.pass ? "PASS" : "FAIL", l.name.c_str(),
                l.detail.empty() ? "" : ": ", l.detail.c_str());
    all = all && l.pass;
  }
  return all ? 0 : 3;
}

int cmd_simulate(const std::string& config_path, const std::string& out_override,
                 const std::string& resume, bool check) {
  RunConfig cfg = load_config(config_path);
  if (!out_override.empty()) cfg.out_dir = out_override;
  const std::string hash = config_hash(cfg);
  fs::create_directories(cfg.out_dir);
  write_manifest(cfg.out_dir, "simulate", hash, false, {});

  Grid grid = cfg.make_grid();
  MediumParams mp = cfg.medium;
  SimState state = [&]() {
    if (resume.empty()) return SimState(cfg.initial.realize(grid, mp), mp);
    std::string ckpt_hash;
    SimState s = read_checkpoint(resume, &ckpt_hash);
    if (ckpt_hash != hash)
      throw ConfigError("config: --resume: checkpoint was produced under hash " +
                        ckpt_hash + ", this config hashes to " + hash);
    if (s.n.grid != grid)
      throw ConfigError("config: --resume: checkpoint grid does not match");
    return s;
  }();

  PotentialBudget budget = assemble_budget(cfg.potential, grid, cfg.T,
                                           std::max(16, cfg.samples), mp.nu);
  std::vector<double> times;
  for (int j = 0; j <= cfg.samples; ++j) times.push_back(cfg.T * j / cfg.samples);
  times.back() = cfg.T;

  EstimateSeries series;
  double min_n = 0.0;
  double mass_prev = integrate(state.n);
  const double mass_scale = std::max(std::fabs(mass_prev), 1e-300);
  double step_drift_max = 0.0;
  RunHooks hooks;
  hooks.on_sample = [&](const SimState& s) {
    series.rows.push_back(snapshot_functionals(s, cfg.potential, cfg.T));
  };
  hooks.on_step = [&](const SimState& s) {
    for (double x : s.n.v) min_n = std::min(min_n, x);
    double m = integrate(s.n);
    step_drift_max = std::max(step_drift_max, std::fabs(m - mass_prev) / mass_scale);
    mass_prev = m;
    if (cfg.checkpoint_every > 0 && s.step % cfg.checkpoint_every == 0)
      write_checkpoint(cfg.out_dir + "/checkpoint", s, hash);
  };

  std::vector<SimState> finals =
      run(state, cfg.potential, cfg.solver, cfg.T, times, hooks);
  if (finals.empty()) throw std::runtime_error("simulate: no samples produced");
  const SimState& last = finals.back();
  write_checkpoint(cfg.out_dir + "/checkpoint", last, hash);

  std::vector<BoundCheck> checks = bound_checks(series, budget, mp);
  write_series_csv(cfg.out_dir + "/series.csv", series);
  write_summary_json(cfg.out_dir + "/summary.json", series, checks, mp, hash);
  write_field_binary(cfg.out_dir + "/n_final.field", last.n);
  write_field_csv(cfg.out_dir + "/n_final.csv", last.n);
  write_manifest(cfg.out_dir, "simulate", hash, true,
                 {"series.csv", "summary.json", "n_final.field", "n_final.csv",
                  "checkpoint.field", "checkpoint.json"});

  if (check) {
    std::vector<CheckLine> lines;
    for (const auto& c : checks) {
      char d[128];
      std::snprintf(d, sizeof d, "lhs=%.6g rhs=%.6g", c.lhs, c.rhs);
      lines.push_back({c.name, c.pass, d});
    }
    double run_drift = std::fabs(series.rows.back().mass -
                                 series.rows.front().mass) / mass_scale;
    char d1[64], d2[64], d3[64];
    std::snprintf(d1, sizeof d1, "%.3g", step_drift_max);
    std::snprintf(d2, sizeof d2, "%.3g", run_drift);
    std::snprintf(d3, sizeof d3, "%.3g", min_n);
    lines.push_back({"mass_per_step", step_drift_max <= 1e-12, d1});
    lines.push_back({"mass_run", run_drift <= 1e-10, d2});
    lines.push_back({"positivity", min_n >= -1e-12, d3});
    return print_checks(lines);
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override,
              bool check) {
  RunConfig cfg = load_config(config_path);
  if (!out_override.empty()) cfg.out_dir = out_override;
  const std::string hash = config_hash(cfg);
  fs::create_directories(cfg.out_dir);
  write_manifest(cfg.out_dir, "sweep", hash, false, {});

  GammaSweepPlan plan = cfg.to_plan();
  SweepResult result = run_sweep(plan);
  write_sweep_outputs(cfg.out_dir, result, hash);

  nlohmann::json limit_status;
  bool limit_ok = false;
  try {
    LimitFields limit = extract_limit(result);
    write_limit_outputs(cfg.out_dir, limit, hash);
    limit_status["extracted"] = true;
    limit_status["overshoot"] = limit.overshoot;
    limit_status["compl_residual"] = limit.compl_residual;
    limit_ok = true;
  } catch (const std::exception& e) {
    limit_status["extracted"] = false;
    limit_status["reason"] = e.what();
  }
  {
    std::ofstream out(cfg.out_dir + "/limit_status.json");
    out << limit_status.dump(2) << "\n";
  }
  std::vector<std::string> outputs = {"sweep.csv", "cauchy.csv",
                                      "limit_status.json"};
  if (limit_ok) outputs.push_back("limit_fields");
  write_manifest(cfg.out_dir, "sweep", hash, true, outputs);

  if (check) {
    std::vector<CheckLine> lines;
    bool all_ok = true, bounds = true;
    for (const auto& o : result.outcomes) {
      all_ok = all_ok && o.ok;
      for (const auto& c : o.checks) bounds = bounds && c.pass;
    }
    lines.push_back({"all_runs_ok", all_ok, ""});
    lines.push_back({"a_priori_bounds", bounds, ""});
    bool cauchy_dec = result.cauchy.size() >= 1;
    for (std::size_t i = 1; i < result.cauchy.size(); ++i)
      cauchy_dec = cauchy_dec &&
                   result.cauchy[i].n_l2_sup < result.cauchy[i - 1].n_l2_sup;
    lines.push_back({"cauchy_decreasing", cauchy_dec, ""});
    if (result.outcomes.size() >= 3) {
      const char* names[4] = {"envelope_grad_p_l4", "envelope_p_hess",
                              "envelope_lap_sig", "envelope_grad_sig_l4"};
      for (int q = 0; q < 4; ++q) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t i = result.outcomes.size() - 3;
             i < result.outcomes.size(); ++i) {
          const Accumulated& a = result.outcomes[i].acc;
          double v = q == 0 ? a.grad_p_l4
                   : q == 1 ? a.p_hess
                   : q == 2 ? a.lap_sig
                            : a.grad_sig_l4;
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        char d[64];
        std::snprintf(d, sizeof d, "spread=%.3g", hi > 0 ? (hi - lo) / hi : 0.0);
        lines.push_back({names[q], hi > 0.0 && (hi - lo) / hi <= 0.20, d});
      }
    }
    return print_checks(lines);
  }
  return 0;
}

int cmd_identities(int resolution, int dim, const std::string& out_dir,
                   bool check, int threads) {
  if (resolution < 8 || !is_power_of_two(resolution))
    throw ConfigError("config: --resolution must be a power of two, >= 8");
  if (dim != 1 && dim != 2) throw ConfigError("config: --dim must be 1 or 2");
  fs::create_directories(out_dir);
  char params[64];
  std::snprintf(params, sizeof params, "identities-n%d-d%d", resolution, dim);
  const std::string hash = fnv_hex(params);
  write_manifest(out_dir, "identities", hash, false, {});

  auto corpus = manufactured_corpus(24, dim);
  auto rows = run_identity_corpus(corpus, resolution, Scheme::spectral, 1e-9,
                                  dim, threads);
  write_corpus_csv(out_dir + "/identities.csv", rows);

  // order of the centered-scheme residual under grid refinement
  const int levels[3] = {resolution / 2, resolution, resolution * 2};
  std::vector<std::vector<CorpusRow>> fd(3);
  for (int l = 0; l < 3; ++l)
    fd[l] = run_identity_corpus(corpus, levels[l], Scheme::centered2, 1e-9, dim,
                                threads);
  std::FILE* out = std::fopen((out_dir + "/fd_orders.csv").c_str(), "w");
  if (!out) throw std::runtime_error("identities: cannot open fd_orders.csv");
  std::fprintf(out, "pair_id,identity,err_coarse,err_mid,err_fine,order_1,order_2\n");
  bool orders_ok = true;
  for (std::size_t r = 0; r < fd[0].size(); ++r) {
    if (fd[0][r].which == "32") continue;
    double e0 = fd[0][r].err, e1 = fd[1][r].err, e2 = fd[2][r].err;
    double scale = 1.0 + std::fabs(fd[2][r].lhs);
    auto order = [&](double ec, double ef) {
      if (ef < 1e-13 * scale) return 99.0;  // at roundoff already
      return std::log2(ec / ef);
    };
    double o1 = order(e0, e1), o2 = order(e1, e2);
    orders_ok = orders_ok && o1 >= 1.9 && o2 >= 1.9;
    std::fprintf(out, "%d,%s,%.17g,%.17g,%.17g,%.6g,%.6g\n", fd[0][r].pair_id,
                 fd[0][r].which.c_str(), e0, e1, e2, o1, o2);
  }
  std::fclose(out);
  write_manifest(out_dir, "identities", hash, true,
                 {"identities.csv", "fd_orders.csv"});

  if (check) {
    bool spectral_ok = true;
    for (const auto& r : rows) spectral_ok = spectral_ok && r.pass;
    std::vector<CheckLine> lines;
    lines.push_back({"spectral_corpus", spectral_ok, ""});
    lines.push_back({"fd_orders", orders_ok, ""});
    return print_checks(lines);
  }
  return 0;
}

int cmd_focusing(const std::string& config_path, const std::string& out_override,
                 bool check) {
  RunConfig cfg = load_config(config_path);
  if (!out_override.empty()) cfg.out_dir = out_override;
  const std::string hash = config_hash(cfg);
  fs::create_directories(cfg.out_dir);
  write_manifest(cfg.out_dir, "focusing", hash, false, {});

  GammaSweepPlan plan = cfg.to_plan();
  FocusingResult result = focusing_study(plan);
  write_focusing_csv(cfg.out_dir + "/focusing.csv", result);
  write_manifest(cfg.out_dir, "focusing", hash, true, {"focusing.csv"});

  if (check) {
    std::vector<CheckLine> lines;
    bool all_ok = true;
    for (const auto& r : result.rows) all_ok = all_ok && r.ok;
    lines.push_back({"all_runs_ok", all_ok, ""});
    bool l6_up = true, l8_up = true;
    for (std::size_t i = 1; i < result.rows.size(); ++i) {
      l6_up = l6_up &&
              result.rows[i].grad_p_lq_max[2] > result.rows[i - 1].grad_p_lq_max[2];
      l8_up = l8_up &&
              result.rows[i].grad_p_lq_max[3] > result.rows[i - 1].grad_p_lq_max[3];
    }
    lines.push_back({"l6_increasing", l6_up, ""});
    lines.push_back({"l8_increasing", l8_up, ""});
    return print_checks(lines);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stiff porous medium laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir, resume, report_dir;
  bool check = false;
  int threads = 1, resolution = 128, dim = 2;

  auto* sim = app.add_subcommand("simulate", "advance one medium to time T");
  sim->add_option("--config", config_path, "JSON run configuration")->required();
  sim->add_option("--out", out_dir, "output directory override");
  sim->add_option("--resume", resume, "checkpoint prefix to continue from");
  sim->add_flag("--check", check, "verify invariants, exit 3 on violation");
  sim->add_option("--threads", threads, "worker thread cap");

  auto* swp = app.add_subcommand("sweep", "run the stiffness sweep");
  swp->add_option("--config", config_path, "JSON run configuration")->required();
  swp->add_option("--out", out_dir, "output directory override");
  swp->add_flag("--check", check, "verify sweep-level expectations");
  swp->add_option("--threads", threads, "worker thread cap");

  auto* idn = app.add_subcommand("identities", "verify the integral identities");
  idn->add_option("--resolution", resolution, "grid resolution (power of two)");
  idn->add_option("--dim", dim, "dimension, 1 or 2");
  idn->add_option("--out", out_dir, "output directory");
  idn->add_flag("--check", check, "exit 3 unless everything passes");
  idn->add_option("--threads", threads, "worker thread cap");

  auto* foc = app.add_subcommand("focusing", "annulus collapse study");
  foc->add_option("--config", config_path, "JSON run configuration")->required();
  foc->add_option("--out", out_dir, "output directory override");
  foc->add_flag("--check", check, "verify growth expectations");

  auto* rep = app.add_subcommand("report", "render charts from an output dir");
  rep->add_option("--dir", report_dir, "finished output directory")->required();

  int rc = 0;
  sim->callback([&]() { rc = cmd_simulate(config_path, out_dir, resume, check); });
  swp->callback([&]() { rc = cmd_sweep(config_path, out_dir, check); });
  idn->callback([&]() {
    rc = cmd_identities(resolution, dim, out_dir.empty() ? "out" : out_dir,
                        check, clamp_threads(threads));
  });
  foc->callback([&]() { rc = cmd_focusing(config_path, out_dir, check); });
  rep->callback([&]() { write_report(report_dir); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return rc;
}
