#include "pmflow/estimator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "pmflow/ops.hpp"

namespace pmflow {

EstimateRow snapshot_functionals(const SimState& s, const PotentialSpec& pot,
                                 double horizon) {
  const Grid& g = s.n.grid;
  const int dim = g.dim();
  EstimateRow row;
  row.t = s.t;
  row.step = s.step;
  row.mass = integrate(s.n);
  row.n_sup = lp_norm(s.n, std::numeric_limits<double>::infinity());
  row.p_sup = lp_norm(s.p, std::numeric_limits<double>::infinity());
  row.p_l1 = integrate(s.p);
  row.overshoot = std::max(0.0, row.n_sup - 1.0);

  VectorField grad_p = gradient(s.p, Scheme::centered2);
  ScalarField lap_p = laplacian(s.p, Scheme::centered2);
  TensorField hess_p = hessian(s.p, Scheme::centered2);
  VectorField grad_sig = gradient(s.sigma, Scheme::centered2);
  ScalarField lap_sig = laplacian(s.sigma, Scheme::centered2);

  PotentialSample ps(g);
  if (!pot.zero()) ps = sample_potential(pot, g, s.t, horizon);

  const std::size_t N = g.cell_count();
  std::vector<double> c_gp2(N), c_gp4(N), c_ph(N), c_pl(N), c_gs2(N), c_gs4(N),
      c_ls(N), c_w(N), c_p2l(N), c_p2h(N), c_comp(N);
  for (std::size_t i = 0; i < N; ++i) {
    double gp2 = grad_p[0][i] * grad_p[0][i];
    double gs2 = grad_sig[0][i] * grad_sig[0][i];
    double h2 = hess_p.xx[i] * hess_p.xx[i];
    if (dim == 2) {
      gp2 += grad_p[1][i] * grad_p[1][i];
      gs2 += grad_sig[1][i] * grad_sig[1][i];
      h2 += 2.0 * hess_p.xy[i] * hess_p.xy[i] + hess_p.yy[i] * hess_p.yy[i];
    }
    double p = s.p.v[i];
    double lp = lap_p.v[i];
    double lf = lp + ps.lap.v[i];
    c_gp2[i] = gp2;
    c_gp4[i] = gp2 * gp2;
    c_ph[i] = p * h2;
    c_pl[i] = p * lp * lp;
    c_gs2[i] = gs2;
    c_gs4[i] = gs2 * gs2;
    c_ls[i] = lap_sig.v[i] * lap_sig.v[i];
    c_w[i] = p * lf * lf;
    c_p2l[i] = p * p * lp * lp;
    c_p2h[i] = p * p * h2;
    c_comp[i] = p * std::max(0.0, 1.0 - s.n.v[i]);
  }
  const double vol = g.cell_volume();
  row.grad_p_l2sq = compensated_total(c_gp2) * vol;
  row.grad_p_l4_4 = compensated_total(c_gp4) * vol;
  row.p_hess_sq = compensated_total(c_ph) * vol;
  row.p_lap_sq = compensated_total(c_pl) * vol;
  row.grad_sig_l2sq = compensated_total(c_gs2) * vol;
  row.grad_sig_l4_4 = compensated_total(c_gs4) * vol;
  row.lap_sig_sq = compensated_total(c_ls) * vol;
  row.weighted_plapf =
      (s.params.gamma - 2.0 / 3.0) * compensated_total(c_w) * vol;
  row.p2_lap_sq = compensated_total(c_p2l) * vol;
  row.p2_hess_sq = compensated_total(c_p2h) * vol;
  row.compl_residual = compensated_total(c_comp) * vol;

  row.energy_g = energy_gamma(s.n, ps.V, s.params);
  {
    std::vector<double> c_ent(s.n.v.size());
    for (std::size_t i = 0; i < s.n.v.size(); ++i)
      c_ent[i] = s.n.v[i] > 0.0 ? s.n.v[i] * std::log(s.n.v[i]) : 0.0;
    row.entropy = compensated_total(c_ent) * vol;
  }
  auto einf = energy_infinity(s.n, ps.V);
  row.energy_inf_finite = einf.has_value();
  row.energy_inf = einf.value_or(0.0);
  return row;
}

Accumulated accumulate(const EstimateSeries& series) {
  Accumulated a;
  const auto& r = series.rows;
  for (std::size_t i = 1; i < r.size(); ++i) {
    double w = 0.5 * (r[i].t - r[i - 1].t);
    a.grad_p_l2 += w * (r[i].grad_p_l2sq + r[i - 1].grad_p_l2sq);
    a.grad_p_l4 += w * (r[i].grad_p_l4_4 + r[i - 1].grad_p_l4_4);
    a.p_hess += w * (r[i].p_hess_sq + r[i - 1].p_hess_sq);
    a.p_lap += w * (r[i].p_lap_sq + r[i - 1].p_lap_sq);
    a.grad_sig_l2 += w * (r[i].grad_sig_l2sq + r[i - 1].grad_sig_l2sq);
    a.grad_sig_l4 += w * (r[i].grad_sig_l4_4 + r[i - 1].grad_sig_l4_4);
    a.lap_sig += w * (r[i].lap_sig_sq + r[i - 1].lap_sig_sq);
    a.weighted += w * (r[i].weighted_plapf + r[i - 1].weighted_plapf);
  }
  return a;
}

std::vector<BoundCheck> bound_checks(const EstimateSeries& series,
                                     const PotentialBudget& budget,
                                     const MediumParams& mp) {
  if (series.rows.empty())
    throw std::invalid_argument("bound_checks: empty series");
  const auto& rows = series.rows;
  const EstimateRow& first = rows.front();
  std::vector<BoundCheck> out;

  auto finish = [](BoundCheck c, double slack) {
    c.margin = (c.rhs - c.lhs) / std::max(std::fabs(c.rhs), 1e-300);
    c.pass = c.lhs <= c.rhs + slack * std::max(std::fabs(c.rhs), 1e-30);
    return c;
  };

  double p_sup_max = 0.0, n_sup_max = 0.0;
  for (const auto& r : rows) {
    p_sup_max = std::max(p_sup_max, r.p_sup);
    n_sup_max = std::max(n_sup_max, r.n_sup);
  }

  // sup bound on the pressure over the whole window
  {
    BoundCheck c;
    c.lhs = p_sup_max;
    if (mp.nu == 0.0) {
      c.name = "sup_pressure_comparison";
      c.rhs = first.p_sup + 2.0 * budget.sup_V + budget.dtV_l1_linf;
    } else {
      c.name = "sup_pressure_stiff";
      c.rhs = first.p_sup + 2.0 * budget.sup_V + budget.nu_lap_dt_l1_linf;
    }
    out.push_back(finish(c, 0.02));
  }

  if (mp.nu > 0.0) {
    BoundCheck c;
    c.name = "sup_density_stiff";
    double cstar = first.p_sup + 2.0 * budget.sup_V + budget.nu_lap_dt_l1_linf;
    c.lhs = n_sup_max;
    c.rhs = cstar > 0.0 ? std::exp(std::log(cstar) / mp.gamma) : 0.0;
    out.push_back(finish(c, 0.02));
  }

  if (budget.sup_V == 0.0) {
    // no forcing: the pressure maximum must not grow
    BoundCheck c;
    c.name = "sup_pressure_monotone";
    double worst = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i)
      worst = std::max(worst, rows[i].p_sup - rows[i - 1].p_sup);
    c.lhs = worst;
    c.rhs = 0.0;
    c.margin = -worst;
    c.pass = worst <= 1e-10 * std::max(1.0, p_sup_max);
    out.push_back(c);
  }

  {
    BoundCheck c;
    c.name = "l2_gradient_budget";
    Accumulated acc = accumulate(series);
    c.lhs = acc.grad_p_l2;
    c.rhs = budget.gradV_l2l2 * budget.gradV_l2l2 +
            2.0 * first.p_l1 / (mp.gamma - 1.0);
    out.push_back(finish(c, 0.05));
  }

  {
    // quartic gradient control through the weighted Hessian integrals
    BoundCheck c;
    c.name = "quartic_gradient_rows";
    double worst_lhs = 0.0, worst_rhs = 0.0, worst_gap =
        -std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      double rhs = 8.0 * r.p2_lap_sq + 4.0 * r.p2_hess_sq;
      double gap = r.grad_p_l4_4 - rhs;
      if (gap > worst_gap) {
        worst_gap = gap;
        worst_lhs = r.grad_p_l4_4;
        worst_rhs = rhs;
      }
    }
    c.lhs = worst_lhs;
    c.rhs = worst_rhs;
    out.push_back(finish(c, 0.05));
  }

  if (budget.dtV_l1_linf == 0.0) {
    // autonomous potential: the natural energy must dissipate; for nu > 0
    // the dissipated functional carries the extra entropy term
    BoundCheck c;
    c.name = "energy_dissipation";
    auto lyap = [&](const EstimateRow& r) {
      return r.energy_g + mp.nu * r.entropy;
    };
    double worst = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      double allowed = 1e-8 * static_cast<double>(rows[i].step - rows[i - 1].step) *
                       std::max(1.0, std::fabs(lyap(rows[i - 1])));
      worst = std::max(worst, lyap(rows[i]) - lyap(rows[i - 1]) - allowed);
    }
    c.lhs = worst;
    c.rhs = 0.0;
    c.margin = -worst;
    c.pass = worst <= 0.0;
    out.push_back(c);
  }
  return out;
}

void write_series_csv(const std::string& path, const EstimateSeries& series) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("write_series_csv: cannot open " + path);
  std::fprintf(out,
               "t,step,mass,p_sup,n_sup,p_l1,grad_p_l2sq,grad_p_l4_4,"
               "p_hess_sq,p_lap_sq,grad_sig_l2sq,grad_sig_l4_4,lap_sig_sq,"
               "weighted_plapf,p2_lap_sq,p2_hess_sq,compl_residual,overshoot,"
               "energy_gamma,entropy,energy_inf_finite,energy_inf\n");
  for (const auto& r : series.rows)
    std::fprintf(out,
                 "%.17g,%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                 "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                 "%d,%.17g\n",
                 r.t, static_cast<long long>(r.step), r.mass, r.p_sup, r.n_sup,
                 r.p_l1, r.grad_p_l2sq, r.grad_p_l4_4, r.p_hess_sq, r.p_lap_sq,
                 r.grad_sig_l2sq, r.grad_sig_l4_4, r.lap_sig_sq,
                 r.weighted_plapf, r.p2_lap_sq, r.p2_hess_sq, r.compl_residual,
                 r.overshoot, r.energy_g, r.entropy,
                 r.energy_inf_finite ? 1 : 0, r.energy_inf);
  std::fclose(out);
}

void write_summary_json(const std::string& path, const EstimateSeries& series,
                        const std::vector<BoundCheck>& checks,
                        const MediumParams& mp, const std::string& config_hash) {
  nlohmann::json j;
  j["gamma"] = mp.gamma;
  j["nu"] = mp.nu;
  j["config_hash"] = config_hash;
  j["samples"] = series.rows.size();
  if (!series.rows.empty()) {
    j["t_final"] = series.rows.back().t;
    j["mass_initial"] = series.rows.front().mass;
    j["mass_final"] = series.rows.back().mass;
    double ps = 0.0, ns = 0.0, ov = 0.0;
    for (const auto& r : series.rows) {
      ps = std::max(ps, r.p_sup);
      ns = std::max(ns, r.n_sup);
      ov = std::max(ov, r.overshoot);
    }
    j["p_sup_max"] = ps;
    j["n_sup_max"] = ns;
    j["overshoot_max"] = ov;
    j["compl_final"] = series.rows.back().compl_residual;
  }
  Accumulated acc = accumulate(series);
  j["accumulated"] = {
      {"grad_p_l2", acc.grad_p_l2},   {"grad_p_l4", acc.grad_p_l4},
      {"p_hess", acc.p_hess},         {"p_lap", acc.p_lap},
      {"grad_sig_l2", acc.grad_sig_l2}, {"grad_sig_l4", acc.grad_sig_l4},
      {"lap_sig", acc.lap_sig},       {"weighted", acc.weighted}};
  j["bound_checks"] = nlohmann::json::array();
  bool all_pass = true;
  for (const auto& c : checks) {
    j["bound_checks"].push_back({{"name", c.name},
                                 {"lhs", c.lhs},
                                 {"rhs", c.rhs},
                                 {"margin", c.margin},
                                 {"pass", c.pass}});
    all_pass = all_pass && c.pass;
  }
  j["all_bounds_pass"] = all_pass;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_summary_json: cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace pmflow
