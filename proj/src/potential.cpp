#include "pmflow/potential.hpp"

#include <cmath>
#include <numbers>

namespace pmflow {
namespace {

struct Eval3 {
  double f, d1, d2;
};

Eval3 factor_eval(const AxisFactor& a, double x, double L) {
  const double twopi = 2.0 * std::numbers::pi;
  switch (a.kind) {
    case AxisFactor::Kind::one:
      return {1.0, 0.0, 0.0};
    case AxisFactor::Kind::cos_mode: {
      double w = twopi * a.k / L;
      double c = std::cos(w * x), s = std::sin(w * x);
      return {c, -w * s, -w * w * c};
    }
    case AxisFactor::Kind::sin_mode: {
      double w = twopi * a.k / L;
      double c = std::cos(w * x), s = std::sin(w * x);
      return {s, w * c, -w * w * s};
    }
    case AxisFactor::Kind::bump: {
      double th = twopi * (x - a.center) / L;
      double dth = twopi / L;
      double sc = (L / (twopi * a.width)) * (L / (twopi * a.width));
      double c = std::cos(th), s = std::sin(th);
      double f = std::exp(sc * (c - 1.0));
      double d1 = -f * sc * s * dth;
      double d2 = f * dth * dth * sc * (sc * s * s - c);
      return {f, d1, d2};
    }
  }
  return {0.0, 0.0, 0.0};
}

struct Eval2 {
  double f, d1;
};

Eval2 envelope_eval(const Envelope& e, double t) {
  switch (e.kind) {
    case Envelope::Kind::constant:
      return {1.0, 0.0};
    case Envelope::Kind::exp_decay: {
      double v = std::exp(-e.rate * t);
      return {v, -e.rate * v};
    }
    case Envelope::Kind::cosine:
      return {std::cos(e.rate * t), -e.rate * std::sin(e.rate * t)};
  }
  return {0.0, 0.0};
}

}  // namespace

bool PotentialSpec::time_independent() const {
  for (const auto& m : modes)
    if (m.envelope.kind != Envelope::Kind::constant) return false;
  return true;
}

void PotentialSpec::validate(int dim) const {
  for (const auto& m : modes) {
    for (int a = 0; a < 2; ++a) {
      const AxisFactor& f = m.factor[a];
      if (a >= dim && f.kind != AxisFactor::Kind::one)
        throw std::invalid_argument("potential: factor on absent axis");
      if ((f.kind == AxisFactor::Kind::cos_mode ||
           f.kind == AxisFactor::Kind::sin_mode) &&
          f.k < 1)
        throw std::invalid_argument("potential: mode index must be >= 1");
      if (f.kind == AxisFactor::Kind::bump && !(f.width > 0.0))
        throw std::invalid_argument("potential: bump width must be positive");
    }
    if (m.envelope.kind != Envelope::Kind::constant && m.envelope.rate < 0.0)
      throw std::invalid_argument("potential: envelope rate must be >= 0");
  }
}

PotentialSample sample_potential(const PotentialSpec& spec, const Grid& g,
                                 double t, double horizon) {
  if (t < 0.0 || t > horizon + 1e-12)
    throw std::invalid_argument("sample_potential: t outside [0, horizon]");
  PotentialSample out(g);
  const int ny = g.dim() == 2 ? g.ny() : 1;
  for (const auto& m : spec.modes) {
    Eval2 env = envelope_eval(m.envelope, t);
    // cache the x line, reused for every row
    std::vector<Eval3> fx(g.nx());
    for (int ix = 0; ix < g.nx(); ++ix)
      fx[ix] = factor_eval(m.factor[0], g.coord(0, ix), g.length(0));
    for (int iy = 0; iy < ny; ++iy) {
      Eval3 fy = g.dim() == 2
                     ? factor_eval(m.factor[1], g.coord(1, iy), g.length(1))
                     : Eval3{1.0, 0.0, 0.0};
      for (int ix = 0; ix < g.nx(); ++ix) {
        std::size_t i = g.index(ix, iy);
        double A = m.amplitude;
        out.V.v[i] += A * env.f * fx[ix].f * fy.f;
        out.grad[0][i] += A * env.f * fx[ix].d1 * fy.f;
        out.hess.xx[i] += A * env.f * fx[ix].d2 * fy.f;
        out.lap.v[i] += A * env.f * fx[ix].d2 * fy.f;
        out.dt.v[i] += A * env.d1 * fx[ix].f * fy.f;
        if (g.dim() == 2) {
          out.grad[1][i] += A * env.f * fx[ix].f * fy.d1;
          out.hess.yy[i] += A * env.f * fx[ix].f * fy.d2;
          out.hess.xy[i] += A * env.f * fx[ix].d1 * fy.d1;
          out.lap.v[i] += A * env.f * fx[ix].f * fy.d2;
        }
      }
    }
  }
  return out;
}

double potential_value(const PotentialSpec& spec, int dim, double Lx, double Ly,
                       double x, double y, double t) {
  double v = 0.0;
  for (const auto& m : spec.modes) {
    Eval2 env = envelope_eval(m.envelope, t);
    Eval3 fx = factor_eval(m.factor[0], x, Lx);
    double fyv = dim == 2 ? factor_eval(m.factor[1], y, Ly).f : 1.0;
    v += m.amplitude * env.f * fx.f * fyv;
  }
  return v;
}

PotentialBudget assemble_budget(const PotentialSpec& spec, const Grid& g,
                                double T, int time_samples, double nu) {
  if (!(T > 0.0)) throw std::invalid_argument("assemble_budget: T must be > 0");
  spec.validate(g.dim());
  int S = std::max(16, time_samples);
  PotentialBudget b;
  b.horizon = T;

  double acc_lap2 = 0.0, acc_hess2 = 0.0, acc_dt2 = 0.0;
  double acc_grad2 = 0.0, acc_grad4 = 0.0;
  const double dt = T / S;
  for (int j = 0; j <= S; ++j) {
    double t = j * dt;
    double w = (j == 0 || j == S) ? 0.5 * dt : dt;
    PotentialSample ps = sample_potential(spec, g, t, T);

    double sup_v = 0.0, sup_dt = 0.0, sup_mix = 0.0;
    double lap2 = 0.0, hess2 = 0.0, dt2 = 0.0, grad2 = 0.0, grad4 = 0.0;
    for (std::size_t i = 0; i < ps.V.v.size(); ++i) {
      sup_v = std::max(sup_v, std::fabs(ps.V.v[i]));
      sup_dt = std::max(sup_dt, std::fabs(ps.dt.v[i]));
      sup_mix = std::max(sup_mix, std::fabs(nu * ps.lap.v[i] + ps.dt.v[i]));
      lap2 += ps.lap.v[i] * ps.lap.v[i];
      dt2 += ps.dt.v[i] * ps.dt.v[i];
      double h2 = ps.hess.xx[i] * ps.hess.xx[i];
      double g2 = ps.grad[0][i] * ps.grad[0][i];
      if (g.dim() == 2) {
        h2 += ps.hess.yy[i] * ps.hess.yy[i] + 2.0 * ps.hess.xy[i] * ps.hess.xy[i];
        g2 += ps.grad[1][i] * ps.grad[1][i];
      }
      hess2 += h2;
      grad2 += g2;
      grad4 += g2 * g2;
    }
    double vol = g.cell_volume();
    b.sup_V = std::max(b.sup_V, sup_v);
    b.dtV_l1_linf += w * sup_dt;
    b.nu_lap_dt_l1_linf += w * sup_mix;
    acc_lap2 += w * lap2 * vol;
    acc_hess2 += w * hess2 * vol;
    acc_dt2 += w * dt2 * vol;
    acc_grad2 += w * grad2 * vol;
    acc_grad4 += w * grad4 * vol;
  }
  b.lapV_l2l2 = std::sqrt(acc_lap2);
  b.hessV_l2l2 = std::sqrt(acc_hess2);
  b.dtV_l2l2 = std::sqrt(acc_dt2);
  b.gradV_l2l2 = std::sqrt(acc_grad2);
  b.gradV_l4l4 = std::pow(acc_grad4, 0.25);
  return b;
}

}  // namespace pmflow
