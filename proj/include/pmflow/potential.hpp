#pragma once

#include <array>
#include <vector>

#include "pmflow/grid.hpp"

namespace pmflow {

// Separable smooth potentials: each mode is
//   amplitude * envelope(t) * factor_x(x) * factor_y(y)
// with every derivative available in closed form. bump is the periodic
// Gaussian exp(sc*(cos(2pi(x-c)/L)-1)), sc = (L/(2 pi w))^2, which matches
// exp(-(x-c)^2/(2w^2)) for w << L.
struct AxisFactor {
  enum class Kind { one, cos_mode, sin_mode, bump };
  Kind kind = Kind::one;
  int k = 1;           // integer mode count for cos/sin
  double center = 0.0; // bump only
  double width = 1.0;  // bump only, > 0
};

struct Envelope {
  enum class Kind { constant, exp_decay, cosine };
  Kind kind = Kind::constant;
  double rate = 0.0;  // lambda for exp(-lambda t), omega for cos(omega t)
};

struct PotentialMode {
  double amplitude = 0.0;
  std::array<AxisFactor, 2> factor;
  Envelope envelope;
};

struct PotentialSpec {
  std::vector<PotentialMode> modes;

  bool zero() const { return modes.empty(); }
  bool time_independent() const;
  void validate(int dim) const;
};

struct PotentialSample {
  ScalarField V;
  VectorField grad;
  ScalarField lap;
  TensorField hess;
  ScalarField dt;

  explicit PotentialSample(const Grid& g)
      : V(g), grad(g), lap(g), hess(g), dt(g) {}
};

// t must lie in [0, horizon]
PotentialSample sample_potential(const PotentialSpec& spec, const Grid& g,
                                 double t, double horizon);

double potential_value(const PotentialSpec& spec, int dim, double Lx, double Ly,
                       double x, double y, double t);

// Space-time norms of the potential over [0, T], trapezoid in time with at
// least 16 intervals, exact quadrature in space for resolved modes. Mixed
// norms are stored after the outer root, so each entry is 1-homogeneous in
// the amplitude.
struct PotentialBudget {
  double horizon = 0.0;
  double sup_V = 0.0;            // sup_t ||V||_inf
  double dtV_l1_linf = 0.0;      // int ||dt V||_inf
  double lapV_l2l2 = 0.0;        // (int int |lap V|^2)^(1/2)
  double hessV_l2l2 = 0.0;       // (int int |D2 V|^2)^(1/2)
  double dtV_l2l2 = 0.0;
  double gradV_l2l2 = 0.0;
  double gradV_l4l4 = 0.0;       // (int int |grad V|^4)^(1/4)
  double nu_lap_dt_l1_linf = 0.0;  // int ||nu lap V + dt V||_inf
};

PotentialBudget assemble_budget(const PotentialSpec& spec, const Grid& g,
                                double T, int time_samples, double nu);

}  // namespace pmflow
