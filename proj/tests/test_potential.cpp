#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <pmflow/grid.hpp>
#include <pmflow/ops.hpp>
#include <pmflow/potential.hpp>

using namespace pmflow;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

AxisFactor bump(double center, double width) {
  AxisFactor f;
  f.kind = AxisFactor::Kind::bump;
  f.center = center;
  f.width = width;
  return f;
}

AxisFactor mode(AxisFactor::Kind kind, int k) {
  AxisFactor f;
  f.kind = kind;
  f.k = k;
  return f;
}

// decaying off-center well with an oscillating ripple on top
PotentialSpec well_spec() {
  PotentialSpec spec;
  PotentialMode well;
  well.amplitude = -3.0;
  well.factor = {bump(2.1, 0.8), bump(3.4, 1.1)};
  well.envelope = {Envelope::Kind::exp_decay, 0.7};
  spec.modes.push_back(well);
  PotentialMode ripple;
  ripple.amplitude = 0.4;
  ripple.factor = {mode(AxisFactor::Kind::cos_mode, 2),
                   mode(AxisFactor::Kind::sin_mode, 1)};
  ripple.envelope = {Envelope::Kind::cosine, 1.3};
  spec.modes.push_back(ripple);
  return spec;
}

double max_abs_diff(const std::vector<double>& a,
                    const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace

TEST_CASE("validation rejects malformed specs") {
  PotentialSpec spec = well_spec();
  spec.validate(2);  // fine as built

  PotentialSpec on_absent = well_spec();
  CHECK_THROWS_AS(on_absent.validate(1), std::invalid_argument);

  PotentialSpec bad_k;
  bad_k.modes.push_back(PotentialMode{1.0, {mode(AxisFactor::Kind::cos_mode, 0),
                                            AxisFactor{}},
                                      Envelope{}});
  CHECK_THROWS_AS(bad_k.validate(2), std::invalid_argument);

  PotentialSpec bad_width;
  bad_width.modes.push_back(
      PotentialMode{1.0, {bump(0.0, 0.0), AxisFactor{}}, Envelope{}});
  CHECK_THROWS_AS(bad_width.validate(2), std::invalid_argument);

  PotentialSpec bad_rate = well_spec();
  bad_rate.modes[0].envelope.rate = -0.1;
  CHECK_THROWS_AS(bad_rate.validate(2), std::invalid_argument);

  CHECK(PotentialSpec{}.zero());
  CHECK(!well_spec().zero());
  CHECK(!well_spec().time_independent());
}

TEST_CASE("closed-form derivatives match spectral differentiation") {
  Grid g = Grid::square(64, 6.0);
  PotentialSample ps = sample_potential(well_spec(), g, 0.37, 1.0);

  VectorField sg = gradient(ps.V, Scheme::spectral);
  ScalarField sl = laplacian(ps.V, Scheme::spectral);
  TensorField sh = hessian(ps.V, Scheme::spectral);

  CHECK(max_abs_diff(ps.grad[0], sg[0]) < 1e-9);
  CHECK(max_abs_diff(ps.grad[1], sg[1]) < 1e-9);
  CHECK(max_abs_diff(ps.lap.v, sl.v) < 1e-9);
  CHECK(max_abs_diff(ps.hess.xx, sh.xx) < 1e-9);
  CHECK(max_abs_diff(ps.hess.xy, sh.xy) < 1e-9);
  CHECK(max_abs_diff(ps.hess.yy, sh.yy) < 1e-9);

  // laplacian is the hessian trace
  std::vector<double> tr(ps.lap.v.size());
  for (std::size_t i = 0; i < tr.size(); ++i)
    tr[i] = ps.hess.xx[i] + ps.hess.yy[i];
  CHECK(max_abs_diff(ps.lap.v, tr) < 1e-12);
}

TEST_CASE("time derivative follows the envelope") {
  Grid g = Grid::square(32, 6.0);

  PotentialSpec decay;
  decay.modes.push_back(well_spec().modes[0]);
  const double lam = decay.modes[0].envelope.rate;
  PotentialSample ps = sample_potential(decay, g, 0.52, 1.0);
  std::vector<double> want(ps.V.v.size());
  for (std::size_t i = 0; i < want.size(); ++i) want[i] = -lam * ps.V.v[i];
  CHECK(max_abs_diff(ps.dt.v, want) < 1e-13 * (1.0 + max_abs(ps.V.v)));

  // oscillating envelope: compare against a central difference in t
  PotentialSpec osc;
  osc.modes.push_back(well_spec().modes[1]);
  const double t0 = 0.41, h = 1e-5;
  PotentialSample mid = sample_potential(osc, g, t0, 1.0);
  PotentialSample lo = sample_potential(osc, g, t0 - h, 1.0);
  PotentialSample hi = sample_potential(osc, g, t0 + h, 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < mid.V.v.size(); ++i) {
    double fd = (hi.V.v[i] - lo.V.v[i]) / (2.0 * h);
    worst = std::max(worst, std::fabs(fd - mid.dt.v[i]));
  }
  CHECK(worst < 1e-8);

  // and the oscillation starts flat
  PotentialSample start = sample_potential(osc, g, 0.0, 1.0);
  CHECK(max_abs(start.dt.v) == 0.0);

  CHECK_THROWS_AS(sample_potential(osc, g, -0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sample_potential(osc, g, 1.0 + 1e-6, 1.0),
                  std::invalid_argument);
}

TEST_CASE("pointwise value agrees with the sampled field") {
  Grid g = Grid(2, {16, 16}, {6.0, 5.0});
  PotentialSpec spec = well_spec();
  PotentialSample ps = sample_potential(spec, g, 0.25, 1.0);
  for (int iy : {0, 3, 11})
    for (int ix : {0, 5, 13}) {
      double v = potential_value(spec, 2, g.length(0), g.length(1),
                                 g.coord(0, ix), g.coord(1, iy), 0.25);
      CHECK(ps.V.v[g.index(ix, iy)] == doctest::Approx(v).epsilon(1e-14));
    }

  Grid g1 = Grid::line(16, 6.0);
  PotentialSpec spec1;
  spec1.modes.push_back(
      PotentialMode{1.5, {bump(2.0, 0.9), AxisFactor{}}, Envelope{}});
  PotentialSample ps1 = sample_potential(spec1, g1, 0.0, 1.0);
  for (int ix : {0, 4, 9})
    CHECK(ps1.V.v[ix] ==
          doctest::Approx(potential_value(spec1, 1, 6.0, 0.0, g1.coord(0, ix),
                                          0.0, 0.0))
              .epsilon(1e-14));
}

TEST_CASE("static spec leaves no time terms in the budget") {
  Grid g = Grid::square(32, 6.0);
  PotentialSpec spec = well_spec();
  for (auto& m : spec.modes) m.envelope = Envelope{};
  CHECK(spec.time_independent());

  PotentialBudget b0 = assemble_budget(spec, g, 2.0, 40, 0.0);
  CHECK(b0.dtV_l1_linf == 0.0);
  CHECK(b0.dtV_l2l2 == 0.0);
  CHECK(b0.nu_lap_dt_l1_linf == 0.0);

  // with nu > 0 the mixed term reduces to T nu sup |lap V|
  PotentialBudget b1 = assemble_budget(spec, g, 2.0, 40, 0.5);
  PotentialSample ps = sample_potential(spec, g, 0.0, 2.0);
  CHECK(b1.nu_lap_dt_l1_linf ==
        doctest::Approx(2.0 * 0.5 * max_abs(ps.lap.v)).epsilon(1e-12));
  CHECK(b1.sup_V == b0.sup_V);
}

TEST_CASE("budget closed forms for a single sine mode") {
  // V = sin(2 pi x) on the unit torus, static, T = 1; degree-4 trig
  // polynomials are integrated exactly by the node sums at this size
  Grid g = Grid::line(64, 1.0);
  PotentialSpec spec;
  spec.modes.push_back(
      PotentialMode{1.0, {mode(AxisFactor::Kind::sin_mode, 1), AxisFactor{}},
                    Envelope{}});
  PotentialBudget b = assemble_budget(spec, g, 1.0, 16, 0.0);

  CHECK(b.sup_V == 1.0);
  CHECK(b.gradV_l2l2 == doctest::Approx(kTau / std::sqrt(2.0)).epsilon(1e-13));
  CHECK(b.gradV_l4l4 ==
        doctest::Approx(4.91685821900490593828927512694).epsilon(1e-13));
  CHECK(b.lapV_l2l2 ==
        doctest::Approx(kTau * kTau / std::sqrt(2.0)).epsilon(1e-13));
  CHECK(b.hessV_l2l2 == doctest::Approx(b.lapV_l2l2).epsilon(1e-14));
}

TEST_CASE("budget entries are 1-homogeneous in amplitude") {
  Grid g = Grid::square(32, 6.0);
  PotentialSpec base = well_spec();
  PotentialSpec scaled = base;
  const double c = 2.5;
  for (auto& m : scaled.modes) m.amplitude *= c;

  PotentialBudget a = assemble_budget(base, g, 1.0, 20, 0.3);
  PotentialBudget b = assemble_budget(scaled, g, 1.0, 20, 0.3);
  CHECK(b.sup_V == doctest::Approx(c * a.sup_V).epsilon(1e-13));
  CHECK(b.dtV_l1_linf == doctest::Approx(c * a.dtV_l1_linf).epsilon(1e-13));
  CHECK(b.lapV_l2l2 == doctest::Approx(c * a.lapV_l2l2).epsilon(1e-13));
  CHECK(b.hessV_l2l2 == doctest::Approx(c * a.hessV_l2l2).epsilon(1e-13));
  CHECK(b.dtV_l2l2 == doctest::Approx(c * a.dtV_l2l2).epsilon(1e-13));
  CHECK(b.gradV_l2l2 == doctest::Approx(c * a.gradV_l2l2).epsilon(1e-13));
  CHECK(b.gradV_l4l4 == doctest::Approx(c * a.gradV_l4l4).epsilon(1e-13));
  CHECK(b.nu_lap_dt_l1_linf ==
        doctest::Approx(c * a.nu_lap_dt_l1_linf).epsilon(1e-13));
}
