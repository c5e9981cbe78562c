#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <pmflow/grid.hpp>
#include <pmflow/identities.hpp>
#include <pmflow/ops.hpp>

using namespace pmflow;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

TrigTerm term(double a, int kx, int ky, bool sx = false, bool sy = false) {
  TrigTerm t;
  t.a = a;
  t.kx = kx;
  t.ky = ky;
  t.sin_x = sx;
  t.sin_y = sy;
  return t;
}

// a field whose cubic integral does not vanish, with every integral below
// frozen from an exact quadrature at 30 digits
ManufacturedField oracle_g() {
  ManufacturedField f;
  f.offset = 2.0;
  f.terms = {term(1.0, 1, 0), term(0.8, 1, 1), term(0.25, 0, 2, false, true),
             term(0.4, 0, 1), term(0.35, 0, 2)};
  return f;
}

ManufacturedField oracle_h() {
  ManufacturedField f;
  f.terms = {term(1.0, 1, 1, true, false), term(0.3, 2, 0)};
  return f;
}

}  // namespace

TEST_CASE("band limit guards sampling") {
  ManufacturedField f = oracle_g();
  CHECK(f.band_limit() == 2);
  f.terms.push_back(term(0.1, 3, 1));
  CHECK(f.band_limit() == 3);
  CHECK_THROWS_AS(f.sample(Grid::square(8, kTau)), std::invalid_argument);
  ScalarField ok = f.sample(Grid::square(16, kTau));
  CHECK(ok.v.size() == 256);
}

TEST_CASE("frozen quadrature values for the oracle pair") {
  Grid grid = Grid::square(128, kTau);
  ScalarField g = oracle_g().sample(grid);
  ScalarField h = oracle_h().sample(grid);

  IdentityResult r31 = check_identity_31(g, Scheme::spectral);
  CHECK(r31.lhs == doctest::Approx(-21.47625917677044435).epsilon(1e-12));
  CHECK(r31.rhs == doctest::Approx(-21.47625917677044435).epsilon(1e-12));
  CHECK(r31.abs_err < 1e-10);

  InequalityResult r32 = check_inequality_32(g, Scheme::spectral);
  CHECK(r32.lhs == doctest::Approx(117.2963004651865914).epsilon(1e-12));
  CHECK(r32.rhs == doctest::Approx(10126.75102199710120).epsilon(1e-12));
  CHECK(r32.holds);
  CHECK(r32.slack > 1e4 / 2);

  IdentityResult r33 = check_identity_33(g, h, Scheme::spectral);
  CHECK(r33.lhs == doctest::Approx(11.84352528130723034).epsilon(1e-12));
  CHECK(r33.rhs == doctest::Approx(11.84352528130723034).epsilon(1e-12));
  CHECK(r33.abs_err < 1e-10);
}

TEST_CASE("one dimensional cubic integral vanishes") {
  // in one dimension |g'|^2 g'' is a perfect derivative, so both sides of
  // the first identity integrate to zero on the torus
  Grid grid = Grid::line(128, kTau);
  ManufacturedField f;
  f.offset = 1.5;
  f.terms = {term(0.7, 1, 0), term(0.4, 2, 0, true), term(0.2, 3, 0)};
  ScalarField g = f.sample(grid);

  IdentityResult r31 = check_identity_31(g, Scheme::spectral);
  CHECK(std::fabs(r31.lhs) < 1e-12);
  CHECK(std::fabs(r31.rhs) < 1e-12);

  InequalityResult r32 = check_inequality_32(g, Scheme::spectral);
  CHECK(r32.holds);
  CHECK(r32.lhs > 0.0);
}

TEST_CASE("constant fields are silent") {
  Grid grid = Grid::square(32, kTau);
  ScalarField g(grid, 3.0);
  ScalarField h = oracle_h().sample(grid);

  IdentityResult r31 = check_identity_31(g, Scheme::spectral);
  CHECK(r31.lhs == 0.0);
  CHECK(r31.rhs == 0.0);
  IdentityResult r33 = check_identity_33(g, h, Scheme::spectral);
  CHECK(r33.lhs == 0.0);
  CHECK(std::fabs(r33.rhs) < 1e-12);
}

TEST_CASE("corpus passes spectrally at the default tolerance") {
  auto corpus = manufactured_corpus(24, 2);
  CHECK(corpus.size() == 24);
  auto rows = run_identity_corpus(corpus, 128, Scheme::spectral, 1e-9, 2, 2);
  REQUIRE(rows.size() == 72);
  int active_31 = 0;
  for (const auto& r : rows) {
    CHECK(r.pass);
    if (r.which == "31" && std::fabs(r.lhs) > 1.0) ++active_31;
  }
  // the planted resonant triples keep the first identity exercised away
  // from the all-zero case
  CHECK(active_31 >= 4);

  // nonnegativity of g, required by the inequality
  Grid grid = Grid::square(64, kTau);
  for (const auto& pair : corpus) {
    ScalarField g = pair.g.sample(grid);
    double mn = g.v[0];
    for (double x : g.v) mn = std::min(mn, x);
    CHECK(mn >= 0.4);
  }
}

TEST_CASE("row content does not depend on the thread count") {
  auto corpus = manufactured_corpus(10, 2);
  auto one = run_identity_corpus(corpus, 64, Scheme::spectral, 1e-9, 2, 1);
  auto four = run_identity_corpus(corpus, 64, Scheme::spectral, 1e-9, 2, 4);
  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].lhs == four[i].lhs);
    CHECK(one[i].rhs == four[i].rhs);
    CHECK(one[i].err == four[i].err);
    CHECK(one[i].pair_id == four[i].pair_id);
    CHECK(one[i].which == four[i].which);
  }
}

TEST_CASE("centered residuals shrink at second order") {
  Grid c64 = Grid::square(64, kTau);
  Grid c128 = Grid::square(128, kTau);
  Grid c256 = Grid::square(256, kTau);

  ManufacturedField gf = oracle_g();
  ManufacturedField hf = oracle_h();
  double e31[3], e33[3];
  const Grid* grids[3] = {&c64, &c128, &c256};
  for (int k = 0; k < 3; ++k) {
    ScalarField g = gf.sample(*grids[k]);
    ScalarField h = hf.sample(*grids[k]);
    e31[k] = check_identity_31(g, Scheme::centered2).abs_err;
    e33[k] = check_identity_33(g, h, Scheme::centered2).abs_err;
  }
  for (int k = 0; k < 2; ++k) {
    double o31 = std::log2(e31[k] / e31[k + 1]);
    double o33 = std::log2(e33[k] / e33[k + 1]);
    CHECK(o31 > 1.8);
    CHECK(o31 < 2.3);
    CHECK(o33 > 1.8);
    CHECK(o33 < 2.3);
  }

  // spectral at the coarse size already sits at rounding level
  ScalarField g = gf.sample(c64);
  CHECK(check_identity_31(g, Scheme::spectral).abs_err < 1e-10);
}

TEST_CASE("one dimensional corpus stays healthy") {
  auto corpus = manufactured_corpus(6, 1);
  auto rows = run_identity_corpus(corpus, 128, Scheme::spectral, 1e-9, 1, 1);
  REQUIRE(rows.size() == 18);
  for (const auto& r : rows) CHECK(r.pass);
}
