#include "pmflow/identities.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <thread>

#include "pmflow/rng.hpp"

namespace pmflow {

int ManufacturedField::band_limit() const {
  int b = 0;
  for (const auto& t : terms) b = std::max({b, std::abs(t.kx), std::abs(t.ky)});
  return b;
}

ScalarField ManufacturedField::sample(const Grid& g) const {
  int band = band_limit();
  for (int a = 0; a < g.dim(); ++a)
    if (g.extent(a) <= 4 * band)
      throw std::invalid_argument("manufactured field: resolution below band limit");
  ScalarField out(g, offset);
  const double twopi = 2.0 * std::numbers::pi;
  const int ny = g.dim() == 2 ? g.ny() : 1;
  for (const auto& t : terms) {
    double wx = twopi * t.kx / g.length(0);
    double wy = g.dim() == 2 ? twopi * t.ky / g.length(1) : 0.0;
    for (int iy = 0; iy < ny; ++iy) {
      double py = wy * g.coord(1, iy);
      double fy = g.dim() == 2 ? (t.sin_y ? std::sin(py) : std::cos(py)) : 1.0;
      for (int ix = 0; ix < g.nx(); ++ix) {
        double px = wx * g.coord(0, ix);
        double fx = t.sin_x ? std::sin(px) : std::cos(px);
        out.v[g.index(ix, iy)] += t.a * fx * fy;
      }
    }
  }
  return out;
}

std::vector<ManufacturedPair> manufactured_corpus(int count, int dim) {
  std::vector<ManufacturedPair> corpus;
  corpus.reserve(count);
  for (int j = 0; j < count; ++j) {
    Rng rng(1000 + static_cast<std::uint64_t>(j));
    ManufacturedPair pair;
    double sum_abs = 0.0;
    int n_terms = 3 + rng.uniform_int(0, 2);
    for (int m = 0; m < n_terms; ++m) {
      TrigTerm t;
      t.a = rng.uniform(-1.0, 1.0);
      t.kx = rng.uniform_int(0, 3);
      t.ky = rng.uniform_int(0, 3);
      t.sin_x = rng.uniform_int(0, 1) == 1;
      t.sin_y = rng.uniform_int(0, 1) == 1;
      if (dim == 1) {
        t.ky = 0;
        t.sin_y = false;
      }
      if (t.kx == 0 && t.ky == 0) t.kx = 1;
      sum_abs += std::fabs(t.a);
      pair.g.terms.push_back(t);
    }
    pair.g.offset = sum_abs + 0.5;  // keeps g >= 0.5
    int h_terms = 2 + rng.uniform_int(0, 1);
    for (int m = 0; m < h_terms; ++m) {
      TrigTerm t;
      t.a = rng.uniform(-1.5, 1.5);
      t.kx = rng.uniform_int(0, 2);
      t.ky = rng.uniform_int(0, 2);
      t.sin_x = rng.uniform_int(0, 1) == 1;
      t.sin_y = rng.uniform_int(0, 1) == 1;
      if (dim == 1) {
        t.ky = 0;
        t.sin_y = false;
      }
      pair.h.terms.push_back(t);
    }
    pair.h.offset = rng.uniform(-1.0, 1.0);
    if (dim == 2 && j % 4 == 0) {
      // separable cos/sin products tend to kill the cubic integral in the
      // first identity by parity, so plant a resonant triple along y that
      // keeps both of its sides well away from zero
      TrigTerm r1, r2, r3;
      r1.a = 0.4;
      r1.ky = 1;
      r2.a = 0.35;
      r2.ky = 2;
      r3.a = 0.3;
      r3.kx = 1;
      r3.ky = 1;
      pair.g.terms.push_back(r1);
      pair.g.terms.push_back(r2);
      pair.g.terms.push_back(r3);
      pair.g.offset += r1.a + r2.a + r3.a;
    }
    corpus.push_back(pair);
  }
  return corpus;
}

namespace {

double hess_norm_sq(const TensorField& H, std::size_t i, int dim) {
  if (dim == 1) return H.xx[i] * H.xx[i];
  return H.xx[i] * H.xx[i] + 2.0 * H.xy[i] * H.xy[i] + H.yy[i] * H.yy[i];
}

}  // namespace

IdentityResult check_identity_31(const ScalarField& g, Scheme scheme) {
  VectorField grad = gradient(g, scheme);
  ScalarField lap = laplacian(g, scheme);
  TensorField hess = hessian(g, scheme);
  const int dim = g.grid.dim();
  std::vector<double> lhs_cells(g.size()), rhs_cells(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double g2 = grad[0][i] * grad[0][i];
    if (dim == 2) g2 += grad[1][i] * grad[1][i];
    lhs_cells[i] = g2 * lap.v[i];
    rhs_cells[i] = (2.0 / 3.0) * g.v[i] *
                   (hess_norm_sq(hess, i, dim) - lap.v[i] * lap.v[i]);
  }
  IdentityResult r;
  r.lhs = compensated_total(lhs_cells) * g.grid.cell_volume();
  r.rhs = compensated_total(rhs_cells) * g.grid.cell_volume();
  r.abs_err = std::fabs(r.lhs - r.rhs);
  return r;
}

InequalityResult check_inequality_32(const ScalarField& g, Scheme scheme) {
  VectorField grad = gradient(g, scheme);
  ScalarField lap = laplacian(g, scheme);
  TensorField hess = hessian(g, scheme);
  const int dim = g.grid.dim();
  std::vector<double> lhs_cells(g.size()), rhs_cells(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double g2 = grad[0][i] * grad[0][i];
    if (dim == 2) g2 += grad[1][i] * grad[1][i];
    double gg = g.v[i] * g.v[i];
    lhs_cells[i] = g2 * g2;
    rhs_cells[i] = 8.0 * gg * lap.v[i] * lap.v[i] +
                   4.0 * gg * hess_norm_sq(hess, i, dim);
  }
  InequalityResult r;
  r.lhs = compensated_total(lhs_cells) * g.grid.cell_volume();
  r.rhs = compensated_total(rhs_cells) * g.grid.cell_volume();
  r.slack = r.rhs - r.lhs;
  r.holds = r.slack >= 0.0;
  return r;
}

IdentityResult check_identity_33(const ScalarField& g, const ScalarField& h,
                                 Scheme scheme) {
  require_same_grid(g.grid, h.grid, "check_identity_33");
  VectorField grad_g = gradient(g, scheme);
  ScalarField lap_g = laplacian(g, scheme);
  TensorField hess_g = hessian(g, scheme);
  ScalarField lap_h = laplacian(h, scheme);
  TensorField hess_h = hessian(h, scheme);
  const int dim = g.grid.dim();
  std::vector<double> lhs_cells(g.size()), rhs_cells(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double g2 = grad_g[0][i] * grad_g[0][i];
    double quad = hess_h.xx[i] * grad_g[0][i] * grad_g[0][i];
    if (dim == 2) {
      g2 += grad_g[1][i] * grad_g[1][i];
      quad += 2.0 * hess_h.xy[i] * grad_g[0][i] * grad_g[1][i] +
              hess_h.yy[i] * grad_g[1][i] * grad_g[1][i];
    }
    lhs_cells[i] = lap_h.v[i] * g2;
    rhs_cells[i] = h.v[i] * (hess_norm_sq(hess_g, i, dim) -
                             lap_g.v[i] * lap_g.v[i]) +
                   quad;
  }
  IdentityResult r;
  r.lhs = compensated_total(lhs_cells) * g.grid.cell_volume();
  r.rhs = compensated_total(rhs_cells) * g.grid.cell_volume();
  r.abs_err = std::fabs(r.lhs - r.rhs);
  return r;
}

std::vector<CorpusRow> run_identity_corpus(
    const std::vector<ManufacturedPair>& corpus, int resolution, Scheme scheme,
    double tol_scale, int dim, int threads) {
  Grid grid = dim == 1 ? Grid::line(resolution, 2.0 * std::numbers::pi)
                       : Grid::square(resolution, 2.0 * std::numbers::pi);
  std::vector<CorpusRow> rows(corpus.size() * 3);

  auto work = [&](std::size_t id) {
    const ManufacturedPair& pair = corpus[id];
    ScalarField g = pair.g.sample(grid);
    ScalarField h = pair.h.sample(grid);

    IdentityResult r31 = check_identity_31(g, scheme);
    CorpusRow row31{static_cast<int>(id), "31", r31.lhs, r31.rhs, r31.abs_err,
                    tol_scale * (1.0 + std::fabs(r31.lhs)), false};
    row31.pass = row31.err <= row31.tol;
    rows[3 * id] = row31;

    InequalityResult r32 = check_inequality_32(g, scheme);
    CorpusRow row32{static_cast<int>(id), "32", r32.lhs, r32.rhs, -r32.slack,
                    tol_scale * (1.0 + std::fabs(r32.lhs)), false};
    row32.pass = r32.slack >= -row32.tol;
    rows[3 * id + 1] = row32;

    IdentityResult r33 = check_identity_33(g, h, scheme);
    CorpusRow row33{static_cast<int>(id), "33", r33.lhs, r33.rhs, r33.abs_err,
                    tol_scale * (1.0 + std::fabs(r33.lhs)), false};
    row33.pass = row33.err <= row33.tol;
    rows[3 * id + 2] = row33;
  };

  if (threads <= 1) {
    for (std::size_t id = 0; id < corpus.size(); ++id) work(id);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&]() {
        for (std::size_t id = next.fetch_add(1); id < corpus.size();
             id = next.fetch_add(1))
          work(id);
      });
    for (auto& th : pool) th.join();
  }
  return rows;
}

void write_corpus_csv(const std::string& path, const std::vector<CorpusRow>& rows) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw std::runtime_error("write_corpus_csv: cannot open " + path);
  std::fprintf(out, "pair_id,identity,lhs,rhs,err,tol,pass\n");
  for (const auto& r : rows)
    std::fprintf(out, "%d,%s,%.17g,%.17g,%.17g,%.17g,%d\n", r.pair_id,
                 r.which.c_str(), r.lhs, r.rhs, r.err, r.tol, r.pass ? 1 : 0);
  std::fclose(out);
}

}  // namespace pmflow
