#include "pmflow/ops.hpp"

#include <cmath>
#include <limits>

#include "fft.hpp"

namespace pmflow {
namespace {

// one-axis centered first difference, periodic
void centered_d1(const Grid& g, const std::vector<double>& in,
                 std::vector<double>& out, int axis) {
  const int nx = g.nx(), ny = g.dim() == 2 ? g.ny() : 1;
  const double inv2h = 1.0 / (2.0 * g.spacing(axis));
  out.resize(in.size());
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      int xp = axis == 0 ? g.wrap(0, ix + 1) : ix;
      int xm = axis == 0 ? g.wrap(0, ix - 1) : ix;
      int yp = axis == 1 ? g.wrap(1, iy + 1) : iy;
      int ym = axis == 1 ? g.wrap(1, iy - 1) : iy;
      out[g.index(ix, iy)] = (in[g.index(xp, yp)] - in[g.index(xm, ym)]) * inv2h;
    }
}

void centered_d2(const Grid& g, const std::vector<double>& in,
                 std::vector<double>& out, int axis) {
  const int nx = g.nx(), ny = g.dim() == 2 ? g.ny() : 1;
  const double invh2 = 1.0 / (g.spacing(axis) * g.spacing(axis));
  out.resize(in.size());
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      int xp = axis == 0 ? g.wrap(0, ix + 1) : ix;
      int xm = axis == 0 ? g.wrap(0, ix - 1) : ix;
      int yp = axis == 1 ? g.wrap(1, iy + 1) : iy;
      int ym = axis == 1 ? g.wrap(1, iy - 1) : iy;
      std::size_t i = g.index(ix, iy);
      out[i] = (in[g.index(xp, yp)] - 2.0 * in[i] + in[g.index(xm, ym)]) * invh2;
    }
}

void centered_cross(const Grid& g, const std::vector<double>& in,
                    std::vector<double>& out) {
  const int nx = g.nx(), ny = g.ny();
  const double inv4h = 1.0 / (4.0 * g.spacing(0) * g.spacing(1));
  out.resize(in.size());
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      int xp = g.wrap(0, ix + 1), xm = g.wrap(0, ix - 1);
      int yp = g.wrap(1, iy + 1), ym = g.wrap(1, iy - 1);
      out[g.index(ix, iy)] = (in[g.index(xp, yp)] - in[g.index(xp, ym)] -
                              in[g.index(xm, yp)] + in[g.index(xm, ym)]) *
                             inv4h;
    }
}

}  // namespace

VectorField gradient(const ScalarField& f, Scheme scheme) {
  require_finite(f.v, "gradient");
  VectorField out(f.grid);
  for (int a = 0; a < f.grid.dim(); ++a) {
    if (scheme == Scheme::centered2)
      centered_d1(f.grid, f.v, out[a], a);
    else
      fftdetail::spectral_derivative(f.grid, f.v, out[a], a, 1);
  }
  return out;
}

ScalarField divergence(const VectorField& F, Scheme scheme) {
  ScalarField out(F.grid);
  std::vector<double> tmp;
  for (int a = 0; a < F.grid.dim(); ++a) {
    require_finite(F[a], "divergence");
    if (scheme == Scheme::centered2)
      centered_d1(F.grid, F[a], tmp, a);
    else
      fftdetail::spectral_derivative(F.grid, F[a], tmp, a, 1);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += tmp[i];
  }
  return out;
}

ScalarField laplacian(const ScalarField& f, Scheme scheme) {
  require_finite(f.v, "laplacian");
  ScalarField out(f.grid);
  if (scheme == Scheme::spectral) {
    fftdetail::spectral_laplacian(f.grid, f.v, out.v);
    return out;
  }
  std::vector<double> tmp;
  for (int a = 0; a < f.grid.dim(); ++a) {
    centered_d2(f.grid, f.v, tmp, a);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += tmp[i];
  }
  return out;
}

TensorField hessian(const ScalarField& f, Scheme scheme) {
  require_finite(f.v, "hessian");
  TensorField out(f.grid);
  if (scheme == Scheme::centered2) {
    centered_d2(f.grid, f.v, out.xx, 0);
    if (f.grid.dim() == 2) {
      centered_d2(f.grid, f.v, out.yy, 1);
      centered_cross(f.grid, f.v, out.xy);
    }
  } else {
    fftdetail::spectral_derivative(f.grid, f.v, out.xx, 0, 2);
    if (f.grid.dim() == 2) {
      fftdetail::spectral_derivative(f.grid, f.v, out.yy, 1, 2);
      fftdetail::spectral_cross(f.grid, f.v, out.xy);
    }
  }
  return out;
}

double compensated_total(const std::vector<double>& v) {
  double sum = 0.0, c = 0.0;
  for (double x : v) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double integrate(const ScalarField& f) {
  return compensated_total(f.v) * f.grid.cell_volume();
}

double lp_norm(const ScalarField& f, double p) {
  if (p == std::numeric_limits<double>::infinity()) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::fabs(x));
    return m;
  }
  if (p < 1.0) throw std::invalid_argument("lp_norm: p must be >= 1");
  double sum = 0.0, c = 0.0;
  for (double x : f.v) {
    double y = std::pow(std::fabs(x), p) - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return std::pow(sum * f.grid.cell_volume(), 1.0 / p);
}

double inner(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid, g.grid, "inner");
  double sum = 0.0, c = 0.0;
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    double y = f.v[i] * g.v[i] - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum * f.grid.cell_volume();
}

double inner(const VectorField& F, const VectorField& G) {
  require_same_grid(F.grid, G.grid, "inner");
  double sum = 0.0, c = 0.0;
  for (int a = 0; a < F.grid.dim(); ++a)
    for (std::size_t i = 0; i < F[a].size(); ++i) {
      double y = F[a][i] * G[a][i] - c;
      double t = sum + y;
      c = (t - sum) - y;
      sum = t;
    }
  return sum * F.grid.cell_volume();
}

}  // namespace pmflow
