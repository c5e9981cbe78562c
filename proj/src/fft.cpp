#include "fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

namespace pmflow::fftdetail {
namespace {

// FFTW planning is not thread safe; executions here share buffers with the
// plan, so the whole transform is serialized.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

void check_spectral_grid(const Grid& g) {
  for (int a = 0; a < g.dim(); ++a)
    if (!is_power_of_two(g.extent(a)))
      throw std::invalid_argument("spectral scheme needs power-of-two grids");
}

// wavenumber for bin j of n bins on period L; nyq_to_zero drops the n/2 bin
double wavenumber(int j, int n, double L, bool nyq_to_zero) {
  int m = j <= n / 2 ? j : j - n;
  if (nyq_to_zero && n % 2 == 0 && j == n / 2) return 0.0;
  return 2.0 * std::numbers::pi * m / L;
}

using Symbol = std::complex<double> (*)(double kx, double ky);

void apply_symbol(const Grid& g, const std::vector<double>& in,
                  std::vector<double>& out, Symbol symbol, bool nyq_zero_x,
                  bool nyq_zero_y) {
  check_spectral_grid(g);
  const int nx = g.nx();
  const int ny = g.dim() == 2 ? g.ny() : 1;
  const std::size_t total = g.cell_count();
  out.resize(total);

  std::lock_guard<std::mutex> lock(fftw_mutex());
  fftw_complex* buf = fftw_alloc_complex(total);
  fftw_plan fwd, bwd;
  if (g.dim() == 1) {
    fwd = fftw_plan_dft_1d(nx, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_1d(nx, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  } else {
    // fftw wants the slowest axis first; our layout is iy slow, ix fast
    fwd = fftw_plan_dft_2d(ny, nx, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_2d(ny, nx, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < total; ++i) {
    buf[i][0] = in[i];
    buf[i][1] = 0.0;
  }
  fftw_execute(fwd);
  for (int iy = 0; iy < ny; ++iy) {
    double ky = g.dim() == 2 ? wavenumber(iy, ny, g.length(1), nyq_zero_y) : 0.0;
    for (int ix = 0; ix < nx; ++ix) {
      double kx = wavenumber(ix, nx, g.length(0), nyq_zero_x);
      std::complex<double> s = symbol(kx, ky);
      std::size_t i = g.index(ix, iy);
      std::complex<double> z(buf[i][0], buf[i][1]);
      z *= s;
      buf[i][0] = z.real();
      buf[i][1] = z.imag();
    }
  }
  fftw_execute(bwd);
  const double scale = 1.0 / static_cast<double>(total);
  for (std::size_t i = 0; i < total; ++i) out[i] = buf[i][0] * scale;
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
  fftw_free(buf);
}

std::complex<double> sym_ddx(double kx, double) { return {0.0, kx}; }
std::complex<double> sym_ddy(double, double ky) { return {0.0, ky}; }
std::complex<double> sym_d2x(double kx, double) { return {-kx * kx, 0.0}; }
std::complex<double> sym_d2y(double, double ky) { return {-ky * ky, 0.0}; }
std::complex<double> sym_lap(double kx, double ky) {
  return {-kx * kx - ky * ky, 0.0};
}
std::complex<double> sym_cross(double kx, double ky) { return {-kx * ky, 0.0}; }

}  // namespace

void spectral_derivative(const Grid& g, const std::vector<double>& in,
                         std::vector<double>& out, int axis, int order) {
  if (axis < 0 || axis >= g.dim())
    throw std::invalid_argument("spectral_derivative: axis out of range");
  if (order == 1)
    apply_symbol(g, in, out, axis == 0 ? sym_ddx : sym_ddy, axis == 0, axis == 1);
  else if (order == 2)
    apply_symbol(g, in, out, axis == 0 ? sym_d2x : sym_d2y, false, false);
  else
    throw std::invalid_argument("spectral_derivative: order must be 1 or 2");
}

void spectral_laplacian(const Grid& g, const std::vector<double>& in,
                        std::vector<double>& out) {
  apply_symbol(g, in, out, sym_lap, false, false);
}

void spectral_cross(const Grid& g, const std::vector<double>& in,
                    std::vector<double>& out) {
  if (g.dim() != 2) throw std::invalid_argument("spectral_cross: needs dim 2");
  apply_symbol(g, in, out, sym_cross, true, true);
}

}  // namespace pmflow::fftdetail
