#include "pmflow/constitutive.hpp"

#include <cmath>

#include "pmflow/ops.hpp"

namespace pmflow {
namespace {

constexpr double kNegativeStateTol = 1e-12;

double clamp_density(double n, const char* where) {
  if (n < -kNegativeStateTol)
    throw std::domain_error(std::string(where) + ": negative density " +
                            std::to_string(n));
  return n > 0.0 ? n : 0.0;
}

}  // namespace

void MediumParams::validate() const {
  if (!(gamma > 1.0)) throw std::invalid_argument("medium: gamma must exceed 1");
  if (!(nu >= 0.0)) throw std::invalid_argument("medium: nu must be nonnegative");
}

double pressure_of_density(double n, const MediumParams& mp) {
  n = clamp_density(n, "pressure_of_density");
  if (n == 0.0) return 0.0;
  return std::exp(mp.gamma * std::log(n));
}

double density_of_pressure(double p, const MediumParams& mp) {
  if (p < -kNegativeStateTol)
    throw std::domain_error("density_of_pressure: negative pressure");
  if (p <= 0.0) return 0.0;
  return std::exp(std::log(p) / mp.gamma);
}

double sigma_of_density(double n, const MediumParams& mp) {
  n = clamp_density(n, "sigma_of_density");
  if (n == 0.0) return 0.0;
  double congested = mp.gamma / (mp.gamma + 1.0) *
                     std::exp((mp.gamma + 1.0) * std::log(n));
  return congested + mp.nu * n;
}

double sigma_prime(double n, const MediumParams& mp) {
  return mp.gamma * pressure_of_density(n, mp) + mp.nu;
}

double density_from_sigma(double s, const MediumParams& mp) {
  if (s < -kNegativeStateTol)
    throw std::domain_error("density_from_sigma: negative input");
  if (s <= 0.0) return 0.0;

  // the pure power law inverts in closed form (log form keeps tiny s exact)
  double n_pow =
      std::exp(std::log(s * (mp.gamma + 1.0) / mp.gamma) / (mp.gamma + 1.0));
  if (mp.nu <= 0.0) return n_pow;

  // each term alone overestimates sigma, so both branch inverses bound the
  // root above and sigma at the smaller of them is at most 2 s; Newton from
  // there descends monotonically and never sees the slow far-field regime
  double n = std::min(n_pow, s / mp.nu);
  double lo = 0.0, hi = n;
  for (int it = 0; it < 200; ++it) {
    double f = sigma_of_density(n, mp) - s;
    if (f == 0.0) return n;
    if (f > 0.0)
      hi = n;
    else
      lo = n;
    double d = sigma_prime(n, mp);
    double step = d > 0.0 ? f / d : 0.0;
    double next = n - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - n) <= 1e-14 * (1.0 + std::fabs(next))) {
      n = next;
      break;
    }
    n = next;
  }
  return n;
}

double limit_pressure_from_sigma(double s, double nu) {
  if (!(nu >= 0.0))
    throw std::invalid_argument("limit_pressure_from_sigma: needs nu >= 0");
  return std::max(s - nu, 0.0);
}

ScalarField pressure_field(const ScalarField& n, const MediumParams& mp) {
  ScalarField p(n.grid);
  for (std::size_t i = 0; i < n.v.size(); ++i)
    p.v[i] = pressure_of_density(n.v[i], mp);
  return p;
}

ScalarField sigma_field(const ScalarField& n, const MediumParams& mp) {
  ScalarField s(n.grid);
  for (std::size_t i = 0; i < n.v.size(); ++i)
    s.v[i] = sigma_of_density(n.v[i], mp);
  return s;
}

double energy_gamma(const ScalarField& n, const ScalarField& V,
                    const MediumParams& mp) {
  require_same_grid(n.grid, V.grid, "energy_gamma");
  ScalarField internal(n.grid);
  for (std::size_t i = 0; i < n.v.size(); ++i) {
    double ni = clamp_density(n.v[i], "energy_gamma");
    internal.v[i] =
        ni > 0.0 ? std::exp((mp.gamma + 1.0) * std::log(ni)) / (mp.gamma + 1.0)
                 : 0.0;
  }
  return inner(n, V) + integrate(internal);
}

std::optional<double> energy_infinity(const ScalarField& n,
                                      const ScalarField& V) {
  require_same_grid(n.grid, V.grid, "energy_infinity");
  for (double x : n.v)
    if (x > 1.0 + 1e-9) return std::nullopt;
  return inner(n, V);
}

}  // namespace pmflow
