#pragma once

#include <optional>

#include "pmflow/grid.hpp"

namespace pmflow {

// gamma is the stiffness exponent of the pressure law p = n^gamma, nu >= 0
// the linear mobility of the active part. nu = 0 is the purely congestive
// regime.
struct MediumParams {
  double gamma = 2.0;
  double nu = 0.0;

  void validate() const;
};

// p = n^gamma, evaluated as exp(gamma*log(n)); tiny negative n (above
// -1e-12) is treated as vacuum, anything lower is a corrupted state.
double pressure_of_density(double n, const MediumParams& mp);
double density_of_pressure(double p, const MediumParams& mp);

// sigma(n) = gamma/(gamma+1) * n^(gamma+1) + nu*n
double sigma_of_density(double n, const MediumParams& mp);
// sigma'(n) = gamma*n^gamma + nu = gamma*p + nu
double sigma_prime(double n, const MediumParams& mp);

// inverse of sigma on [0, inf), safeguarded Newton, tolerance 1e-13
double density_from_sigma(double s, const MediumParams& mp);

// stiff-limit pressure recovered from sigma: (s - nu) clipped at zero
double limit_pressure_from_sigma(double s, double nu);

ScalarField pressure_field(const ScalarField& n, const MediumParams& mp);
ScalarField sigma_field(const ScalarField& n, const MediumParams& mp);

// E_gamma[n] = int n V + 1/(gamma+1) int n^(gamma+1)
double energy_gamma(const ScalarField& n, const ScalarField& V,
                    const MediumParams& mp);

// E_inf[n] = int n V on {max n <= 1 + 1e-9}, otherwise empty (infinite)
std::optional<double> energy_infinity(const ScalarField& n,
                                      const ScalarField& V);

}  // namespace pmflow
