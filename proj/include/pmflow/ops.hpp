#pragma once

#include "pmflow/grid.hpp"

namespace pmflow {

// centered2: periodic second-order stencils, used by the solver so discrete
// operators match the scheme. spectral: Fourier differentiation, exact for
// resolved modes, used for identity verification and cross checks.
enum class Scheme { centered2, spectral };

VectorField gradient(const ScalarField& f, Scheme scheme);
ScalarField divergence(const VectorField& F, Scheme scheme);
ScalarField laplacian(const ScalarField& f, Scheme scheme);
TensorField hessian(const ScalarField& f, Scheme scheme);

// torus quadrature: sum * cell volume, compensated summation
double integrate(const ScalarField& f);
double compensated_total(const std::vector<double>& v);

// p >= 1, or infinity for the sup norm
double lp_norm(const ScalarField& f, double p);

double inner(const ScalarField& f, const ScalarField& g);  // integral of f*g
double inner(const VectorField& F, const VectorField& G);  // integral of F.G

}  // namespace pmflow
