#pragma once

#include <vector>

#include "pmflow/grid.hpp"

namespace pmflow::fftdetail {

// Fourier multiplier application on the torus. order 1 uses ik with the
// Nyquist mode zeroed (no real odd-derivative representative there), order 2
// uses -k^2 with the full band.
void spectral_derivative(const Grid& g, const std::vector<double>& in,
                         std::vector<double>& out, int axis, int order);

void spectral_laplacian(const Grid& g, const std::vector<double>& in,
                        std::vector<double>& out);

// mixed second derivative d2/dxdy, Nyquist zeroed on both axes
void spectral_cross(const Grid& g, const std::vector<double>& in,
                    std::vector<double>& out);

}  // namespace pmflow::fftdetail
