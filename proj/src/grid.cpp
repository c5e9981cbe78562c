#include "pmflow/grid.hpp"

#include <cmath>

namespace pmflow {

Grid::Grid(int dim, std::array<int, 2> n_cells, std::array<double, 2> length)
    : dim_(dim), n_(n_cells), length_(length) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid: dim must be 1 or 2");
  if (dim == 1) {
    n_[1] = 1;
    length_[1] = length_[0];
  }
  for (int a = 0; a < dim_; ++a) {
    if (n_[a] < 8) throw std::invalid_argument("grid: need at least 8 cells per axis");
    if (length_[a] <= 0.0) throw std::invalid_argument("grid: length must be positive");
  }
  h_ = {length_[0] / n_[0], length_[1] / n_[1]};
}

void require_same_grid(const Grid& a, const Grid& b, const std::string& where) {
  if (a != b) throw std::invalid_argument(where + ": grid mismatch");
}

void require_finite(const std::vector<double>& v, const std::string& where) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::runtime_error(where + ": non-finite value");
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace pmflow
