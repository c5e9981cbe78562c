#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmflow {

// Uniform periodic grid on a torus of side length L per axis, dim 1 or 2.
// Cell i holds the sample at x_i = i*h; on the torus this node rule and the
// midpoint rule coincide, so integrate() is exact for resolved trig modes.
class Grid {
public:
  Grid(int dim, std::array<int, 2> n_cells, std::array<double, 2> length);

  static Grid line(int n, double L) { return Grid(1, {n, 1}, {L, L}); }
  static Grid square(int n, double L) { return Grid(2, {n, n}, {L, L}); }

  int dim() const { return dim_; }
  int nx() const { return n_[0]; }
  int ny() const { return n_[1]; }
  int extent(int axis) const { return n_[axis]; }
  double length(int axis) const { return length_[axis]; }
  double spacing(int axis) const { return h_[axis]; }
  double cell_volume() const { return dim_ == 1 ? h_[0] : h_[0] * h_[1]; }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]);
  }
  double coord(int axis, int index) const { return h_[axis] * index; }

  std::size_t index(int ix, int iy = 0) const {
    return static_cast<std::size_t>(iy) * n_[0] + ix;
  }
  int wrap(int axis, int i) const {
    int n = n_[axis];
    i %= n;
    return i < 0 ? i + n : i;
  }

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && n_ == o.n_ && length_ == o.length_;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

private:
  int dim_;
  std::array<int, 2> n_;
  std::array<double, 2> length_;
  std::array<double, 2> h_;
};

struct ScalarField {
  Grid grid;
  std::vector<double> v;

  explicit ScalarField(const Grid& g, double fill = 0.0)
      : grid(g), v(g.cell_count(), fill) {}

  double& at(int ix, int iy = 0) { return v[grid.index(ix, iy)]; }
  double at(int ix, int iy = 0) const { return v[grid.index(ix, iy)]; }
  std::size_t size() const { return v.size(); }
};

// One component field per axis, all on the same grid.
struct VectorField {
  Grid grid;
  std::array<std::vector<double>, 2> comp;

  explicit VectorField(const Grid& g) : grid(g) {
    for (int a = 0; a < g.dim(); ++a) comp[a].assign(g.cell_count(), 0.0);
  }
  std::vector<double>& operator[](int a) { return comp[a]; }
  const std::vector<double>& operator[](int a) const { return comp[a]; }
};

// Symmetric second-derivative matrix field: xx (, xy, yy in 2D).
struct TensorField {
  Grid grid;
  std::vector<double> xx, xy, yy;

  explicit TensorField(const Grid& g) : grid(g), xx(g.cell_count(), 0.0) {
    if (g.dim() == 2) {
      xy.assign(g.cell_count(), 0.0);
      yy.assign(g.cell_count(), 0.0);
    }
  }
};

void require_same_grid(const Grid& a, const Grid& b, const std::string& where);
void require_finite(const std::vector<double>& v, const std::string& where);
bool is_power_of_two(int n);

}  // namespace pmflow
