#include "satflow/reference.hpp"

namespace satflow::reference {

std::vector<double> convolve_direct(const std::function<double(double)>& kernel,
                                    std::span<const double> values, const Grid1D& grid) {
  const int m = grid.num_cells;
  std::vector<double> out(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += kernel(grid.center(i) - grid.center(k)) * values[k];
    out[i] = s * grid.dx;
  }
  return out;
}

std::vector<double> convolve_direct_2d(const std::function<double(double, double)>& kernel,
                                       std::span<const double> field, const Grid2D& grid) {
  const int nx = grid.x.num_cells, ny = grid.y.num_cells;
  std::vector<double> out(static_cast<size_t>(nx) * ny, 0.0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double s = 0.0;
      for (int l = 0; l < ny; ++l)
        for (int k = 0; k < nx; ++k)
          s += kernel(grid.x.center(i) - grid.x.center(k), grid.y.center(j) - grid.y.center(l)) *
               field[static_cast<size_t>(l) * nx + k];
      out[static_cast<size_t>(j) * nx + i] = s * grid.cell_area();
    }
  return out;
}

}  // namespace satflow::reference
