#include "satflow/reconstruction.hpp"

#include <algorithm>
#include <stdexcept>

namespace satflow {

double minmod(double a, double b, double c) {
  if (a > 0.0 && b > 0.0 && c > 0.0) return std::min({a, b, c});
  if (a < 0.0 && b < 0.0 && c < 0.0) return std::max({a, b, c});
  return 0.0;
}

namespace {

// Slopes times dx/2 for one scalar array with ghost handling per boundary.
void half_increments(std::span<const double> v, const Grid1D& g, double theta,
                     std::vector<double>& out) {
  const int m = g.num_cells;
  out.resize(m);
  auto left = [&](int i) {
    if (i > 0) return v[i - 1];
    return g.boundary == Boundary::Periodic ? v[m - 1] : v[0];
  };
  auto right = [&](int i) {
    if (i < m - 1) return v[i + 1];
    return g.boundary == Boundary::Periodic ? v[0] : v[m - 1];
  };
#pragma omp parallel for schedule(static) if (m > 4096)
  for (int i = 0; i < m; ++i) {
    const double dl = v[i] - left(i);
    const double dr = right(i) - v[i];
    // (dx/2) * minmod(theta*dr/dx, (dl+dr)/2dx, theta*dl/dx)
    out[i] = 0.5 * minmod(theta * dr, 0.5 * (dl + dr), theta * dl);
  }
}

}  // namespace

InterfaceStates reconstruct(const CellField& field, const Grid1D& grid, double theta) {
  if (!(theta >= 0.0 && theta <= 2.0))
    throw std::invalid_argument("reconstruct: theta must lie in [0,2]");
  const int P = field.num_species();
  const int m = grid.num_cells;

  InterfaceStates st;
  st.east = CellField(P, m);
  st.west = CellField(P, m);

  std::vector<double> inc;
  for (int p = 0; p < P; ++p) {
    half_increments(field.species(p), grid, theta, inc);
    for (int i = 0; i < m; ++i) {
      st.east(p, i) = field(p, i) + inc[i];
      st.west(p, i) = field(p, i) - inc[i];
    }
  }

  std::vector<double> sigma(m);
  for (int i = 0; i < m; ++i) sigma[i] = field.sigma(i);
  half_increments(sigma, grid, theta, inc);
  st.sigma_east.resize(m);
  st.sigma_west.resize(m);
  for (int i = 0; i < m; ++i) {
    st.sigma_east[i] = sigma[i] + inc[i];
    st.sigma_west[i] = sigma[i] - inc[i];
  }
  return st;
}

}  // namespace satflow
