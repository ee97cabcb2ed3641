#include "satflow/fluxes.hpp"

#include <algorithm>
#include <stdexcept>

namespace satflow {

namespace {
inline double upos(double u) { return std::max(u, 0.0); }
inline double uneg(double u) { return std::min(u, 0.0); }
}  // namespace

double VelocityField::max_abs(Boundary boundary) const {
  const int m = num_interfaces - 1;
  double out = 0.0;
  for (int p = 0; p < species; ++p) {
    if (boundary == Boundary::NoFlux) {
      for (int f = 1; f < m; ++f) out = std::max(out, std::abs((*this)(p, f)));
    } else {
      for (int f = 0; f <= m; ++f) out = std::max(out, std::abs((*this)(p, f)));
    }
  }
  return out;
}

InterfaceFlux explicit_flux(const InterfaceStates& states, const SaturationSpec& sat,
                            const VelocityField& u, const Grid1D& grid) {
  const int P = states.east.num_species();
  const int m = grid.num_cells;
  if (u.species != P || u.num_interfaces != m + 1)
    throw std::invalid_argument("explicit_flux: velocity shape mismatch");

  InterfaceFlux flux(P, m);
  // psi evaluated on the total-density reconstructions.
  std::vector<double> psi_e(m), psi_w(m);
  for (int i = 0; i < m; ++i) {
    psi_e[i] = sat.psi(states.sigma_east[i]);
    psi_w[i] = sat.psi(states.sigma_west[i]);
  }

  for (int p = 0; p < P; ++p) {
    for (int f = 1; f < m; ++f) {
      const int i = f - 1;
      flux(p, f) = states.east(p, i) * psi_w[i + 1] * upos(u(p, f)) +
                   states.west(p, i + 1) * psi_e[i] * uneg(u(p, f));
    }
    if (grid.boundary == Boundary::Periodic) {
      // Interface between the last and first cells; stored at both ends.
      const double F = states.east(p, m - 1) * psi_w[0] * upos(u(p, m)) +
                       states.west(p, 0) * psi_e[m - 1] * uneg(u(p, m));
      flux(p, 0) = F;
      flux(p, m) = F;
    }
  }
  return flux;
}

InterfaceFlux implicit_flux(const CellField& rho, const SaturationSpec& sat,
                            const VelocityField& u, const Grid1D& grid) {
  const int P = rho.num_species();
  const int m = grid.num_cells;
  if (u.species != P || u.num_interfaces != m + 1)
    throw std::invalid_argument("implicit_flux: velocity shape mismatch");

  InterfaceFlux flux(P, m);
  std::vector<double> psi_pos(m);
  for (int i = 0; i < m; ++i) psi_pos[i] = sat.psi_positive(rho.sigma(i));

  for (int p = 0; p < P; ++p) {
    for (int f = 1; f < m; ++f) {
      const int i = f - 1;
      flux(p, f) = rho(p, i) * psi_pos[i + 1] * upos(u(p, f)) +
                   rho(p, i + 1) * psi_pos[i] * uneg(u(p, f));
    }
    if (grid.boundary == Boundary::Periodic) {
      const double F = rho(p, m - 1) * psi_pos[0] * upos(u(p, m)) +
                       rho(p, 0) * psi_pos[m - 1] * uneg(u(p, m));
      flux(p, 0) = F;
      flux(p, m) = F;
    }
  }
  return flux;
}

double cfl_dt_scalar(const SaturationSpec& sat, const VelocityField& u, double dx,
                     Boundary boundary) {
  const double umax = u.max_abs(boundary);
  if (umax == 0.0) return std::numeric_limits<double>::infinity();
  const double big_gamma = std::min(1.0 / sat.psi_zero(), sat.gamma());
  return big_gamma * dx / (2.0 * umax);
}

double cfl_dt_system(const SaturationSpec& sat, const VelocityField& u, double dx,
                     Boundary boundary) {
  const double umax = u.max_abs(boundary);
  if (umax == 0.0) return std::numeric_limits<double>::infinity();
  const double big_gamma = std::min(2.0 / sat.psi_zero(), sat.gamma());
  return big_gamma * dx / (4.0 * umax);
}

double cfl_dt(const SaturationSpec& sat, const VelocityField& u, double dx, Boundary boundary,
              int num_species) {
  return num_species == 1 ? cfl_dt_scalar(sat, u, dx, boundary)
                          : cfl_dt_system(sat, u, dx, boundary);
}

}  // namespace satflow
