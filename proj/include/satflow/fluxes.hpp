#pragma once

#include "satflow/core.hpp"
#include "satflow/reconstruction.hpp"

namespace satflow {

// Values attached to cell interfaces f = 0..num_cells; interface f sits
// between cells f-1 and f. With periodic boundaries interfaces 0 and
// num_cells are the same physical point and carry equal values.
struct InterfaceValues {
  int species = 0;
  int num_interfaces = 0;  // num_cells + 1
  std::vector<double> v;

  InterfaceValues() = default;
  InterfaceValues(int num_species, int num_cells)
      : species(num_species), num_interfaces(num_cells + 1),
        v(static_cast<size_t>(num_species) * (num_cells + 1), 0.0) {}

  double& operator()(int p, int f) { return v[static_cast<size_t>(p) * num_interfaces + f]; }
  double operator()(int p, int f) const { return v[static_cast<size_t>(p) * num_interfaces + f]; }
};

struct VelocityField : InterfaceValues {
  enum class Provenance { Prescribed, FromEntropyVariables };
  Provenance provenance = Provenance::Prescribed;
  using InterfaceValues::InterfaceValues;

  // Largest |u| over the interfaces that carry flux for the given boundary.
  double max_abs(Boundary boundary) const;
};

using InterfaceFlux = InterfaceValues;

// F_{i+1/2} = rho_i^E psi(sigma_{i+1}^W) u^+ + rho_{i+1}^W psi(sigma_i^E) u^-.
// The scalar scheme is the single-species case (sigma == rho).
InterfaceFlux explicit_flux(const InterfaceStates& states, const SaturationSpec& sat,
                            const VelocityField& u, const Grid1D& grid);

// First-order flux on cell averages with the positive-part clamp on psi:
// F_{i+1/2} = rho_i [psi(sigma_{i+1})]^+ u^+ + rho_{i+1} [psi(sigma_i)]^+ u^-.
InterfaceFlux implicit_flux(const CellField& rho, const SaturationSpec& sat,
                            const VelocityField& u, const Grid1D& grid);

inline InterfaceFlux explicit_flux_scalar(const InterfaceStates& s, const SaturationSpec& sat,
                                          const VelocityField& u, const Grid1D& g) {
  return explicit_flux(s, sat, u, g);
}
inline InterfaceFlux explicit_flux_system(const InterfaceStates& s, const SaturationSpec& sat,
                                          const VelocityField& u, const Grid1D& g) {
  return explicit_flux(s, sat, u, g);
}
inline InterfaceFlux implicit_flux_scalar(const CellField& r, const SaturationSpec& sat,
                                          const VelocityField& u, const Grid1D& g) {
  return implicit_flux(r, sat, u, g);
}
inline InterfaceFlux implicit_flux_system(const CellField& r, const SaturationSpec& sat,
                                          const VelocityField& u, const Grid1D& g) {
  return implicit_flux(r, sat, u, g);
}

// Largest admissible explicit time step. Scalar: dt <= Gamma dx / (2 max|u|)
// with Gamma = min{1/psi(0), gamma}; system: dt <= Gamma dx / (4 max|u|) with
// Gamma = min{2/psi(0), gamma}. Returns +inf when u == 0.
double cfl_dt_scalar(const SaturationSpec& sat, const VelocityField& u, double dx,
                     Boundary boundary);
double cfl_dt_system(const SaturationSpec& sat, const VelocityField& u, double dx,
                     Boundary boundary);
double cfl_dt(const SaturationSpec& sat, const VelocityField& u, double dx, Boundary boundary,
              int num_species);

}  // namespace satflow
