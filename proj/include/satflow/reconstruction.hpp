#pragma once

#include "satflow/core.hpp"

namespace satflow {

// East/west interface states per (species, cell) plus the independently
// reconstructed total-density states. (east + west)/2 recovers the cell
// average; the minmod limiter keeps every state inside the local data range.
struct InterfaceStates {
  CellField east;
  CellField west;
  std::vector<double> sigma_east;
  std::vector<double> sigma_west;
};

// min(a,b,c) when all strictly positive, max(a,b,c) when all strictly
// negative, 0 otherwise. Sign tests are exact comparisons with zero.
double minmod(double a, double b, double c);

// Second-order MUSCL reconstruction with limiter parameter theta in [0,2].
// NoFlux boundaries mirror the adjacent interior value (boundary slopes
// vanish); Periodic boundaries wrap. The sigma states come from the total
// density's own slopes, not from summing per-species states.
InterfaceStates reconstruct(const CellField& field, const Grid1D& grid, double theta);

}  // namespace satflow
