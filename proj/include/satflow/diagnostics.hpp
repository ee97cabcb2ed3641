#pragma once

#include <functional>
#include <vector>

#include "satflow/core.hpp"

namespace satflow {

// Per-step audit trail of a run: mass per species, density extrema, total
// density maximum, and (for gradient-flow runs) the discrete free energy.
struct DiagnosticsSeries {
  std::vector<double> times;
  std::vector<std::vector<double>> mass_per_species;  // [step][species]
  std::vector<double> min_density;
  std::vector<double> max_density;
  std::vector<double> max_sigma;
  std::vector<double> energy;  // empty unless tracked
  bool has_energy = false;

  size_t size() const { return times.size(); }
};

struct Norms {
  double l1 = 0.0, l2 = 0.0, linf = 0.0;
};

// Reference sampled at cell centers; for multi-species fields the norms are
// taken over the stacked per-species differences.
using ReferenceFn = std::function<double(int p, double t, double x, double y)>;

Norms error_norms(const CellField& numerical, const ReferenceFn& reference, double t,
                  const Grid1D& grid);
Norms error_norms_2d(const CellField& numerical, const ReferenceFn& reference, double t,
                     const Grid2D& grid);

// Stationary profile alpha exp(-(C/2D) [|x|^2 - l^2]^+); the saturated
// plateau |x| <= l joins a Gaussian tail with a kink at |x| = l.
struct KinkParams {
  double alpha = 1.0, C = 1.0, D = 1.0;
};
double kink_steady_state(const KinkParams& p, double l, double radius);

// Total mass of the kink profile on the half line (1D) or quarter plane (2D).
double mass_of_l(const KinkParams& p, double l, int dimension);
// Inverts mass_of_l by bisection (to 1e-12 in l); returns 0 for subcritical
// masses M <= M_c and reports the critical case through *subcritical.
double solve_l_from_mass(const KinkParams& p, double mass, int dimension,
                         bool* subcritical = nullptr);

// Segregation metric sum_i min(rho_i, eta_i) * cell measure.
double overlap_integral(std::span<const double> rho, std::span<const double> eta,
                        double cell_measure);

struct ConvergenceRow {
  double dx = 0.0, dt = 0.0;
  Norms error;
  bool ok = false;
  std::string message;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  // log2(e_k / e_{k+1}) between successive rows, per norm.
  std::vector<double> observed_l1_orders, observed_l2_orders, observed_linf_orders;
  void compute_orders();
};

}  // namespace satflow
