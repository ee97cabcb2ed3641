#pragma once

#include <functional>
#include <optional>
#include <string>

#include "satflow/core.hpp"
#include "satflow/fluxes.hpp"
#include "satflow/gradientflow.hpp"

namespace satflow {

struct StepReport {
  double dt_used = 0.0;
  int picard_iterations = 0;
  double picard_residual = 0.0;  // l-inf of the last update
  bool accepted = false;
  std::string error;
};

// What the implicit solver needs from the model at a candidate state: the
// interface velocities, and (for gradient flows) the convexity data that
// the entropy linearization folds into the frozen-coefficient solve.
struct ImplicitLinearization {
  VelocityField u;
  std::vector<double> entropy_hessian;   // per cell, PxP row-major; empty = none
  std::vector<double> mobility_factor;   // per interface, PxP; empty = identity
};
using ImplicitModel = std::function<ImplicitLinearization(const CellField& candidate)>;

ImplicitModel prescribed_model(VelocityField u);
// Gradient-flow model: xi and u from the assembly with rho** = (cand+prev)/2.
ImplicitModel gradient_flow_model(const EnergyAssembly1D& assembly, const CellField& prev,
                                  const Grid1D& grid);

// Conservative explicit update. Rejects dt above the CFL bound of the
// matching proposition (scalar for one species, system otherwise) instead of
// clipping. On success the state is replaced by the new time level.
StepReport explicit_step(CellField& state, const VelocityField& u, const SaturationSpec& sat,
                         const SchemeConfig& config, const Grid1D& grid, double dt);

// Lagged-coefficient fixed-point solve of the implicit scheme: freeze psi,
// the upwind switches, the mobility average, and the nonlocal terms at the
// current iterate; linearize the convex local entropy terms; solve the
// resulting (block-)tridiagonal M-matrix system; repeat until the l-inf
// update falls below picard.tolerance. Oscillation triggers progressive
// relaxation. Non-convergence rejects the step (callers halve dt and retry).
StepReport implicit_step(CellField& state, const ImplicitModel& model, const SaturationSpec& sat,
                         const PicardParams& picard, const Grid1D& grid, double dt);

// Residual of the fully implicit scheme at the proposed time level:
// (next - prev)/dt + (F_{i+1/2} - F_{i-1/2})/dx with F evaluated at next.
CellField implicit_residual(const CellField& next, const CellField& prev,
                            const VelocityField& u_at_next, const SaturationSpec& sat,
                            const Grid1D& grid, double dt);
double implicit_residual_norm(const CellField& next, const CellField& prev,
                              const VelocityField& u_at_next, const SaturationSpec& sat,
                              const Grid1D& grid, double dt);

// Prescribed-velocity problems on a 2D grid: one full dt by dimensional
// splitting (per-row 1D solves along x, then per-column along y; order
// swapped when x_first is false).
struct Prescribed2D {
  std::function<double(int p, double x, double y)> ux, uy;
};
StepReport advect_step_2d(CellField& state, const Grid2D& grid, const Prescribed2D& velocity,
                          const SaturationSpec& sat, const SchemeConfig& config, double dt,
                          bool x_first);
// Smallest per-line explicit CFL bound over both sweep directions.
double cfl_bound_2d(const Grid2D& grid, const Prescribed2D& velocity, const SaturationSpec& sat,
                    int num_species);

// Sweeping dimensional splitting for 2D gradient flows: rows (then columns)
// are solved implicitly in sequence, and the nonlocal convolution fields are
// kept current between line solves, so the 1D energy-dissipation argument
// applies to every line solve.
class GradientFlow2DStepper {
 public:
  GradientFlow2DStepper(const Grid2D& grid, EnergySpec energy, SaturationSpec sat,
                        PicardParams picard);

  StepReport step(CellField& state, double dt, bool x_first);
  // Discrete 2D free energy; uses the maintained convolutions, which match
  // the state the stepper last saw (after step() or rebuild_convolutions()).
  double energy(const CellField& state) const;
  void rebuild_convolutions(const CellField& state);

 private:
  struct Sweep;  // axis view: x rows or y columns
  StepReport sweep(CellField& state, const Sweep& axis, double dt);

  Grid2D grid_;
  EnergySpec energy_;
  SaturationSpec sat_;
  PicardParams picard_;
  std::optional<Convolution2D> conv_rho_;      // W_rho * rho
  std::optional<Convolution2D> conv_eta_;      // W_eta * eta
  std::optional<Convolution2D> conv_sig_rho_;  // W_sigma * rho
  std::optional<Convolution2D> conv_sig_eta_;  // W_sigma * eta
};

}  // namespace satflow
