#pragma once

#include <optional>
#include <string>

#include "satflow/core.hpp"
#include "satflow/diagnostics.hpp"
#include "satflow/gradientflow.hpp"

namespace satflow {

// A self-contained experiment definition: domain, datum, model (energy or
// prescribed velocity), saturation, sources, and the reference resolution /
// step the experiment was reported with.
struct ProblemSpec {
  std::string name;
  int dimension = 1;
  int num_species = 1;
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  Boundary boundary = Boundary::NoFlux;

  std::optional<SaturationSpec> saturation;
  std::optional<EnergySpec> energy;  // gradient-flow problems
  std::function<double(int p, double x, double y)> initial;
  std::function<double(int p, double x, double y)> velocity_x;  // prescribed problems
  std::function<double(int p, double x, double y)> velocity_y;
  std::function<double(int p, double t, double x, double y)> source;
  ReferenceFn reference;  // exact solution when known

  double final_time = 1.0;
  Scheme default_scheme = Scheme::GradientFlowScalar;
  double default_dx = 0.0;
  double default_dt_ratio = 0.0;  // dt = ratio * dx when no absolute default
  double default_dt_abs = 0.0;
  double k_unit = 1.0;  // resolution exponent k means dx = k_unit * 2^-k
  // The printed datum of the freeze experiment exceeds the saturation level;
  // runs proceed, but the sigma <= alpha admissibility check is waived.
  bool datum_may_exceed_alpha = false;
  bool has_no_saturation_variant = false;

  SaturationSpec saturation_or_none() const {
    return saturation ? *saturation : SaturationSpec::none();
  }
};

// Cross-diffusion (SKT) manufactured-solution problem on (-pi,pi)^2 with
// periodic boundaries; sources make rho = (1+sin(x+t))/4, eta = (1+cos(y+t))/4
// exact for the model with or without the (1 - rho - eta) saturation factor.
ProblemSpec skt_manufactured(bool with_saturation);
double skt_exact(int species, double t, double x, double y);
double skt_source(bool with_saturation, int species, double t, double x, double y);

// Saturated Fokker-Planck steady-state problem: mobility rho(1-rho), energy
// log(rho) + |x|^2/2, constant supercritical-mass datum on (0,4)^d.
ProblemSpec kink_problem(int dimension, double mass);

// Two-species cross-diffusion with total-density pressure and unequal
// confinement; the saturated variant freezes before full segregation.
ProblemSpec freeze_problem(int dimension, bool with_saturation = true);

enum class Engulfment { Partial, Complete };

// Two-species cell-cell adhesion model with quadratic interaction kernels on
// (-2,2)^2; Partial/Complete select the printed attraction coefficients.
ProblemSpec adhesion_problem(Engulfment mode, bool with_saturation = true);

std::vector<std::string> problem_names();
ProblemSpec make_problem(const std::string& name, bool no_saturation = false);

}  // namespace satflow
