#pragma once

#include "satflow/diagnostics.hpp"
#include "satflow/experiments.hpp"
#include "satflow/integration.hpp"

namespace satflow {

struct SolverOptions {
  Scheme scheme = Scheme::GradientFlowScalar;
  double theta = 2.0;
  DtPolicy dt_policy = DtPolicy::fixed(0.0);
  PicardParams picard;
  double t_end = 0.0;
  int cells_x = 0, cells_y = 0;
  // Invoked at t = 0 (step 0) and after every accepted step.
  std::function<void(int step, double t, const CellField& state)> on_step;
};

// Problem defaults resolved into a runnable option set.
SolverOptions default_options(const ProblemSpec& problem);

enum class RunError { None, Config, Solver, Invariant };

struct RunOutput {
  bool ok = false;
  RunError error_kind = RunError::None;
  std::string message;
  Grid1D grid1;
  Grid2D grid2;
  CellField state;
  DiagnosticsSeries series;
  int steps_taken = 0;
};

RunOutput run_problem(const ProblemSpec& problem, const SolverOptions& options);

// Runs the problem at every (dx, dt) resolution, measuring error norms
// against its reference solution at the final time. Rows run in parallel.
ConvergenceTable convergence_study(const ProblemSpec& problem,
                                   const std::vector<std::pair<double, double>>& resolutions);

// Invariant audit of a completed run: non-negativity, the saturation bound
// (where it applies), per-species mass conservation for source-free runs,
// and monotone energy for gradient-flow runs. Returns human-readable
// violation messages (empty = clean).
std::vector<std::string> audit_series(const ProblemSpec& problem, const DiagnosticsSeries& series);

}  // namespace satflow
