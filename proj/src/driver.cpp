#include "satflow/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace satflow {

namespace {

constexpr int kMaxHalvings = 20;
constexpr double kBoundSlack = 1e-12;

RunOutput fail(RunError kind, std::string message) {
  RunOutput out;
  out.error_kind = kind;
  out.message = std::move(message);
  return out;
}

std::string check_scheme_pairing(const ProblemSpec& problem, const SolverOptions& opt) {
  const Scheme s = opt.scheme;
  if (scheme_is_scalar(s) != (problem.num_species == 1))
    return "scheme " + scheme_name(s) + " does not match a " +
           std::to_string(problem.num_species) + "-species problem";
  if (problem.energy) {
    if (!scheme_is_gradient_flow(s) && !scheme_is_explicit(s))
      return "gradient-flow problems support only the gradient-flow and explicit schemes";
    if (problem.dimension == 2 && scheme_is_explicit(s))
      return "2D gradient flows support only the sweeping-split implicit path";
  } else {
    if (scheme_is_gradient_flow(s))
      return "gradient-flow scheme requested for a prescribed-velocity problem";
  }
  if (!scheme_is_explicit(s) && opt.dt_policy.kind == DtPolicy::Kind::CflDriven)
    return "CFL-driven time steps apply to the explicit schemes only";
  if (opt.dt_policy.kind == DtPolicy::Kind::FixedDt && !(opt.dt_policy.value > 0.0))
    return "fixed time step must be positive";
  if (!(opt.theta >= 0.0 && opt.theta <= 2.0)) return "theta must lie in [0,2]";
  if (!(opt.t_end >= 0.0)) return "final time must be non-negative";
  return {};
}

struct StepContext {
  const ProblemSpec* problem = nullptr;
  Grid1D grid1;
  Grid2D grid2;
  SaturationSpec sat;
  SchemeConfig config;
  // 1D machinery
  EnergyAssembly1D assembly;
  VelocityField prescribed_u;
  // 2D machinery
  std::optional<GradientFlow2DStepper> stepper2d;
  Prescribed2D prescribed2d;
  int step_count = 0;

  double cell_measure() const {
    return problem->dimension == 1 ? grid1.dx : grid2.cell_area();
  }
};

VelocityField sample_velocity_1d(const ProblemSpec& problem, const Grid1D& grid) {
  VelocityField u(problem.num_species, grid.num_cells);
  for (int p = 0; p < problem.num_species; ++p)
    for (int f = 0; f <= grid.num_cells; ++f)
      u(p, f) = problem.velocity_x(p, grid.interface(f), 0.0);
  return u;
}

double explicit_bound(const StepContext& ctx, const CellField& state) {
  if (ctx.problem->dimension == 2)
    return cfl_bound_2d(ctx.grid2, ctx.prescribed2d, ctx.sat, ctx.problem->num_species);
  if (ctx.problem->energy) {
    const auto xi = entropy_variables(state, state, ctx.assembly);
    const auto u = interface_velocity(xi, state, ctx.assembly, ctx.grid1);
    return cfl_dt(ctx.sat, u, ctx.grid1.dx, ctx.grid1.boundary, state.num_species());
  }
  return cfl_dt(ctx.sat, ctx.prescribed_u, ctx.grid1.dx, ctx.grid1.boundary,
                state.num_species());
}

StepReport take_step(StepContext& ctx, CellField& state, const CellField& prev, double dt) {
  const ProblemSpec& problem = *ctx.problem;
  if (problem.dimension == 2) {
    const bool x_first = ctx.step_count % 2 == 0;
    if (ctx.stepper2d) return ctx.stepper2d->step(state, dt, x_first);
    return advect_step_2d(state, ctx.grid2, ctx.prescribed2d, ctx.sat, ctx.config, dt, x_first);
  }
  if (scheme_is_explicit(ctx.config.scheme)) {
    VelocityField u = problem.energy
                          ? interface_velocity(entropy_variables(state, state, ctx.assembly),
                                               state, ctx.assembly, ctx.grid1)
                          : ctx.prescribed_u;
    return explicit_step(state, u, ctx.sat, ctx.config, ctx.grid1, dt);
  }
  const ImplicitModel model = problem.energy
                                  ? gradient_flow_model(ctx.assembly, prev, ctx.grid1)
                                  : prescribed_model(ctx.prescribed_u);
  return implicit_step(state, model, ctx.sat, ctx.config.picard, ctx.grid1, dt);
}

void record(const StepContext& ctx, DiagnosticsSeries& series, double t, const CellField& state) {
  series.times.push_back(t);
  series.mass_per_species.push_back(state.masses(ctx.cell_measure()));
  series.min_density.push_back(state.min_value());
  series.max_density.push_back(state.max_value());
  series.max_sigma.push_back(state.max_sigma());
  if (series.has_energy) {
    double e = 0.0;
    if (ctx.problem->dimension == 2 && ctx.stepper2d)
      e = ctx.stepper2d->energy(state);
    else
      e = discrete_energy(state, ctx.assembly, ctx.cell_measure());
    series.energy.push_back(e);
  }
}

void apply_sources(StepContext& ctx, CellField& state, double t_next, double dt) {
  const ProblemSpec& problem = *ctx.problem;
  if (!problem.source) return;
  if (problem.dimension == 1) {
    for (int p = 0; p < state.num_species(); ++p)
      for (int i = 0; i < ctx.grid1.num_cells; ++i)
        state(p, i) += dt * problem.source(p, t_next, ctx.grid1.center(i), 0.0);
  } else {
    for (int p = 0; p < state.num_species(); ++p)
      for (int j = 0; j < ctx.grid2.y.num_cells; ++j)
        for (int i = 0; i < ctx.grid2.x.num_cells; ++i)
          state(p, ctx.grid2.index(i, j)) +=
              dt * problem.source(p, t_next, ctx.grid2.x.center(i), ctx.grid2.y.center(j));
    if (ctx.stepper2d) ctx.stepper2d->rebuild_convolutions(state);
  }
}

}  // namespace

SolverOptions default_options(const ProblemSpec& problem) {
  SolverOptions opt;
  opt.scheme = problem.default_scheme;
  opt.t_end = problem.final_time;
  const double dx = problem.default_dx;
  opt.cells_x = static_cast<int>(std::lround((problem.x_max - problem.x_min) / dx));
  opt.cells_y = problem.dimension == 2
                    ? static_cast<int>(std::lround((problem.y_max - problem.y_min) / dx))
                    : 0;
  if (scheme_is_explicit(opt.scheme)) {
    opt.dt_policy = DtPolicy::cfl(0.9);
  } else {
    const double dt =
        problem.default_dt_abs > 0.0 ? problem.default_dt_abs : problem.default_dt_ratio * dx;
    opt.dt_policy = DtPolicy::fixed(dt);
  }
  return opt;
}

RunOutput run_problem(const ProblemSpec& problem, const SolverOptions& options) {
  if (const std::string err = check_scheme_pairing(problem, options); !err.empty())
    return fail(RunError::Config, err);
  if (options.cells_x < 4 || (problem.dimension == 2 && options.cells_y < 4))
    return fail(RunError::Config, "resolution must be at least 4 cells per dimension");

  StepContext ctx;
  ctx.problem = &problem;
  ctx.sat = problem.saturation_or_none();
  ctx.config.scheme = options.scheme;
  ctx.config.theta = options.theta;
  ctx.config.picard = options.picard;
  ctx.config.dt_policy = options.dt_policy;

  RunOutput out;
  int cells = options.cells_x;
  if (problem.dimension == 1) {
    ctx.grid1 = make_grid(problem.x_min, problem.x_max, options.cells_x, problem.boundary);
    out.grid1 = ctx.grid1;
  } else {
    ctx.grid2.x = make_grid(problem.x_min, problem.x_max, options.cells_x, problem.boundary);
    ctx.grid2.y = make_grid(problem.y_min, problem.y_max, options.cells_y, problem.boundary);
    out.grid2 = ctx.grid2;
    cells = ctx.grid2.num_cells();
  }

  // Initial datum at cell centers, with the admissibility check.
  CellField state(problem.num_species, cells);
  for (int p = 0; p < problem.num_species; ++p) {
    if (problem.dimension == 1) {
      for (int i = 0; i < cells; ++i) state(p, i) = problem.initial(p, ctx.grid1.center(i), 0.0);
    } else {
      for (int j = 0; j < ctx.grid2.y.num_cells; ++j)
        for (int i = 0; i < ctx.grid2.x.num_cells; ++i)
          state(p, ctx.grid2.index(i, j)) =
              problem.initial(p, ctx.grid2.x.center(i), ctx.grid2.y.center(j));
    }
  }
  if (!state.all_finite()) return fail(RunError::Config, "initial datum is not finite");
  if (state.min_value() < 0.0) return fail(RunError::Config, "initial datum is negative");
  if (ctx.sat.bounded() && !problem.datum_may_exceed_alpha &&
      state.max_sigma() > ctx.sat.alpha() + kBoundSlack)
    return fail(RunError::Config, "initial total density exceeds the saturation level");
  if (ctx.sat.bounded() && problem.datum_may_exceed_alpha && scheme_is_explicit(options.scheme) &&
      state.max_sigma() > ctx.sat.alpha() + kBoundSlack)
    return fail(RunError::Config,
                "explicit schemes require an admissible datum (total density above the "
                "saturation level)");

  if (problem.energy) {
    try {
      validate_energy_spec(*problem.energy, ctx.sat.alpha());
    } catch (const std::exception& e) {
      return fail(RunError::Config, e.what());
    }
    if (problem.dimension == 1) {
      ctx.assembly = assemble_energy_1d(*problem.energy, ctx.grid1);
    } else if (scheme_is_gradient_flow(options.scheme)) {
      ctx.stepper2d.emplace(ctx.grid2, *problem.energy, ctx.sat, options.picard);
      ctx.stepper2d->rebuild_convolutions(state);
    }
  } else {
    if (!problem.velocity_x)
      return fail(RunError::Config, "problem defines neither an energy nor a velocity");
    if (problem.dimension == 1) {
      ctx.prescribed_u = sample_velocity_1d(problem, ctx.grid1);
    } else {
      ctx.prescribed2d.ux = problem.velocity_x;
      ctx.prescribed2d.uy = problem.velocity_y
                                ? problem.velocity_y
                                : [](int, double, double) { return 0.0; };
    }
  }

  out.series.has_energy = problem.energy.has_value();
  record(ctx, out.series, 0.0, state);
  if (options.on_step) options.on_step(0, 0.0, state);

  double t = 0.0;
  CellField backup = state;
  while (t < options.t_end) {
    double dt_nominal;
    if (options.dt_policy.kind == DtPolicy::Kind::FixedDt) {
      dt_nominal = options.dt_policy.value;
    } else {
      const double bound = explicit_bound(ctx, state);
      if (!std::isfinite(bound)) {
        // No transport at all; jump to the final time.
        dt_nominal = options.t_end - t;
      } else {
        dt_nominal = options.dt_policy.value * bound;
      }
    }
    const bool final_step = options.t_end - t <= dt_nominal * (1.0 + 1e-12);
    double dt = final_step ? options.t_end - t : dt_nominal;

    backup = state;
    StepReport rep = take_step(ctx, state, backup, dt);
    int halvings = 0;
    while (!rep.accepted && !scheme_is_explicit(options.scheme) && halvings < kMaxHalvings) {
      ++halvings;
      dt *= 0.5;
      state = backup;
      if (ctx.stepper2d) ctx.stepper2d->rebuild_convolutions(state);
      rep = take_step(ctx, state, backup, dt);
    }
    if (!rep.accepted) {
      out.state = backup;
      out.message = rep.error + " (last good time t=" + std::to_string(t) + ")";
      out.error_kind = RunError::Solver;
      return out;
    }

    const double t_next = (final_step && halvings == 0) ? options.t_end : t + dt;
    apply_sources(ctx, state, t_next, dt);
    t = t_next;
    ++ctx.step_count;
    record(ctx, out.series, t, state);
    if (options.on_step) options.on_step(ctx.step_count, t, state);
  }

  out.ok = true;
  out.state = std::move(state);
  out.steps_taken = ctx.step_count;
  return out;
}

ConvergenceTable convergence_study(const ProblemSpec& problem,
                                   const std::vector<std::pair<double, double>>& resolutions) {
  if (!problem.reference)
    throw std::invalid_argument("convergence_study: problem has no reference solution");
  ConvergenceTable table;
  table.rows.resize(resolutions.size());

  const int n = static_cast<int>(resolutions.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int r = 0; r < n; ++r) {
    const auto [dx, dt] = resolutions[r];
    SolverOptions opt = default_options(problem);
    opt.cells_x = static_cast<int>(std::lround((problem.x_max - problem.x_min) / dx));
    opt.cells_y = problem.dimension == 2
                      ? static_cast<int>(std::lround((problem.y_max - problem.y_min) / dx))
                      : 0;
    opt.dt_policy = DtPolicy::fixed(dt);
    const RunOutput run = run_problem(problem, opt);
    ConvergenceRow& row = table.rows[r];
    row.dx = dx;
    row.dt = dt;
    row.ok = run.ok;
    row.message = run.message;
    if (run.ok) {
      row.error = problem.dimension == 1
                      ? error_norms(run.state, problem.reference, opt.t_end, run.grid1)
                      : error_norms_2d(run.state, problem.reference, opt.t_end, run.grid2);
    }
  }
  table.compute_orders();
  return table;
}

std::vector<std::string> audit_series(const ProblemSpec& problem,
                                      const DiagnosticsSeries& series) {
  std::vector<std::string> violations;
  const SaturationSpec sat = problem.saturation_or_none();
  char buf[160];
  double sigma_cap = sat.alpha();
  if (problem.datum_may_exceed_alpha && !series.max_sigma.empty())
    sigma_cap = std::max(sigma_cap, series.max_sigma.front());

  for (size_t k = 0; k < series.size(); ++k) {
    if (series.min_density[k] < -1e-12) {
      std::snprintf(buf, sizeof buf, "step %zu: min density %.3e < -1e-12", k,
                    series.min_density[k]);
      violations.push_back(buf);
    }
    if (sat.bounded() && series.max_sigma[k] > sigma_cap + 1e-12) {
      std::snprintf(buf, sizeof buf, "step %zu: max total density %.17g above the bound %.17g",
                    k, series.max_sigma[k], sigma_cap);
      violations.push_back(buf);
    }
  }
  if (!problem.source && !series.mass_per_species.empty()) {
    const auto& first = series.mass_per_species.front();
    for (size_t k = 1; k < series.mass_per_species.size(); ++k)
      for (size_t p = 0; p < first.size(); ++p) {
        const double drift = std::abs(series.mass_per_species[k][p] - first[p]);
        if (drift > 1e-10 * std::max(1.0, std::abs(first[p]))) {
          std::snprintf(buf, sizeof buf, "step %zu: species %zu mass drift %.3e", k, p, drift);
          violations.push_back(buf);
        }
      }
  }
  if (series.has_energy && !problem.source) {
    for (size_t k = 1; k < series.energy.size(); ++k) {
      const double allowed = series.energy[k - 1] + 1e-10 * (1.0 + std::abs(series.energy[k - 1]));
      if (series.energy[k] > allowed) {
        std::snprintf(buf, sizeof buf, "step %zu: energy increased %.17g -> %.17g", k,
                      series.energy[k - 1], series.energy[k]);
        violations.push_back(buf);
      }
    }
  }
  return violations;
}

}  // namespace satflow
