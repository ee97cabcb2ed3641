// Experiment front end: run a problem, sweep a convergence study, or audit a
// run's invariants. Exit codes: 0 success, 2 configuration error, 3 solver
// failure, 4 invariant violation.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <optional>

#include "satflow/driver.hpp"
#include "satflow/output.hpp"
#include "satflow/parallel.hpp"

namespace fs = std::filesystem;
using namespace satflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitInvariant = 4;

struct CommonFlags {
  std::string problem;
  bool no_saturation = false;
  int cells = 0;
  int k = 0;
  double dt = 0.0;
  double cfl = 0.0;
  double t_end = -1.0;
  double theta = 2.0;
  double mass = 0.0;
  std::string scheme;
  double picard_tol = 1e-10;
  int picard_max = 200;
  unsigned seed = 12345;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("problem", f.problem, "problem name (see `satflow list`)")->required();
  cmd->add_flag("--no-saturation", f.no_saturation, "run the unsaturated comparison variant");
  cmd->add_option("--cells", f.cells, "cells per dimension");
  cmd->add_option("--k", f.k, "resolution exponent: dx = unit * 2^-k")->excludes("--cells");
  cmd->add_option("--dt", f.dt, "fixed time step");
  cmd->add_option("--cfl", f.cfl, "CFL safety factor in (0,1] (explicit schemes)")
      ->excludes("--dt");
  cmd->add_option("--t-end", f.t_end, "final time");
  cmd->add_option("--theta", f.theta, "limiter parameter in [0,2]");
  cmd->add_option("--scheme", f.scheme,
                  "explicit|implicit|gradient-flow or a full name such as implicit-system");
  cmd->add_option("--mass", f.mass, "total mass for the kink problems");
  cmd->add_option("--picard-tol", f.picard_tol, "Picard update tolerance");
  cmd->add_option("--picard-max", f.picard_max, "Picard iteration cap");
  cmd->add_option("--seed", f.seed, "seed recorded for reproducibility");
  cmd->set_config("--config", "", "flat key=value config file; flags win");
}

ProblemSpec build_problem(const CommonFlags& f) {
  if (f.mass > 0.0) {
    if (f.problem == "kink-1d") return kink_problem(1, f.mass);
    if (f.problem == "kink-2d") return kink_problem(2, f.mass);
    throw std::invalid_argument("--mass applies to the kink problems only");
  }
  return make_problem(f.problem, f.no_saturation);
}

Scheme resolve_scheme(const std::string& name, const ProblemSpec& problem) {
  if (name.empty()) return problem.default_scheme;
  const bool scalar = problem.num_species == 1;
  if (name == "explicit") return scalar ? Scheme::ExplicitScalar : Scheme::ExplicitSystem;
  if (name == "implicit") return scalar ? Scheme::ImplicitScalar : Scheme::ImplicitSystem;
  if (name == "gradient-flow")
    return scalar ? Scheme::GradientFlowScalar : Scheme::GradientFlowSystem;
  return scheme_from_name(name);
}

SolverOptions build_options(const CommonFlags& f, const ProblemSpec& problem) {
  SolverOptions opt = default_options(problem);
  opt.scheme = resolve_scheme(f.scheme, problem);
  opt.theta = f.theta;
  opt.picard.tolerance = f.picard_tol;
  opt.picard.max_iterations = f.picard_max;
  if (f.t_end >= 0.0) opt.t_end = f.t_end;

  double dx = problem.default_dx;
  if (f.k > 0) dx = problem.k_unit * std::ldexp(1.0, -f.k);
  if (f.cells > 0) dx = (problem.x_max - problem.x_min) / f.cells;
  opt.cells_x = static_cast<int>(std::lround((problem.x_max - problem.x_min) / dx));
  opt.cells_y = problem.dimension == 2
                    ? static_cast<int>(std::lround((problem.y_max - problem.y_min) / dx))
                    : 0;

  if (f.cfl > 0.0) {
    opt.dt_policy = DtPolicy::cfl(f.cfl);
  } else if (f.dt > 0.0) {
    opt.dt_policy = DtPolicy::fixed(f.dt);
  } else if (scheme_is_explicit(opt.scheme)) {
    opt.dt_policy = DtPolicy::cfl(0.9);
  } else {
    opt.dt_policy = DtPolicy::fixed(problem.default_dt_abs > 0.0 ? problem.default_dt_abs
                                                                 : problem.default_dt_ratio * dx);
  }
  return opt;
}

int exit_code_for(const RunOutput& out) {
  switch (out.error_kind) {
    case RunError::None: return kExitOk;
    case RunError::Config: return kExitConfig;
    case RunError::Solver: return kExitSolver;
    case RunError::Invariant: return kExitInvariant;
  }
  return kExitSolver;
}

std::map<std::string, std::string> meta_entries(const CommonFlags& f, const ProblemSpec& problem,
                                                const SolverOptions& opt) {
  std::map<std::string, std::string> m;
  m["problem"] = problem.name;
  m["no_saturation"] = f.no_saturation ? "1" : "0";
  m["dimension"] = std::to_string(problem.dimension);
  m["species"] = std::to_string(problem.num_species);
  m["scheme"] = scheme_name(opt.scheme);
  m["cells_x"] = std::to_string(opt.cells_x);
  m["cells_y"] = std::to_string(opt.cells_y);
  m["dx"] = format_double((problem.x_max - problem.x_min) / opt.cells_x);
  m["theta"] = format_double(opt.theta);
  m["t_end"] = format_double(opt.t_end);
  m["picard_tolerance"] = format_double(opt.picard.tolerance);
  m["picard_max_iterations"] = std::to_string(opt.picard.max_iterations);
  m["seed"] = std::to_string(f.seed);
  if (opt.dt_policy.kind == DtPolicy::Kind::FixedDt)
    m["dt"] = format_double(opt.dt_policy.value);
  else
    m["cfl_safety"] = format_double(opt.dt_policy.value);
  if (f.mass > 0.0) m["mass"] = format_double(f.mass);
  return m;
}

int cmd_run(const CommonFlags& f, const std::string& out_dir, int snapshots, int snap_steps,
            double snap_time) {
  const ProblemSpec problem = build_problem(f);
  SolverOptions opt = build_options(f, problem);

  fs::create_directories(out_dir);
  const bool two_d = problem.dimension == 2;

  // Snapshot cadence: every N steps, every T time units, or `snapshots`
  // evenly spaced times (the default).
  std::vector<std::pair<int, double>> snapshot_log;
  double next_snap_time = 0.0;
  const double snap_dt = snap_time > 0.0 ? snap_time
                         : snapshots > 0 ? opt.t_end / snapshots
                                         : 0.0;
  Grid1D g1;
  Grid2D g2;
  auto write_snapshot = [&](int index, const CellField& state) {
    char name[32];
    std::snprintf(name, sizeof name, "fields_%04d.csv", index);
    const std::string path = (fs::path(out_dir) / name).string();
    if (two_d)
      write_fields_csv_2d(path, state, g2);
    else
      write_fields_csv(path, state, g1);
  };
  opt.on_step = [&](int step, double t, const CellField& state) {
    bool due = step == 0;
    if (snap_steps > 0)
      due = due || step % snap_steps == 0;
    else if (snap_dt > 0.0)
      due = due || t >= next_snap_time - 1e-12 * std::max(1.0, opt.t_end);
    if (!due) return;
    if (snap_dt > 0.0) next_snap_time = t + snap_dt;
    write_snapshot(static_cast<int>(snapshot_log.size()), state);
    snapshot_log.emplace_back(step, t);
  };

  // The grids are finalized inside run_problem; mirror them for snapshots.
  g1 = make_grid(problem.x_min, problem.x_max, std::max(opt.cells_x, 1), problem.boundary);
  g2.x = g1;
  g2.y = make_grid(problem.y_min, problem.y_max, std::max(opt.cells_y, 1), problem.boundary);

  const RunOutput out = run_problem(problem, opt);
  if (!out.ok) {
    std::fprintf(stderr, "error: %s\n", out.message.c_str());
    return exit_code_for(out);
  }

  // Final state is always the last snapshot.
  if (snapshot_log.empty() || snapshot_log.back().second < opt.t_end) {
    write_snapshot(static_cast<int>(snapshot_log.size()), out.state);
    snapshot_log.emplace_back(out.steps_taken, opt.t_end);
  }

  write_diagnostics_csv((fs::path(out_dir) / "diagnostics.csv").string(), out.series,
                        problem.num_species);
  auto meta = meta_entries(f, problem, opt);
  meta["steps_taken"] = std::to_string(out.steps_taken);
  for (size_t s = 0; s < snapshot_log.size(); ++s) {
    char key[32];
    std::snprintf(key, sizeof key, "snapshot_%04zu", s);
    meta[key] = format_double(snapshot_log[s].second);
  }
  write_meta((fs::path(out_dir) / "meta.txt").string(), meta);

  std::printf("%s: %d steps to t=%s, mass", problem.name.c_str(), out.steps_taken,
              format_double(opt.t_end).c_str());
  for (double mp : out.state.masses(problem.dimension == 1 ? out.grid1.dx : out.grid2.cell_area()))
    std::printf(" %.6g", mp);
  std::printf(", wrote %zu snapshots to %s\n", snapshot_log.size(), out_dir.c_str());
  return kExitOk;
}

int cmd_convergence(const CommonFlags& f, int kmin, int kmax, const std::string& out_dir) {
  const ProblemSpec problem = build_problem(f);
  if (!problem.reference) {
    std::fprintf(stderr, "error: problem %s has no reference solution\n", problem.name.c_str());
    return kExitConfig;
  }
  if (kmin < 1 || kmax < kmin) {
    std::fprintf(stderr, "error: need 1 <= kmin <= kmax\n");
    return kExitConfig;
  }
  std::vector<std::pair<double, double>> resolutions;
  for (int k = kmin; k <= kmax; ++k) {
    const double dx = problem.k_unit * std::ldexp(1.0, -k);
    const double dt =
        problem.default_dt_abs > 0.0 ? problem.default_dt_abs : problem.default_dt_ratio * dx;
    resolutions.emplace_back(dx, dt);
  }

  const ConvergenceTable table = convergence_study(problem, resolutions);

  std::printf("# %s, t_end=%s\n", problem.name.c_str(), format_double(problem.final_time).c_str());
  std::printf("%-4s %-12s %-12s %-12s %-12s %-12s %-8s\n", "k", "dx", "dt", "L1", "L2", "Linf",
              "L1 order");
  bool all_ok = true;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (!row.ok) {
      all_ok = false;
      std::printf("%-4d failed: %s\n", kmin + static_cast<int>(r), row.message.c_str());
      continue;
    }
    std::printf("%-4d %-12.5g %-12.5g %-12.5g %-12.5g %-12.5g", kmin + static_cast<int>(r),
                row.dx, row.dt, row.error.l1, row.error.l2, row.error.linf);
    if (r > 0)
      std::printf(" %-8.3f", table.observed_l1_orders[r - 1]);
    std::printf("\n");
  }

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream csv(fs::path(out_dir) / "convergence.csv");
    csv << "k,dx,dt,l1,l2,linf\n";
    for (size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      csv << kmin + static_cast<int>(r) << ',' << format_double(row.dx) << ','
          << format_double(row.dt) << ',' << format_double(row.error.l1) << ','
          << format_double(row.error.l2) << ',' << format_double(row.error.linf) << "\n";
    }
  }
  return all_ok ? kExitOk : kExitSolver;
}

int cmd_audit(const CommonFlags& f) {
  const ProblemSpec problem = build_problem(f);
  const SolverOptions opt = build_options(f, problem);
  const RunOutput out = run_problem(problem, opt);
  if (!out.ok) {
    std::fprintf(stderr, "error: %s\n", out.message.c_str());
    return exit_code_for(out);
  }
  const auto violations = audit_series(problem, out.series);
  if (violations.empty()) {
    std::printf("%s: %d steps audited, no invariant violations\n", problem.name.c_str(),
                out.steps_taken);
    return kExitOk;
  }
  for (const auto& v : violations) std::fprintf(stderr, "violation: %s\n", v.c_str());
  return kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap_from_env();

  CLI::App app{"finite-volume solver for continuity equations with saturation mobility"};
  app.require_subcommand(1);

  CommonFlags run_flags, conv_flags, audit_flags;
  std::string run_out = "out", conv_out;
  int snapshots = 50, snap_steps = 0;
  double snap_time = 0.0;
  int kmin = 1, kmax = 5;

  CLI::App* run = app.add_subcommand("run", "run one experiment and write CSV output");
  add_common_flags(run, run_flags);
  run->add_option("--out", run_out, "output directory");
  run->add_option("--snapshots", snapshots, "number of field snapshots (default 50)");
  run->add_option("--snap-every-steps", snap_steps, "snapshot every N steps");
  run->add_option("--snap-every-time", snap_time, "snapshot every T time units");

  CLI::App* conv = app.add_subcommand("convergence", "grid-refinement error study");
  add_common_flags(conv, conv_flags);
  conv->add_option("--kmin", kmin, "coarsest resolution exponent");
  conv->add_option("--kmax", kmax, "finest resolution exponent");
  conv->add_option("--out", conv_out, "directory for convergence.csv");

  CLI::App* audit = app.add_subcommand("audit", "run the invariant suite on a problem");
  add_common_flags(audit, audit_flags);

  CLI::App* list = app.add_subcommand("list", "list available problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (list->parsed()) {
      for (const auto& name : problem_names()) std::printf("%s\n", name.c_str());
      return kExitOk;
    }
    if (run->parsed()) return cmd_run(run_flags, run_out, snapshots, snap_steps, snap_time);
    if (conv->parsed()) return cmd_convergence(conv_flags, kmin, kmax, conv_out);
    if (audit->parsed()) return cmd_audit(audit_flags);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
