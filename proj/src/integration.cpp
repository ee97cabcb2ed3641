#include "satflow/integration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "satflow/reconstruction.hpp"
#include "satflow/tridiag.hpp"

namespace satflow {

namespace {
inline double upos(double u) { return std::max(u, 0.0); }
inline double uneg(double u) { return std::min(u, 0.0); }
}  // namespace

StepReport explicit_step(CellField& state, const VelocityField& u, const SaturationSpec& sat,
                         const SchemeConfig& config, const Grid1D& grid, double dt) {
  StepReport rep;
  rep.dt_used = dt;
  const int P = state.num_species();
  const double bound = cfl_dt(sat, u, grid.dx, grid.boundary, P);
  if (dt > bound) {
    rep.error = "explicit_step: dt " + std::to_string(dt) + " exceeds the CFL bound " +
                std::to_string(bound);
    return rep;
  }

  const auto states = reconstruct(state, grid, config.theta);
  const auto flux = explicit_flux(states, sat, u, grid);
  const double lambda = dt / grid.dx;
  const int m = grid.num_cells;
  for (int p = 0; p < P; ++p)
    for (int i = 0; i < m; ++i) state(p, i) -= lambda * (flux(p, i + 1) - flux(p, i));
  rep.accepted = true;
  return rep;
}

CellField implicit_residual(const CellField& next, const CellField& prev,
                            const VelocityField& u_at_next, const SaturationSpec& sat,
                            const Grid1D& grid, double dt) {
  const auto flux = implicit_flux(next, sat, u_at_next, grid);
  const int P = next.num_species();
  const int m = grid.num_cells;
  CellField res(P, m);
  for (int p = 0; p < P; ++p)
    for (int i = 0; i < m; ++i)
      res(p, i) = (next(p, i) - prev(p, i)) / dt + (flux(p, i + 1) - flux(p, i)) / grid.dx;
  return res;
}

double implicit_residual_norm(const CellField& next, const CellField& prev,
                              const VelocityField& u_at_next, const SaturationSpec& sat,
                              const Grid1D& grid, double dt) {
  const auto res = implicit_residual(next, prev, u_at_next, sat, grid, dt);
  double norm = 0.0;
  for (int p = 0; p < res.num_species(); ++p)
    for (int i = 0; i < res.num_cells(); ++i) norm = std::max(norm, std::abs(res(p, i)));
  return norm;
}

ImplicitModel prescribed_model(VelocityField u) {
  return [u = std::move(u)](const CellField&) {
    ImplicitLinearization lin;
    lin.u = u;
    return lin;
  };
}

ImplicitModel gradient_flow_model(const EnergyAssembly1D& assembly, const CellField& prev,
                                  const Grid1D& grid) {
  return [&assembly, &prev, &grid](const CellField& candidate) {
    ImplicitLinearization lin;
    const EntropyVariables xi = entropy_variables(candidate, prev, assembly);
    lin.mobility_factor = interface_mobility(candidate, assembly, grid);
    lin.u = interface_velocity(xi, candidate, assembly, grid);
    lin.entropy_hessian = entropy_hessian(candidate, assembly);
    return lin;
  };
}

namespace {

// One linearized solve around the iterate: J delta = -residual, where J keeps
// the frozen-coefficient transport structure and adds the convex entropy
// diffusion blocks G = (lambda/dx) diag(m_up) S J_cell at each interface.
struct LinearizedSystem {
  int m = 0, P = 0;
  std::vector<double> lower, diag, upper;      // m blocks each, PxP
  std::vector<double> corner_top, corner_bottom;  // periodic couplers
  std::vector<double> rhs;                     // -residual, m*P
};

void assemble_linearized(const CellField& iterate, const CellField& prev,
                         const ImplicitLinearization& lin, const SaturationSpec& sat,
                         const Grid1D& grid, double dt, LinearizedSystem& sys) {
  const int m = grid.num_cells;
  const int P = iterate.num_species();
  const int B = P * P;
  const double lambda = dt / grid.dx;
  const bool periodic = grid.boundary == Boundary::Periodic;
  const bool newton = !lin.entropy_hessian.empty();

  sys.m = m;
  sys.P = P;
  sys.lower.assign(static_cast<size_t>(m) * B, 0.0);
  sys.diag.assign(static_cast<size_t>(m) * B, 0.0);
  sys.upper.assign(static_cast<size_t>(m) * B, 0.0);
  sys.corner_top.assign(B, 0.0);
  sys.corner_bottom.assign(B, 0.0);
  sys.rhs.assign(static_cast<size_t>(m) * P, 0.0);
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < P; ++p) sys.diag[static_cast<size_t>(i) * B + p * P + p] = 1.0;

  std::vector<double> psi_pos(m);
  for (int i = 0; i < m; ++i) psi_pos[i] = sat.psi_positive(iterate.sigma(i));

  // Residual from the exact implicit flux at the iterate (mass form).
  const InterfaceFlux flux = implicit_flux(iterate, sat, lin.u, grid);
  for (int p = 0; p < P; ++p)
    for (int i = 0; i < m; ++i)
      sys.rhs[static_cast<size_t>(i) * P + p] =
          -(iterate(p, i) - prev(p, i) + lambda * (flux(p, i + 1) - flux(p, i)));

  auto add_block = [B](std::vector<double>& dst, int i, const double* g, double scale) {
    for (int q = 0; q < B; ++q) dst[static_cast<size_t>(i) * B + q] += scale * g[q];
  };

  // Interface f between cells L and R (flux-carrying interfaces only).
  auto couple = [&](int f, int L, int R, std::vector<double>& row_L_right,
                    std::vector<double>& row_R_left, int idx_L, int idx_R) {
    for (int p = 0; p < P; ++p) {
      const double a = psi_pos[R] * upos(lin.u(p, f));  // multiplies rho_L
      const double b = psi_pos[L] * uneg(lin.u(p, f));  // multiplies rho_R
      // Transport part: row L sees +lambda a (diag) and +lambda b (to R);
      // row R sees -lambda a (to L) and -lambda b (diag).
      sys.diag[static_cast<size_t>(L) * B + p * P + p] += lambda * a;
      row_L_right[static_cast<size_t>(idx_L) * B + p * P + p] += lambda * b;
      row_R_left[static_cast<size_t>(idx_R) * B + p * P + p] -= lambda * a;
      sys.diag[static_cast<size_t>(R) * B + p * P + p] -= lambda * b;
    }
    if (!newton) return;
    // Entropy linearization: dF = -(1/dx) diag(m_up) S (J_R dR - J_L dL).
    double mup[2];
    for (int p = 0; p < P; ++p) {
      const double uf = lin.u(p, f);
      if (uf > 0.0)
        mup[p] = iterate(p, L) * psi_pos[R];
      else if (uf < 0.0)
        mup[p] = iterate(p, R) * psi_pos[L];
      else
        mup[p] = 0.5 * (iterate(p, L) * psi_pos[R] + iterate(p, R) * psi_pos[L]);
    }
    const double* S = lin.mobility_factor.empty()
                          ? nullptr
                          : &lin.mobility_factor[static_cast<size_t>(f) * B];
    auto G = [&](int cell, double* out) {
      const double* J = &lin.entropy_hessian[static_cast<size_t>(cell) * B];
      for (int p = 0; p < P; ++p)
        for (int q = 0; q < P; ++q) {
          double s = 0.0;
          for (int k = 0; k < P; ++k) s += (S ? S[p * P + k] : (p == k ? 1.0 : 0.0)) * J[k * P + q];
          out[p * P + q] = lambda / grid.dx * mup[p] * s;
        }
    };
    double GL[4], GR[4];
    G(L, GL);
    G(R, GR);
    // Row L: lambda dF_f enters with +; row R with -.
    add_block(sys.diag, L, GL, 1.0);
    add_block(row_L_right, idx_L, GR, -1.0);
    add_block(row_R_left, idx_R, GL, -1.0);
    add_block(sys.diag, R, GR, 1.0);
  };

  for (int f = 1; f < m; ++f) couple(f, f - 1, f, sys.upper, sys.lower, f - 1, f);
  if (periodic) couple(m, m - 1, 0, sys.corner_bottom, sys.corner_top, 0, 0);
}

}  // namespace

StepReport implicit_step(CellField& state, const ImplicitModel& model, const SaturationSpec& sat,
                         const PicardParams& picard, const Grid1D& grid, double dt) {
  StepReport rep;
  rep.dt_used = dt;
  const int P = state.num_species();
  const int m = grid.num_cells;

  const CellField prev = state;
  CellField iterate = state;
  std::vector<double> delta(static_cast<size_t>(m) * P);
  LinearizedSystem sys;
  double damping = picard.damping;
  double prev_update = std::numeric_limits<double>::infinity();

  try {
    for (int it = 1; it <= picard.max_iterations; ++it) {
      const ImplicitLinearization lin = model(iterate);
      assemble_linearized(iterate, prev, lin, sat, grid, dt, sys);
      if (grid.boundary == Boundary::Periodic)
        solve_cyclic_block_tridiagonal(m, P, sys.lower, sys.diag, sys.upper, sys.corner_top,
                                       sys.corner_bottom, sys.rhs, delta);
      else
        solve_block_tridiagonal(m, P, sys.lower, sys.diag, sys.upper, sys.rhs, delta);

      double update = 0.0;
      for (double d : delta) update = std::max(update, std::abs(d));
      if (!std::isfinite(update)) {
        rep.error = "implicit_step: linearized solve produced non-finite update";
        return rep;
      }
      // Oscillation control: relax harder after an update-norm increase,
      // recover gently while the iteration contracts.
      if (update > prev_update)
        damping = std::max(0.5 * damping, 0.0625);
      else
        damping = std::min(1.25 * damping, picard.damping);
      prev_update = update;

      rep.picard_iterations = it;
      rep.picard_residual = update;
      // The converged update is applied in full: the solved correction is in
      // conservative form, so the accepted state carries no relaxation-sized
      // mass drift.
      const double factor = update <= picard.tolerance ? 1.0 : damping;
      for (int p = 0; p < P; ++p)
        for (int i = 0; i < m; ++i)
          iterate(p, i) =
              std::max(iterate(p, i) + factor * delta[static_cast<size_t>(i) * P + p], 0.0);

      if (update <= picard.tolerance) {
        state = iterate;
        rep.accepted = true;
        return rep;
      }
    }
  } catch (const std::domain_error& e) {
    rep.error = std::string("implicit_step: ") + e.what();
    return rep;
  }
  rep.error = "implicit_step: fixed-point iteration did not converge within " +
              std::to_string(picard.max_iterations) + " iterations";
  return rep;
}

// ---------------------------------------------------------------------------
// 2D dimensional splitting
// ---------------------------------------------------------------------------

namespace {

struct AxisView {
  int line_cells;    // cells along the sweep line
  int num_lines;     // number of parallel lines
  int stride_line;   // linear-index stride along the line
  int stride_sweep;  // stride between lines
  Grid1D line_grid;
  bool is_x;
};

AxisView x_axis(const Grid2D& g) {
  return {g.x.num_cells, g.y.num_cells, 1, g.x.num_cells, g.x, true};
}
AxisView y_axis(const Grid2D& g) {
  return {g.y.num_cells, g.x.num_cells, g.x.num_cells, 1, g.y, false};
}

void gather_line(const CellField& state, const AxisView& ax, int line, CellField& out) {
  for (int p = 0; p < state.num_species(); ++p)
    for (int i = 0; i < ax.line_cells; ++i)
      out(p, i) = state(p, line * ax.stride_sweep + i * ax.stride_line);
}

void scatter_line(const CellField& line_state, const AxisView& ax, int line, CellField& state) {
  for (int p = 0; p < state.num_species(); ++p)
    for (int i = 0; i < ax.line_cells; ++i)
      state(p, line * ax.stride_sweep + i * ax.stride_line) = line_state(p, i);
}

}  // namespace

StepReport advect_step_2d(CellField& state, const Grid2D& grid, const Prescribed2D& velocity,
                          const SaturationSpec& sat, const SchemeConfig& config, double dt,
                          bool x_first) {
  const int P = state.num_species();
  auto run_axis = [&](const AxisView& ax) -> StepReport {
    CellField line(P, ax.line_cells);
    for (int l = 0; l < ax.num_lines; ++l) {
      gather_line(state, ax, l, line);
      const double cross =
          ax.is_x ? grid.y.center(l) : grid.x.center(l);
      VelocityField u(P, ax.line_cells);
      for (int p = 0; p < P; ++p)
        for (int f = 0; f <= ax.line_cells; ++f) {
          const double pos = ax.line_grid.interface(f);
          u(p, f) = ax.is_x ? velocity.ux(p, pos, cross) : velocity.uy(p, cross, pos);
        }
      StepReport rep;
      if (scheme_is_explicit(config.scheme)) {
        rep = explicit_step(line, u, sat, config, ax.line_grid, dt);
      } else {
        rep = implicit_step(line, prescribed_model(u), sat, config.picard, ax.line_grid, dt);
      }
      if (!rep.accepted) return rep;
      scatter_line(line, ax, l, state);
    }
    StepReport ok;
    ok.accepted = true;
    ok.dt_used = dt;
    return ok;
  };

  const AxisView first = x_first ? x_axis(grid) : y_axis(grid);
  const AxisView second = x_first ? y_axis(grid) : x_axis(grid);
  StepReport rep = run_axis(first);
  if (!rep.accepted) return rep;
  return run_axis(second);
}

double cfl_bound_2d(const Grid2D& grid, const Prescribed2D& velocity, const SaturationSpec& sat,
                    int num_species) {
  double bound = std::numeric_limits<double>::infinity();
  for (const AxisView& ax : {x_axis(grid), y_axis(grid)}) {
    for (int l = 0; l < ax.num_lines; ++l) {
      const double cross = ax.is_x ? grid.y.center(l) : grid.x.center(l);
      VelocityField u(num_species, ax.line_cells);
      for (int p = 0; p < num_species; ++p)
        for (int f = 0; f <= ax.line_cells; ++f) {
          const double pos = ax.line_grid.interface(f);
          u(p, f) = ax.is_x ? velocity.ux(p, pos, cross) : velocity.uy(p, cross, pos);
        }
      bound = std::min(bound, cfl_dt(sat, u, ax.line_grid.dx, ax.line_grid.boundary, num_species));
    }
  }
  return bound;
}

// ---------------------------------------------------------------------------
// GradientFlow2DStepper
// ---------------------------------------------------------------------------

struct GradientFlow2DStepper::Sweep {
  AxisView ax;
};

GradientFlow2DStepper::GradientFlow2DStepper(const Grid2D& grid, EnergySpec energy,
                                             SaturationSpec sat, PicardParams picard)
    : grid_(grid), energy_(std::move(energy)), sat_(std::move(sat)), picard_(picard) {
  if (energy_.has_kernels() &&
      (grid.x.boundary == Boundary::Periodic || grid.y.boundary == Boundary::Periodic))
    throw std::invalid_argument("2D gradient flow: interaction kernels require no-flux boundaries");
  if (energy_.W_rho) conv_rho_.emplace(energy_.W_rho, grid_);
  if (energy_.num_species == 2 && energy_.W_eta) conv_eta_.emplace(energy_.W_eta, grid_);
  if (energy_.num_species == 2 && energy_.W_sigma) {
    conv_sig_rho_.emplace(energy_.W_sigma, grid_);
    conv_sig_eta_.emplace(energy_.W_sigma, grid_);
  }
}

void GradientFlow2DStepper::rebuild_convolutions(const CellField& state) {
  if (conv_rho_) conv_rho_->rebuild(state.species(0));
  if (conv_eta_) conv_eta_->rebuild(state.species(1));
  if (conv_sig_rho_) conv_sig_rho_->rebuild(state.species(0));
  if (conv_sig_eta_) conv_sig_eta_->rebuild(state.species(1));
}

StepReport GradientFlow2DStepper::sweep(CellField& state, const Sweep& sw, double dt) {
  const AxisView& ax = sw.ax;
  const int P = energy_.num_species;
  const int m = ax.line_cells;

  EnergyAssembly1D assembly;
  assembly.num_species = P;
  assembly.H[0] = energy_.H_rho ? &energy_.H_rho : nullptr;
  assembly.H[1] = energy_.H_eta ? &energy_.H_eta : nullptr;
  assembly.H_sigma = energy_.H_sigma ? &energy_.H_sigma : nullptr;
  assembly.mobility = energy_.mobility;
  auto line_table = [&](const std::optional<Convolution2D>& c) {
    return c ? (ax.is_x ? c->row_table() : c->col_table()) : KernelTable{};
  };
  assembly.W[0] = line_table(conv_rho_);
  assembly.W[1] = line_table(conv_eta_);
  assembly.W[2] = line_table(conv_sig_rho_);

  CellField line(P, m), old_line(P, m);
  std::vector<double> inline_conv(m), delta(m);

  for (int l = 0; l < ax.num_lines; ++l) {
    gather_line(state, ax, l, line);
    old_line = line;

    // Effective per-cell potential: confinement plus the convolution
    // contribution of every cell outside this line (frozen for the solve).
    auto conv_at = [&](const std::optional<Convolution2D>& c, int i) {
      return ax.is_x ? c->at(i, l) : c->at(l, i);
    };
    for (int p = 0; p < P; ++p) {
      assembly.ext[p].assign(m, 0.0);
      const auto& V = p == 0 ? energy_.V_rho : energy_.V_eta;
      if (V)
        for (int i = 0; i < m; ++i) {
          const double xpos = ax.is_x ? ax.line_grid.center(i) : grid_.x.center(l);
          const double ypos = ax.is_x ? grid_.y.center(l) : ax.line_grid.center(i);
          assembly.ext[p][i] = V(xpos, ypos);
        }
      const std::optional<Convolution2D>* own = p == 0 ? &conv_rho_ : &conv_eta_;
      const std::optional<Convolution2D>* cross = p == 0 ? &conv_sig_eta_ : &conv_sig_rho_;
      if (*own) {
        convolve(line_table(*own), old_line.species(p), inline_conv);
        for (int i = 0; i < m; ++i)
          assembly.ext[p][i] += conv_at(*own, i) - inline_conv[i];
      }
      if (*cross) {
        convolve(line_table(*cross), old_line.species(1 - p), inline_conv);
        for (int i = 0; i < m; ++i)
          assembly.ext[p][i] += conv_at(*cross, i) - inline_conv[i];
      }
    }

    StepReport rep = implicit_step(line, gradient_flow_model(assembly, old_line, ax.line_grid),
                                   sat_, picard_, ax.line_grid, dt);
    if (!rep.accepted) return rep;
    scatter_line(line, ax, l, state);

    auto apply_delta = [&](std::optional<Convolution2D>& c, int p) {
      if (!c) return;
      for (int i = 0; i < m; ++i) delta[i] = line(p, i) - old_line(p, i);
      if (ax.is_x)
        c->apply_row_delta(l, delta);
      else
        c->apply_col_delta(l, delta);
    };
    apply_delta(conv_rho_, 0);
    apply_delta(conv_sig_rho_, 0);
    apply_delta(conv_eta_, 1);
    apply_delta(conv_sig_eta_, 1);
  }
  StepReport ok;
  ok.accepted = true;
  ok.dt_used = dt;
  return ok;
}

StepReport GradientFlow2DStepper::step(CellField& state, double dt, bool x_first) {
  const Sweep first{x_first ? x_axis(grid_) : y_axis(grid_)};
  const Sweep second{x_first ? y_axis(grid_) : x_axis(grid_)};
  StepReport rep = sweep(state, first, dt);
  if (!rep.accepted) return rep;
  rep = sweep(state, second, dt);
  rep.dt_used = dt;
  return rep;
}

double GradientFlow2DStepper::energy(const CellField& state) const {
  const int nx = grid_.x.num_cells, ny = grid_.y.num_cells;
  double e = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int c = grid_.index(i, j);
      if (energy_.H_rho) e += energy_.H_rho.value(state(0, c));
      if (energy_.num_species == 2 && energy_.H_eta) e += energy_.H_eta.value(state(1, c));
      if (energy_.H_sigma) e += energy_.H_sigma.value(state.sigma(c));
      const double x = grid_.x.center(i), y = grid_.y.center(j);
      if (energy_.V_rho) e += energy_.V_rho(x, y) * state(0, c);
      if (energy_.num_species == 2 && energy_.V_eta) e += energy_.V_eta(x, y) * state(1, c);
      if (conv_rho_) e += 0.5 * state(0, c) * conv_rho_->at(i, j);
      if (conv_eta_) e += 0.5 * state(1, c) * conv_eta_->at(i, j);
      if (conv_sig_eta_) e += state(0, c) * conv_sig_eta_->at(i, j);
    }
  return e * grid_.cell_area();
}

}  // namespace satflow
