#pragma once

#include <array>
#include <functional>

#include "satflow/core.hpp"
#include "satflow/fluxes.hpp"

namespace satflow {

// Convex internal energy density together with its derivatives. The second
// derivative feeds the implicit solver's entropy linearization; when absent
// it falls back to a central difference of the first derivative.
struct ScalarFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::function<double(double)> second_derivative;
  explicit operator bool() const { return static_cast<bool>(derivative); }
  double curvature(double x) const;
};

// D(r log r - r). The derivative is evaluated at max(r, 1e-300): the flux
// multiplies by r, so r H'(r) extends continuously by zero at vacuum.
ScalarFunction log_entropy(double diffusivity = 1.0);
// c s^2 / 2.
ScalarFunction quadratic_entropy(double c);

// Factored mobility M(rho) = diag(rho) R(rho); R is a row-major 2x2 for the
// two-species flows. The scalar flow always uses S = 1.
using PairMobility = std::function<std::array<double, 4>(double rho, double eta)>;

struct EnergySpec {
  int num_species = 1;
  ScalarFunction H_rho, H_eta, H_sigma;
  std::function<double(double, double)> V_rho, V_eta;          // position (x,y)
  std::function<double(double, double)> W_rho, W_eta, W_sigma;  // displacement (dx,dy)
  PairMobility mobility;  // null = identity factor

  bool has_kernels() const {
    return static_cast<bool>(W_rho) || static_cast<bool>(W_eta) || static_cast<bool>(W_sigma);
  }
};

// Sampling checks: kernels symmetric under x -> -x, mobility M = diag(rho) R
// positive semi-definite at admissible states. Throws on violation.
void validate_energy_spec(const EnergySpec& spec, double alpha, unsigned seed = 20240901);

// Displacement table w[i-k] = weight * W((i-k) step) for cells on one line;
// the quadrature weight (dx, or the cell area for 2D sweeps) is folded in.
class KernelTable {
 public:
  KernelTable() = default;
  static KernelTable build(const std::function<double(double)>& kernel, int num_cells,
                           double step, double weight);
  double at(int i, int k) const { return w_[i - k + m_ - 1]; }
  int cells() const { return m_; }
  bool empty() const { return m_ == 0; }

 private:
  std::vector<double> w_;
  int m_ = 0;
};

// out_i = sum_k w[i-k] v_k. Parallel over cells.
void convolve(const KernelTable& table, std::span<const double> v, std::span<double> out);

// (W * v)_i = sum_k W(x_i - x_k) v_k dx via a precomputed displacement table.
std::vector<double> discrete_convolution(const std::function<double(double)>& kernel,
                                         std::span<const double> values, const Grid1D& grid);

// Maintains C = W * field (cell-area weighted direct sum) on a 2D grid under
// row/column replacements, so sweep solves see every other cell's
// contribution at Gauss-Seidel freshness without O(n^2) reassembly.
class Convolution2D {
 public:
  Convolution2D() = default;
  Convolution2D(const std::function<double(double, double)>& kernel, const Grid2D& grid);

  void rebuild(std::span<const double> field);
  // Field row j (resp. column i) changed by delta; update C everywhere.
  void apply_row_delta(int j, std::span<const double> delta);
  void apply_col_delta(int i, std::span<const double> delta);

  double at(int i, int j) const { return c_[static_cast<size_t>(j) * nx_ + i]; }
  std::span<const double> values() const { return c_; }
  const KernelTable& row_table() const { return row_table_; }
  const KernelTable& col_table() const { return col_table_; }

 private:
  double table(int di, int dj) const {
    return w_[static_cast<size_t>(dj + ny_ - 1) * (2 * nx_ - 1) + (di + nx_ - 1)];
  }
  int nx_ = 0, ny_ = 0;
  std::vector<double> w_;  // (2nx-1) x (2ny-1) displacement table, area-weighted
  std::vector<double> c_;
  KernelTable row_table_, col_table_;
};

// Everything the 1D (or per-sweep) entropy assembly needs: per-cell effective
// confinement ext (which absorbs frozen cross-row convolution contributions
// during 2D sweeps) plus the in-line kernel tables.
struct EnergyAssembly1D {
  int num_species = 1;
  const ScalarFunction* H[2] = {nullptr, nullptr};
  const ScalarFunction* H_sigma = nullptr;
  std::vector<double> ext[2];
  KernelTable W[3];  // W_rho, W_eta, W_sigma; empty = absent
  PairMobility mobility;
};

EnergyAssembly1D assemble_energy_1d(const EnergySpec& spec, const Grid1D& grid);

using EntropyVariables = CellField;

// xi_{rho,i} = H_rho'(rho_i) + Hsigma'(sigma_i) + ext_i + (W_rho * rho**)_i
//            + (Wsigma * eta**)_i, with rho** = (next + prev)/2.
// Throws std::domain_error if any entropy variable is not finite.
EntropyVariables entropy_variables(const CellField& next, const CellField& prev,
                                   const EnergyAssembly1D& assembly);

EntropyVariables entropy_variables_scalar(const CellField& next, const CellField& prev,
                                          const EnergySpec& spec, const Grid1D& grid);
EntropyVariables entropy_variables_system(const CellField& next, const CellField& prev,
                                          const EnergySpec& spec, const Grid1D& grid);

// S_{i+1/2} = (R(rho_i) + R(rho_{i+1}))/2 per interface, PxP row-major.
// Empty when the factor is the identity (scalar flows, default mobility).
std::vector<double> interface_mobility(const CellField& rho, const EnergyAssembly1D& assembly,
                                       const Grid1D& grid);

// u_{i+1/2} = -S_{i+1/2} (xi_{i+1} - xi_i)/dx; S = 1 in the scalar case.
VelocityField interface_velocity(const EntropyVariables& xi, const CellField& rho,
                                 const EnergyAssembly1D& assembly, const Grid1D& grid);

// Per-cell Hessian of the local entropy part of xi (H_p'' on the diagonal
// plus H_sigma'' everywhere), PxP row-major; empty when no entropies.
std::vector<double> entropy_hessian(const CellField& rho, const EnergyAssembly1D& assembly);

// E = sum_i H dx + sum_i ext rho dx + (1/2) sum_ik W_{i-k} rho_i rho_k dx^2
// (system version includes the cross kernel with its factor-2 pairing).
double discrete_energy(const CellField& rho, const EnergyAssembly1D& assembly,
                       double cell_measure);
double discrete_energy(const CellField& rho, const EnergySpec& spec, const Grid1D& grid);
double discrete_energy_2d(const CellField& rho, const EnergySpec& spec, const Grid2D& grid);

}  // namespace satflow
