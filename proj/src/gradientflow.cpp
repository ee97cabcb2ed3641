#include "satflow/gradientflow.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace satflow {

namespace {
constexpr double kVacuumFloor = 1e-300;
// Curvature cap for singular entropies: keeps the linearized diffusion
// coefficients representable; cells this close to vacuum barely move anyway.
constexpr double kCurvatureFloor = 1e-12;
}

double ScalarFunction::curvature(double x) const {
  if (second_derivative) return second_derivative(x);
  const double h = 1e-6 * std::max(std::abs(x), 1e-6);
  return (derivative(x + h) - derivative(x - h)) / (2.0 * h);
}

ScalarFunction log_entropy(double diffusivity) {
  const double d = diffusivity;
  return {
      [d](double r) {
        const double rc = std::max(r, kVacuumFloor);
        return d * (r * std::log(rc) - r);
      },
      [d](double r) { return d * std::log(std::max(r, kVacuumFloor)); },
      [d](double r) { return d / std::max(r, kCurvatureFloor); },
  };
}

ScalarFunction quadratic_entropy(double c) {
  return {
      [c](double s) { return 0.5 * c * s * s; },
      [c](double s) { return c * s; },
      [c](double) { return c; },
  };
}

void validate_energy_spec(const EnergySpec& spec, double alpha, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> disp(-4.0, 4.0);
  auto check_symmetric = [&](const std::function<double(double, double)>& w, const char* name) {
    if (!w) return;
    for (int k = 0; k < 64; ++k) {
      const double dx = disp(rng), dy = disp(rng);
      const double a = w(dx, dy), b = w(-dx, -dy);
      if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
        throw std::invalid_argument(std::string("energy spec: kernel ") + name +
                                    " is not symmetric");
    }
  };
  check_symmetric(spec.W_rho, "W_rho");
  check_symmetric(spec.W_eta, "W_eta");
  check_symmetric(spec.W_sigma, "W_sigma");

  if (spec.num_species == 2 && spec.mobility) {
    const double cap = std::isfinite(alpha) ? alpha : 1.0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 256; ++k) {
      double r = unit(rng), e = unit(rng);
      const double s = r + e;
      if (s > cap) {
        r *= cap / s;
        e *= cap / s;
      }
      const auto R = spec.mobility(r, e);
      // M = diag(rho) R; positive semi-definiteness of the symmetric part.
      const double m00 = r * R[0], m01 = r * R[1], m10 = e * R[2], m11 = e * R[3];
      const double off = 0.5 * (m01 + m10);
      if (m00 < -1e-12 || m11 < -1e-12 || m00 * m11 - off * off < -1e-10)
        throw std::invalid_argument("energy spec: diag(rho) R(rho) is not positive semi-definite");
    }
  }
}

KernelTable KernelTable::build(const std::function<double(double)>& kernel, int num_cells,
                               double step, double weight) {
  KernelTable t;
  t.m_ = num_cells;
  t.w_.resize(2 * num_cells - 1);
  for (int d = -(num_cells - 1); d <= num_cells - 1; ++d)
    t.w_[d + num_cells - 1] = weight * kernel(d * step);
  return t;
}

void convolve(const KernelTable& table, std::span<const double> v, std::span<double> out) {
  const int m = table.cells();
#pragma omp parallel for schedule(static) if (m > 256)
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += table.at(i, k) * v[k];
    out[i] = s;
  }
}

std::vector<double> discrete_convolution(const std::function<double(double)>& kernel,
                                         std::span<const double> values, const Grid1D& grid) {
  const auto table = KernelTable::build(kernel, grid.num_cells, grid.dx, grid.dx);
  std::vector<double> out(grid.num_cells);
  convolve(table, values, out);
  return out;
}

Convolution2D::Convolution2D(const std::function<double(double, double)>& kernel,
                             const Grid2D& grid) {
  nx_ = grid.x.num_cells;
  ny_ = grid.y.num_cells;
  const double area = grid.cell_area();
  w_.resize(static_cast<size_t>(2 * nx_ - 1) * (2 * ny_ - 1));
  for (int dj = -(ny_ - 1); dj <= ny_ - 1; ++dj)
    for (int di = -(nx_ - 1); di <= nx_ - 1; ++di)
      w_[static_cast<size_t>(dj + ny_ - 1) * (2 * nx_ - 1) + (di + nx_ - 1)] =
          area * kernel(di * grid.x.dx, dj * grid.y.dx);
  c_.assign(static_cast<size_t>(nx_) * ny_, 0.0);
  row_table_ = KernelTable::build([&kernel](double d) { return kernel(d, 0.0); }, nx_, grid.x.dx,
                                  area);
  col_table_ = KernelTable::build([&kernel](double d) { return kernel(0.0, d); }, ny_, grid.y.dx,
                                  area);
}

void Convolution2D::rebuild(std::span<const double> field) {
  const int nx = nx_, ny = ny_;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      double s = 0.0;
      for (int l = 0; l < ny; ++l) {
        const double* frow = field.data() + static_cast<size_t>(l) * nx;
        const double* wrow = w_.data() + static_cast<size_t>(j - l + ny - 1) * (2 * nx - 1) +
                             (i + nx - 1);
        for (int k = 0; k < nx; ++k) s += wrow[-k] * frow[k];
      }
      c_[static_cast<size_t>(j) * nx + i] = s;
    }
  }
}

void Convolution2D::apply_row_delta(int j, std::span<const double> delta) {
  const int nx = nx_, ny = ny_;
#pragma omp parallel for schedule(static)
  for (int l = 0; l < ny; ++l) {
    const double* wrow = w_.data() + static_cast<size_t>(l - j + ny - 1) * (2 * nx - 1);
    double* crow = c_.data() + static_cast<size_t>(l) * nx;
    for (int i = 0; i < nx; ++i) {
      double s = 0.0;
      const double* wi = wrow + (i + nx - 1);
      for (int k = 0; k < nx; ++k) s += wi[-k] * delta[k];
      crow[i] += s;
    }
  }
}

void Convolution2D::apply_col_delta(int i, std::span<const double> delta) {
  const int nx = nx_, ny = ny_;
#pragma omp parallel for schedule(static)
  for (int l = 0; l < ny; ++l) {
    double* crow = c_.data() + static_cast<size_t>(l) * nx;
    for (int k = 0; k < nx; ++k) {
      const double* wrow = w_.data() + static_cast<size_t>(l - k + ny - 1) * (2 * nx - 1);
      const double dk = delta[k];
      if (dk == 0.0) continue;
      for (int ii = 0; ii < nx; ++ii) crow[ii] += wrow[ii - i + nx - 1] * dk;
    }
  }
}

EnergyAssembly1D assemble_energy_1d(const EnergySpec& spec, const Grid1D& grid) {
  EnergyAssembly1D a;
  a.num_species = spec.num_species;
  a.H[0] = spec.H_rho ? &spec.H_rho : nullptr;
  a.H[1] = spec.H_eta ? &spec.H_eta : nullptr;
  a.H_sigma = spec.H_sigma ? &spec.H_sigma : nullptr;
  a.mobility = spec.mobility;

  const int m = grid.num_cells;
  const std::function<double(double, double)>* V[2] = {&spec.V_rho, &spec.V_eta};
  for (int p = 0; p < spec.num_species; ++p) {
    a.ext[p].assign(m, 0.0);
    if (*V[p])
      for (int i = 0; i < m; ++i) a.ext[p][i] = (*V[p])(grid.center(i), 0.0);
  }
  const std::function<double(double, double)>* W[3] = {&spec.W_rho, &spec.W_eta, &spec.W_sigma};
  for (int w = 0; w < 3; ++w)
    if (*W[w]) {
      const auto& fn = *W[w];
      a.W[w] =
          KernelTable::build([&fn](double d) { return fn(d, 0.0); }, m, grid.dx, grid.dx);
    }
  return a;
}

EntropyVariables entropy_variables(const CellField& next, const CellField& prev,
                                   const EnergyAssembly1D& a) {
  const int P = next.num_species();
  const int m = next.num_cells();
  if (P > 2)
    throw std::invalid_argument("entropy_variables: gradient flows support at most two species");
  EntropyVariables xi(P, m);

  // rho** = (next + prev)/2 feeds the convolution terms only.
  std::vector<double> star[2], conv[3];
  for (int p = 0; p < P; ++p) {
    star[p].resize(m);
    for (int i = 0; i < m; ++i) star[p][i] = 0.5 * (next(p, i) + prev(p, i));
  }
  // conv[0] = W_rho * rho**, conv[1] = W_eta * eta**, conv[2] = W_sigma * other**
  if (!a.W[0].empty()) {
    conv[0].resize(m);
    convolve(a.W[0], star[0], conv[0]);
  }
  if (P == 2 && !a.W[1].empty()) {
    conv[1].resize(m);
    convolve(a.W[1], star[1], conv[1]);
  }
  std::vector<double> conv_cross_rho, conv_cross_eta;  // W_sigma*eta**, W_sigma*rho**
  if (P == 2 && !a.W[2].empty()) {
    conv_cross_rho.resize(m);
    conv_cross_eta.resize(m);
    convolve(a.W[2], star[1], conv_cross_rho);
    convolve(a.W[2], star[0], conv_cross_eta);
  }

  for (int p = 0; p < P; ++p) {
    for (int i = 0; i < m; ++i) {
      double v = a.ext[p].empty() ? 0.0 : a.ext[p][i];
      if (a.H[p]) v += a.H[p]->derivative(next(p, i));
      if (a.H_sigma) v += a.H_sigma->derivative(next.sigma(i));
      if (!conv[p].empty()) v += conv[p][i];
      if (p == 0 && !conv_cross_rho.empty()) v += conv_cross_rho[i];
      if (p == 1 && !conv_cross_eta.empty()) v += conv_cross_eta[i];
      if (!std::isfinite(v))
        throw std::domain_error("entropy_variables: non-finite entropy variable");
      xi(p, i) = v;
    }
  }
  return xi;
}

namespace {

EnergyAssembly1D assembly_for(const EnergySpec& spec, const Grid1D& grid) {
  return assemble_energy_1d(spec, grid);
}

}  // namespace

EntropyVariables entropy_variables_scalar(const CellField& next, const CellField& prev,
                                          const EnergySpec& spec, const Grid1D& grid) {
  return entropy_variables(next, prev, assembly_for(spec, grid));
}

EntropyVariables entropy_variables_system(const CellField& next, const CellField& prev,
                                          const EnergySpec& spec, const Grid1D& grid) {
  return entropy_variables(next, prev, assembly_for(spec, grid));
}

std::vector<double> interface_mobility(const CellField& rho, const EnergyAssembly1D& a,
                                       const Grid1D& grid) {
  const int P = rho.num_species();
  if (P == 1 || !a.mobility) return {};
  const int m = grid.num_cells;
  std::vector<double> S(static_cast<size_t>(m + 1) * 4, 0.0);
  auto fill = [&](int f, int i, int k) {
    const auto Ri = a.mobility(rho(0, i), rho(1, i));
    const auto Rk = a.mobility(rho(0, k), rho(1, k));
    for (int q = 0; q < 4; ++q) S[static_cast<size_t>(f) * 4 + q] = 0.5 * (Ri[q] + Rk[q]);
  };
  for (int f = 1; f < m; ++f) fill(f, f - 1, f);
  if (grid.boundary == Boundary::Periodic) {
    fill(m, m - 1, 0);
    for (int q = 0; q < 4; ++q) S[q] = S[static_cast<size_t>(m) * 4 + q];
  }
  return S;
}

VelocityField interface_velocity(const EntropyVariables& xi, const CellField& rho,
                                 const EnergyAssembly1D& a, const Grid1D& grid) {
  const int P = xi.num_species();
  const int m = grid.num_cells;
  const std::vector<double> S = interface_mobility(rho, a, grid);
  VelocityField u(P, m);
  u.provenance = VelocityField::Provenance::FromEntropyVariables;

  auto fill = [&](int f, int i, int k) {  // interface f between cells i and k
    if (P == 1) {
      u(0, f) = -(xi(0, k) - xi(0, i)) / grid.dx;
      return;
    }
    const double d0 = (xi(0, k) - xi(0, i)) / grid.dx;
    const double d1 = (xi(1, k) - xi(1, i)) / grid.dx;
    if (S.empty()) {
      u(0, f) = -d0;
      u(1, f) = -d1;
    } else {
      const double* s = &S[static_cast<size_t>(f) * 4];
      u(0, f) = -(s[0] * d0 + s[1] * d1);
      u(1, f) = -(s[2] * d0 + s[3] * d1);
    }
  };

  for (int f = 1; f < m; ++f) fill(f, f - 1, f);
  if (grid.boundary == Boundary::Periodic) {
    fill(m, m - 1, 0);
    for (int p = 0; p < P; ++p) u(p, 0) = u(p, m);
  }
  return u;
}

std::vector<double> entropy_hessian(const CellField& rho, const EnergyAssembly1D& a) {
  const int P = rho.num_species();
  const int m = rho.num_cells();
  const bool any = a.H[0] || (P == 2 && a.H[1]) || a.H_sigma;
  if (!any) return {};
  std::vector<double> J(static_cast<size_t>(m) * P * P, 0.0);
  for (int i = 0; i < m; ++i) {
    double* j = &J[static_cast<size_t>(i) * P * P];
    const double hs = a.H_sigma ? a.H_sigma->curvature(rho.sigma(i)) : 0.0;
    for (int q = 0; q < P * P; ++q) j[q] = hs;
    for (int p = 0; p < P; ++p)
      if (a.H[p]) j[p * P + p] += a.H[p]->curvature(rho(p, i));
  }
  return J;
}

double discrete_energy(const CellField& rho, const EnergyAssembly1D& a, double cell_measure) {
  const int P = rho.num_species();
  const int m = rho.num_cells();
  double e = 0.0;
  for (int i = 0; i < m; ++i) {
    if (a.H[0]) e += a.H[0]->value(rho(0, i));
    if (P == 2 && a.H[1]) e += a.H[1]->value(rho(1, i));
    if (a.H_sigma) e += a.H_sigma->value(rho.sigma(i));
    for (int p = 0; p < P; ++p)
      if (!a.ext[p].empty()) e += a.ext[p][i] * rho(p, i);
  }

  std::vector<double> conv(m);
  if (!a.W[0].empty()) {
    convolve(a.W[0], rho.species(0), conv);
    for (int i = 0; i < m; ++i) e += 0.5 * rho(0, i) * conv[i];
  }
  if (P == 2 && !a.W[1].empty()) {
    convolve(a.W[1], rho.species(1), conv);
    for (int i = 0; i < m; ++i) e += 0.5 * rho(1, i) * conv[i];
  }
  if (P == 2 && !a.W[2].empty()) {
    convolve(a.W[2], rho.species(1), conv);
    for (int i = 0; i < m; ++i) e += rho(0, i) * conv[i];
  }
  return e * cell_measure;
}

double discrete_energy(const CellField& rho, const EnergySpec& spec, const Grid1D& grid) {
  return discrete_energy(rho, assemble_energy_1d(spec, grid), grid.dx);
}

double discrete_energy_2d(const CellField& rho, const EnergySpec& spec, const Grid2D& grid) {
  const int n = grid.num_cells();
  const double area = grid.cell_area();
  double e = 0.0;
  for (int j = 0; j < grid.y.num_cells; ++j)
    for (int i = 0; i < grid.x.num_cells; ++i) {
      const int c = grid.index(i, j);
      if (spec.H_rho) e += spec.H_rho.value(rho(0, c));
      if (spec.num_species == 2 && spec.H_eta) e += spec.H_eta.value(rho(1, c));
      if (spec.H_sigma) e += spec.H_sigma.value(rho.sigma(c));
      const double x = grid.x.center(i), y = grid.y.center(j);
      if (spec.V_rho) e += spec.V_rho(x, y) * rho(0, c);
      if (spec.num_species == 2 && spec.V_eta) e += spec.V_eta(x, y) * rho(1, c);
    }

  auto add_kernel = [&](const std::function<double(double, double)>& w, int pa, int pb,
                        double factor) {
    if (!w) return;
    Convolution2D conv(w, grid);
    conv.rebuild(rho.species(pb));
    for (int c = 0; c < n; ++c) e += factor * rho(pa, c) * conv.values()[c];
  };
  add_kernel(spec.W_rho, 0, 0, 0.5);
  if (spec.num_species == 2) {
    add_kernel(spec.W_eta, 1, 1, 0.5);
    add_kernel(spec.W_sigma, 0, 1, 1.0);
  }
  return e * area;
}

}  // namespace satflow
