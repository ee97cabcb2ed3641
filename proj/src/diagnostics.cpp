#include "satflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace satflow {

namespace {

Norms accumulate_norms(const std::function<double(int p, int c)>& diff, int P, int cells,
                       double measure) {
  Norms n;
  double sum1 = 0.0, sum2 = 0.0;
  for (int p = 0; p < P; ++p)
    for (int c = 0; c < cells; ++c) {
      const double d = std::abs(diff(p, c));
      sum1 += d;
      sum2 += d * d;
      n.linf = std::max(n.linf, d);
    }
  n.l1 = sum1 * measure;
  n.l2 = std::sqrt(sum2 * measure);
  return n;
}

}  // namespace

Norms error_norms(const CellField& numerical, const ReferenceFn& reference, double t,
                  const Grid1D& grid) {
  return accumulate_norms(
      [&](int p, int i) { return numerical(p, i) - reference(p, t, grid.center(i), 0.0); },
      numerical.num_species(), grid.num_cells, grid.dx);
}

Norms error_norms_2d(const CellField& numerical, const ReferenceFn& reference, double t,
                     const Grid2D& grid) {
  const int nx = grid.x.num_cells;
  return accumulate_norms(
      [&](int p, int c) {
        const int i = c % nx, j = c / nx;
        return numerical(p, c) - reference(p, t, grid.x.center(i), grid.y.center(j));
      },
      numerical.num_species(), grid.num_cells(), grid.cell_area());
}

double kink_steady_state(const KinkParams& p, double l, double radius) {
  const double excess = std::max(radius * radius - l * l, 0.0);
  return p.alpha * std::exp(-0.5 * p.C / p.D * excess);
}

double mass_of_l(const KinkParams& p, double l, int dimension) {
  if (l < 0.0) throw std::invalid_argument("mass_of_l: l must be non-negative");
  if (dimension == 1) {
    // M = alpha [ l + sqrt(pi D / 2C) e^{C l^2 / 2D} erfc(l sqrt(C/2D)) ]
    const double z = l * std::sqrt(0.5 * p.C / p.D);
    return p.alpha * (l + std::sqrt(0.5 * M_PI * p.D / p.C) * std::exp(z * z) * std::erfc(z));
  }
  if (dimension == 2) return 0.5 * p.alpha * M_PI * (0.5 * l * l + p.D / p.C);
  throw std::invalid_argument("mass_of_l: dimension must be 1 or 2");
}

double solve_l_from_mass(const KinkParams& p, double mass, int dimension, bool* subcritical) {
  const double critical = mass_of_l(p, 0.0, dimension);
  if (subcritical) *subcritical = mass <= critical;
  if (mass <= critical) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (mass_of_l(p, hi, dimension) < mass) hi *= 2.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (mass_of_l(p, mid, dimension) < mass ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double overlap_integral(std::span<const double> rho, std::span<const double> eta,
                        double cell_measure) {
  double s = 0.0;
  for (size_t i = 0; i < rho.size(); ++i) s += std::min(rho[i], eta[i]);
  return s * cell_measure;
}

void ConvergenceTable::compute_orders() {
  observed_l1_orders.clear();
  observed_l2_orders.clear();
  observed_linf_orders.clear();
  for (size_t k = 0; k + 1 < rows.size(); ++k) {
    observed_l1_orders.push_back(std::log2(rows[k].error.l1 / rows[k + 1].error.l1));
    observed_l2_orders.push_back(std::log2(rows[k].error.l2 / rows[k + 1].error.l2));
    observed_linf_orders.push_back(std::log2(rows[k].error.linf / rows[k + 1].error.linf));
  }
}

}  // namespace satflow
