#include "satflow/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace satflow {

Grid1D make_grid(double x_min, double x_max, int num_cells, Boundary boundary) {
  if (num_cells <= 0) throw std::invalid_argument("make_grid: num_cells must be positive");
  if (!(x_max > x_min)) throw std::invalid_argument("make_grid: empty domain");
  Grid1D g;
  g.num_cells = num_cells;
  g.dx = (x_max - x_min) / num_cells;
  g.origin = x_min;
  g.boundary = boundary;
  return g;
}

bool CellField::all_finite() const {
  for (double x : v_)
    if (!std::isfinite(x)) return false;
  return true;
}

double CellField::min_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (double x : v_) m = std::min(m, x);
  return m;
}

double CellField::max_value() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v_) m = std::max(m, x);
  return m;
}

double CellField::max_sigma() const {
  double m = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < cells_; ++i) m = std::max(m, sigma(i));
  return m;
}

std::vector<double> CellField::masses(double cell_measure) const {
  std::vector<double> out(species_, 0.0);
  for (int p = 0; p < species_; ++p) {
    double s = 0.0;
    for (int i = 0; i < cells_; ++i) s += (*this)(p, i);
    out[p] = s * cell_measure;
  }
  return out;
}

namespace {

constexpr int kAxiomSamples = 1024;
constexpr int kGammaSamples = 4096;

void validate_saturation_axioms(const std::function<double(double)>& psi, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("saturation: alpha must be positive and finite");
  const double psi0 = psi(0.0);
  if (!(psi0 > 0.0)) throw std::invalid_argument("saturation: psi(0) must be positive");
  const double scale = std::max(1.0, psi0);
  if (std::abs(psi(alpha)) > 1e-10 * scale)
    throw std::invalid_argument("saturation: psi(alpha) must vanish");
  double prev = psi0;
  for (int k = 1; k <= kAxiomSamples; ++k) {
    const double s = alpha * k / kAxiomSamples;
    const double v = psi(s);
    if (!std::isfinite(v)) throw std::invalid_argument("saturation: psi not finite on [0, alpha]");
    if (v > prev + 1e-13 * scale)
      throw std::invalid_argument("saturation: psi must be non-increasing on [0, alpha]");
    if (k < kAxiomSamples && !(v > 0.0))
      throw std::invalid_argument("saturation: (alpha - s) psi(s) > 0 fails on (0, alpha)");
    prev = v;
  }
}

}  // namespace

double compute_gamma(const std::function<double(double)>& psi, double alpha) {
  // Vanishing exponent p of psi(alpha - h) ~ C h^p; p < 1 means the CFL
  // quantity (alpha-s)/(alpha psi) tends to zero at saturation.
  const double h1 = alpha * 1e-4, h2 = alpha * 1e-5;
  const double p1 = psi(alpha - h1), p2 = psi(alpha - h2);
  if (!(p1 > 0.0) || !(p2 > 0.0))
    throw std::domain_error("compute_gamma: psi not positive just below alpha");
  const double p_exponent = std::log(p1 / p2) / std::log(h1 / h2);
  if (p_exponent < 0.99)
    throw std::domain_error(
        "compute_gamma: psi vanishes sublinearly at alpha; the CFL constant gamma is zero");

  double g = std::numeric_limits<double>::infinity();
  for (int k = 0; k < kGammaSamples; ++k) {
    const double s = alpha * k / kGammaSamples;
    const double v = psi(s);
    if (v > 0.0) g = std::min(g, (alpha - s) / (alpha * v));
  }
  // One-sided difference estimate of the s -> alpha limit 1/(-alpha psi'(alpha)).
  const double h = alpha * 1e-6;
  const double dpsi = (psi(alpha - h) - psi(alpha)) / h;
  if (dpsi > 0.0) g = std::min(g, 1.0 / (alpha * dpsi));
  if (!(g > 1e-12))
    throw std::domain_error("compute_gamma: sampled CFL quantity is not bounded away from zero");
  return g;
}

SaturationSpec SaturationSpec::none() { return SaturationSpec{}; }

SaturationSpec SaturationSpec::create(std::function<double(double)> psi, double alpha) {
  validate_saturation_axioms(psi, alpha);
  SaturationSpec s;
  s.gamma_ = compute_gamma(psi, alpha);
  s.psi_ = std::move(psi);
  s.alpha_ = alpha;
  s.psi_zero_ = s.psi_(0.0);
  s.bounded_ = true;
  return s;
}

SaturationSpec SaturationSpec::create_with_gamma(std::function<double(double)> psi, double alpha,
                                                 double gamma) {
  validate_saturation_axioms(psi, alpha);
  if (!(gamma > 0.0)) throw std::invalid_argument("saturation: gamma must be positive");
  SaturationSpec s;
  s.psi_ = std::move(psi);
  s.alpha_ = alpha;
  s.psi_zero_ = s.psi_(0.0);
  s.gamma_ = gamma;
  s.bounded_ = true;
  return s;
}

bool scheme_is_explicit(Scheme s) {
  return s == Scheme::ExplicitScalar || s == Scheme::ExplicitSystem;
}

bool scheme_is_gradient_flow(Scheme s) {
  return s == Scheme::GradientFlowScalar || s == Scheme::GradientFlowSystem;
}

bool scheme_is_scalar(Scheme s) {
  return s == Scheme::ExplicitScalar || s == Scheme::ImplicitScalar ||
         s == Scheme::GradientFlowScalar;
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::ExplicitScalar: return "explicit-scalar";
    case Scheme::ImplicitScalar: return "implicit-scalar";
    case Scheme::ExplicitSystem: return "explicit-system";
    case Scheme::ImplicitSystem: return "implicit-system";
    case Scheme::GradientFlowScalar: return "gradient-flow-scalar";
    case Scheme::GradientFlowSystem: return "gradient-flow-system";
  }
  return "?";
}

Scheme scheme_from_name(const std::string& name) {
  for (Scheme s : {Scheme::ExplicitScalar, Scheme::ImplicitScalar, Scheme::ExplicitSystem,
                   Scheme::ImplicitSystem, Scheme::GradientFlowScalar, Scheme::GradientFlowSystem})
    if (scheme_name(s) == name) return s;
  throw std::invalid_argument("unknown scheme: " + name);
}

}  // namespace satflow
