#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace satflow {

enum class Boundary { NoFlux, Periodic };

// Uniform 1D grid of cells C_i = (x_{i-1/2}, x_{i+1/2}), i = 0..num_cells-1.
struct Grid1D {
  int num_cells = 0;
  double dx = 0.0;
  double origin = 0.0;
  Boundary boundary = Boundary::NoFlux;

  double center(int i) const { return origin + dx * (i + 0.5); }
  double interface(int f) const { return origin + dx * f; }  // f = 0..num_cells
  double length() const { return dx * num_cells; }
};

Grid1D make_grid(double x_min, double x_max, int num_cells, Boundary boundary);

// Tensor product of two 1D grids; cell (i,j) has center (x_i, y_j) and
// linear index j*nx + i.
struct Grid2D {
  Grid1D x;
  Grid1D y;

  int num_cells() const { return x.num_cells * y.num_cells; }
  int index(int i, int j) const { return j * x.num_cells + i; }
  double cell_area() const { return x.dx * y.dx; }
};

// Per-species cell averages. Species p occupies a contiguous block of
// num_cells values; for 2D grids the cell index is Grid2D::index(i,j).
class CellField {
 public:
  CellField() = default;
  CellField(int num_species, int num_cells, double value = 0.0)
      : species_(num_species), cells_(num_cells),
        v_(static_cast<size_t>(num_species) * num_cells, value) {}

  int num_species() const { return species_; }
  int num_cells() const { return cells_; }

  double& operator()(int p, int i) { return v_[static_cast<size_t>(p) * cells_ + i]; }
  double operator()(int p, int i) const { return v_[static_cast<size_t>(p) * cells_ + i]; }

  std::span<double> species(int p) { return {v_.data() + static_cast<size_t>(p) * cells_, static_cast<size_t>(cells_)}; }
  std::span<const double> species(int p) const { return {v_.data() + static_cast<size_t>(p) * cells_, static_cast<size_t>(cells_)}; }

  double sigma(int i) const {
    double s = 0.0;
    for (int p = 0; p < species_; ++p) s += (*this)(p, i);
    return s;
  }

  bool all_finite() const;
  double min_value() const;
  double max_value() const;
  double max_sigma() const;
  // Per-species total mass, i.e. sum of cell averages times the cell measure.
  std::vector<double> masses(double cell_measure) const;

 private:
  int species_ = 0;
  int cells_ = 0;
  std::vector<double> v_;
};

// Mobility factor psi(s): non-increasing, psi(alpha) = 0, (alpha-s) psi(s) > 0
// for s != alpha. SaturationSpec::none() is the trivial factor psi == 1 used
// by the unsaturated models; it carries alpha = gamma = +inf so the CFL and
// bound machinery degenerate to the classical forms.
class SaturationSpec {
 public:
  static SaturationSpec none();
  // Validates the saturation axioms by sampling and estimates gamma
  // numerically (throws std::invalid_argument / std::domain_error).
  static SaturationSpec create(std::function<double(double)> psi, double alpha);
  // As create(), but trusts a closed-form gamma supplied by the caller.
  static SaturationSpec create_with_gamma(std::function<double(double)> psi, double alpha, double gamma);

  double psi(double s) const { return bounded_ ? psi_(s) : 1.0; }
  double psi_positive(double s) const { return std::max(psi(s), 0.0); }
  double alpha() const { return alpha_; }
  double psi_zero() const { return psi_zero_; }
  double gamma() const { return gamma_; }
  bool bounded() const { return bounded_; }

 private:
  std::function<double(double)> psi_;
  double alpha_ = std::numeric_limits<double>::infinity();
  double psi_zero_ = 1.0;
  double gamma_ = std::numeric_limits<double>::infinity();
  bool bounded_ = false;
};

// Lower estimate of inf_{s in [0,alpha)} (alpha-s)/(alpha psi(s)) by dense
// sampling plus a one-sided difference estimate of the s -> alpha limit.
// Throws std::domain_error when psi vanishes sublinearly at alpha (the
// infimum is zero and no usable CFL constant exists).
double compute_gamma(const std::function<double(double)>& psi, double alpha);

enum class Scheme {
  ExplicitScalar,
  ImplicitScalar,
  ExplicitSystem,
  ImplicitSystem,
  GradientFlowScalar,
  GradientFlowSystem,
};

bool scheme_is_explicit(Scheme s);
bool scheme_is_gradient_flow(Scheme s);
bool scheme_is_scalar(Scheme s);
std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct DtPolicy {
  enum class Kind { FixedDt, CflDriven };
  Kind kind = Kind::FixedDt;
  double value = 0.0;  // dt for FixedDt, safety factor in (0,1] for CflDriven

  static DtPolicy fixed(double dt) { return {Kind::FixedDt, dt}; }
  static DtPolicy cfl(double safety = 0.9) { return {Kind::CflDriven, safety}; }
};

struct PicardParams {
  double tolerance = 1e-10;  // l-inf norm of the last update
  int max_iterations = 200;
  double damping = 1.0;  // automatic 0.5 after a residual increase
};

struct SchemeConfig {
  Scheme scheme = Scheme::GradientFlowScalar;
  double theta = 2.0;  // limiter parameter in [0,2]
  DtPolicy dt_policy = DtPolicy::fixed(0.0);
  PicardParams picard;
};

}  // namespace satflow
