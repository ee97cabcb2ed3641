#include "satflow/experiments.hpp"

#include <cmath>
#include <stdexcept>

namespace satflow {

namespace {

SaturationSpec linear_saturation(double alpha) {
  return SaturationSpec::create_with_gamma([alpha](double s) { return alpha - s; }, alpha, 1.0);
}

}  // namespace

double skt_exact(int species, double t, double x, double y) {
  return species == 0 ? 0.25 * (1.0 + std::sin(x + t)) : 0.25 * (1.0 + std::cos(y + t));
}

double skt_source(bool with_saturation, int species, double t, double x, double y) {
  const double sx = std::sin(t + x), cx = std::cos(t + x);
  const double sy = std::sin(t + y), cy = std::cos(t + y);
  if (!with_saturation) {
    if (species == 0)
      return cx / 4 + 3 * sx / 16 + cy / 16 - cx * cx / 8 + sx * sx / 8 + sx * cy / 8;
    return sx / 16 + 3 * cy / 16 - sy / 4 + cy * cy / 8 - sy * sy / 8 + sx * cy / 8;
  }
  if (species == 0)
    return cx / 4 + 3 * sx / 32 + cy / 32 - cx * cx / 64 + sx * sx / 64 - sx * sx * sx / 32 -
           cy * cy / 64 + sy * sy / 64 + cx * cx * sx / 16 - cy * cy * sx / 32 +
           sy * sy * sx / 64 + 3 * cx * cx * cy / 64 - sx * sx * cy / 16;
  return sx / 32 + 3 * cy / 32 - sy / 4 + cx * cx / 64 - sx * sx / 64 + cy * cy / 64 -
         cy * cy * cy / 32 - sy * sy / 64 - cy * cy * sx / 16 + 3 * sy * sy * sx / 64 +
         cx * cx * cy / 64 - sx * sx * cy / 32 + sy * sy * cy / 16;
}

ProblemSpec skt_manufactured(bool with_saturation) {
  ProblemSpec p;
  p.name = with_saturation ? "skt-saturated" : "skt";
  p.dimension = 2;
  p.num_species = 2;
  p.x_min = -M_PI;
  p.x_max = M_PI;
  p.y_min = -M_PI;
  p.y_max = M_PI;
  p.boundary = Boundary::Periodic;
  if (with_saturation) p.saturation = linear_saturation(1.0);

  EnergySpec e;
  e.num_species = 2;
  e.H_rho = log_entropy();
  e.H_eta = log_entropy();
  e.mobility = [](double r, double n) {
    return std::array<double, 4>{2 * r + n, n, r, r + 2 * n};
  };
  p.energy = std::move(e);

  p.initial = [](int species, double x, double y) { return skt_exact(species, 0.0, x, y); };
  p.source = [with_saturation](int species, double t, double x, double y) {
    return skt_source(with_saturation, species, t, x, y);
  };
  p.reference = [](int species, double t, double x, double y) {
    return skt_exact(species, t, x, y);
  };

  p.final_time = 0.1;
  p.default_scheme = Scheme::GradientFlowSystem;
  p.k_unit = M_PI;
  p.default_dx = M_PI / 32.0;                 // k = 5
  p.default_dt_ratio = 0.1 / M_PI;            // dt = 2^-k / 10
  return p;
}

ProblemSpec kink_problem(int dimension, double mass) {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("kink_problem: dimension must be 1 or 2");
  if (!(mass > 0.0)) throw std::invalid_argument("kink_problem: mass must be positive");
  ProblemSpec p;
  p.name = dimension == 1 ? "kink-1d" : "kink-2d";
  p.dimension = dimension;
  p.num_species = 1;
  p.x_min = 0.0;
  p.x_max = 4.0;
  p.y_min = 0.0;
  p.y_max = 4.0;
  p.saturation = linear_saturation(1.0);

  EnergySpec e;
  e.num_species = 1;
  e.H_rho = log_entropy(1.0);
  e.V_rho = [](double x, double y) { return 0.5 * (x * x + y * y); };
  p.energy = std::move(e);

  const double measure = dimension == 1 ? 4.0 : 16.0;
  const double level = mass / measure;
  p.initial = [level](int, double, double) { return level; };

  p.final_time = 15.0;
  p.default_scheme = Scheme::GradientFlowScalar;
  p.default_dx = dimension == 1 ? std::ldexp(1.0, -7) : std::ldexp(1.0, -5);
  p.default_dt_ratio = 1.0;
  return p;
}

ProblemSpec freeze_problem(int dimension, bool with_saturation) {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("freeze_problem: dimension must be 1 or 2");
  ProblemSpec p;
  p.name = std::string("freeze-") + (dimension == 1 ? "1d" : "2d");
  p.dimension = dimension;
  p.num_species = 2;
  p.x_min = -1.0;
  p.x_max = 1.0;
  p.y_min = -1.0;
  p.y_max = 1.0;
  if (with_saturation) p.saturation = linear_saturation(1.0);
  p.datum_may_exceed_alpha = true;
  p.has_no_saturation_variant = true;

  const double D = 0.1, C1 = 4.0, C2 = 2.0;
  EnergySpec e;
  e.num_species = 2;
  e.H_sigma = quadratic_entropy(D);
  e.V_rho = [C1](double x, double y) { return 0.5 * C1 * (x * x + y * y); };
  e.V_eta = [C2](double x, double y) { return 0.5 * C2 * (x * x + y * y); };
  p.energy = std::move(e);

  auto hump = [](double r) { return 0.8 * (1.0 - (4.0 * r / 3.0) * (4.0 * r / 3.0)); };
  if (dimension == 1) {
    const double omega = 16.0 * M_PI;
    p.initial = [hump, omega](int species, double x, double) {
      const double wave = 0.5 * std::cos(omega * x);
      return std::max(hump(x) * (species == 0 ? 1.0 - wave : 1.0 + wave), 0.0);
    };
  } else {
    const double omega = 4.0 * M_PI;
    p.initial = [hump, omega](int species, double x, double y) {
      const double wave = 0.5 * std::cos(omega * x) * std::cos(omega * y);
      const double f = hump(std::sqrt(x * x + y * y));
      return std::max(f * (species == 0 ? 1.0 - wave : 1.0 + wave), 0.0);
    };
  }

  p.final_time = 30.0;
  p.default_scheme = Scheme::GradientFlowSystem;
  p.default_dx = dimension == 1 ? std::ldexp(1.0, -8) : std::ldexp(1.0, -7);
  p.default_dt_abs = 0.1;
  return p;
}

ProblemSpec adhesion_problem(Engulfment mode, bool with_saturation) {
  ProblemSpec p;
  p.name = mode == Engulfment::Partial ? "adhesion-partial" : "adhesion-complete";
  p.dimension = 2;
  p.num_species = 2;
  p.x_min = -2.0;
  p.x_max = 2.0;
  p.y_min = -2.0;
  p.y_max = 2.0;
  if (with_saturation) p.saturation = linear_saturation(1.0);
  p.has_no_saturation_variant = true;

  // Partial engulfment: c_rr = 2c_re = 2c_er = c_ee = 1;
  // complete engulfment: 4c_rr = 2c_re = 2c_er = c_ee = 1.
  const double c_rr = mode == Engulfment::Partial ? 1.0 : 0.25;
  const double c_cross = 0.5;
  const double c_ee = 1.0;
  const double eps = 0.1;

  EnergySpec e;
  e.num_species = 2;
  e.H_sigma = quadratic_entropy(eps);
  auto quadratic_kernel = [](double c) {
    return [c](double dx, double dy) { return 0.5 * c * (dx * dx + dy * dy); };
  };
  e.W_rho = quadratic_kernel(c_rr);
  e.W_eta = quadratic_kernel(c_ee);
  e.W_sigma = quadratic_kernel(c_cross);
  p.energy = std::move(e);

  // Two printed disks; the second is internally tangent to the first, so the
  // overlap rule (overlap belongs to the larger disk) leaves eta empty.
  auto inside = [](double x, double y, double cx, double cy, double r) {
    const double dx = x - cx, dy = y - cy;
    return dx * dx + dy * dy <= r * r;
  };
  p.initial = [inside](int species, double x, double y) {
    const bool in_rho = inside(x, y, -0.5, 0.0, 0.5);
    if (species == 0) return in_rho ? 0.95 : 0.0;
    return (!in_rho && inside(x, y, -0.4, 0.0, 0.4)) ? 0.95 : 0.0;
  };

  p.final_time = 45.0;
  p.default_scheme = Scheme::GradientFlowSystem;
  p.default_dx = std::ldexp(1.0, -4);  // desk scale; the reported runs used 2^-6
  p.default_dt_ratio = 1.0;
  return p;
}

std::vector<std::string> problem_names() {
  return {"skt",       "skt-saturated",   "kink-1d",         "kink-2d",
          "freeze-1d", "freeze-2d",       "adhesion-partial", "adhesion-complete"};
}

ProblemSpec make_problem(const std::string& name, bool no_saturation) {
  ProblemSpec p;
  if (name == "skt")
    p = skt_manufactured(false);
  else if (name == "skt-saturated")
    p = skt_manufactured(true);
  else if (name == "kink-1d")
    p = kink_problem(1, 1.66);
  else if (name == "kink-2d")
    p = kink_problem(2, 4.71);
  else if (name == "freeze-1d")
    p = freeze_problem(1, !no_saturation);
  else if (name == "freeze-2d")
    p = freeze_problem(2, !no_saturation);
  else if (name == "adhesion-partial")
    p = adhesion_problem(Engulfment::Partial, !no_saturation);
  else if (name == "adhesion-complete")
    p = adhesion_problem(Engulfment::Complete, !no_saturation);
  else
    throw std::invalid_argument("unknown problem: " + name);

  if (no_saturation && !p.has_no_saturation_variant)
    throw std::invalid_argument("problem " + name + " has no --no-saturation variant");
  return p;
}

}  // namespace satflow
