// Timing comparison between the serial reference kernels and the
// table-backed OpenMP paths, with a max-difference column as a sanity check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "satflow/gradientflow.hpp"
#include "satflow/parallel.hpp"
#include "satflow/reference.hpp"

using namespace satflow;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

double max_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void report(const char* name, double serial_s, double parallel_s, double diff) {
  std::printf("%-28s %10.2f ms %10.2f ms %8.2fx   max|diff| %.2e\n", name, serial_s * 1e3,
              parallel_s * 1e3, serial_s / parallel_s, diff);
}

std::vector<double> random_field(size_t n, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

void bench_convolution_1d(int cells, std::mt19937& rng) {
  const Grid1D grid = make_grid(-2.0, 2.0, cells, Boundary::NoFlux);
  const auto kernel = [](double d) { return 0.5 * d * d; };
  const auto field = random_field(cells, rng);

  auto t0 = clock_type::now();
  const auto ref = reference::convolve_direct(kernel, field, grid);
  const double serial_s = seconds_since(t0);

  t0 = clock_type::now();
  const auto fast = discrete_convolution(kernel, field, grid);
  const double parallel_s = seconds_since(t0);

  char name[64];
  std::snprintf(name, sizeof name, "convolution 1d (M=%d)", cells);
  report(name, serial_s, parallel_s, max_diff(ref, fast));
}

void bench_convolution_2d(int cells, std::mt19937& rng) {
  Grid2D grid;
  grid.x = make_grid(-2.0, 2.0, cells, Boundary::NoFlux);
  grid.y = grid.x;
  const auto kernel = [](double dx, double dy) { return 0.5 * (dx * dx + dy * dy); };
  const auto field = random_field(static_cast<size_t>(cells) * cells, rng);

  auto t0 = clock_type::now();
  const auto ref = reference::convolve_direct_2d(kernel, field, grid);
  const double serial_s = seconds_since(t0);

  Convolution2D conv(kernel, grid);
  t0 = clock_type::now();
  conv.rebuild(field);
  const double parallel_s = seconds_since(t0);

  char name[64];
  std::snprintf(name, sizeof name, "convolution 2d (%dx%d)", cells, cells);
  report(name, serial_s, parallel_s, max_diff(ref, conv.values()));
}

void bench_row_update(int cells, std::mt19937& rng) {
  Grid2D grid;
  grid.x = make_grid(-2.0, 2.0, cells, Boundary::NoFlux);
  grid.y = grid.x;
  const auto kernel = [](double dx, double dy) { return 0.5 * (dx * dx + dy * dy); };
  auto field = random_field(static_cast<size_t>(cells) * cells, rng);
  const auto delta = random_field(cells, rng);
  const int row = cells / 2;

  // Serial route: full direct rebuild from the perturbed field.
  auto perturbed = field;
  for (int i = 0; i < cells; ++i) perturbed[static_cast<size_t>(row) * cells + i] += delta[i];
  auto t0 = clock_type::now();
  const auto ref = reference::convolve_direct_2d(kernel, perturbed, grid);
  const double serial_s = seconds_since(t0);

  Convolution2D conv(kernel, grid);
  conv.rebuild(field);
  t0 = clock_type::now();
  conv.apply_row_delta(row, delta);
  const double parallel_s = seconds_since(t0);

  char name[64];
  std::snprintf(name, sizeof name, "row delta vs rebuild (%d)", cells);
  report(name, serial_s, parallel_s, max_diff(ref, conv.values()));
}

}  // namespace

int main() {
  apply_thread_cap_from_env();
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");
  std::mt19937 rng(7);
  bench_convolution_1d(2048, rng);
  bench_convolution_1d(8192, rng);
  bench_convolution_2d(48, rng);
  bench_convolution_2d(96, rng);
  bench_row_update(96, rng);
  bench_row_update(192, rng);
  return 0;
}
