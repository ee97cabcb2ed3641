#include "satflow/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace satflow {

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<const double> rhs,
                       std::span<double> x) {
  const int n = static_cast<int>(diag.size());
  if (n == 0) return;
  if (n == 1) {
    x[0] = rhs[0] / diag[0];
    return;
  }
  std::vector<double> c_star(n - 1), d_star(n);
  c_star[0] = upper[0] / diag[0];
  d_star[0] = rhs[0] / diag[0];
  for (int i = 1; i < n - 1; ++i) {
    const double m = 1.0 / (diag[i] - lower[i] * c_star[i - 1]);
    c_star[i] = upper[i] * m;
    d_star[i] = (rhs[i] - lower[i] * d_star[i - 1]) * m;
  }
  const double m = 1.0 / (diag[n - 1] - lower[n - 1] * c_star[n - 2]);
  d_star[n - 1] = (rhs[n - 1] - lower[n - 1] * d_star[n - 2]) * m;

  x[n - 1] = d_star[n - 1];
  for (int i = n - 2; i >= 0; --i) x[i] = d_star[i] - c_star[i] * x[i + 1];
}

namespace {

// Dense PxP helpers for the block solves (P <= 2, row-major).
void block_invert(int P, const double* a, double* inv) {
  if (P == 1) {
    inv[0] = 1.0 / a[0];
    return;
  }
  const double det = a[0] * a[3] - a[1] * a[2];
  inv[0] = a[3] / det;
  inv[1] = -a[1] / det;
  inv[2] = -a[2] / det;
  inv[3] = a[0] / det;
}

void block_mul(int P, const double* a, const double* b, double* out) {
  for (int r = 0; r < P; ++r)
    for (int c = 0; c < P; ++c) {
      double s = 0.0;
      for (int k = 0; k < P; ++k) s += a[r * P + k] * b[k * P + c];
      out[r * P + c] = s;
    }
}

void block_mul_vec(int P, const double* a, const double* v, double* out) {
  for (int r = 0; r < P; ++r) {
    double s = 0.0;
    for (int k = 0; k < P; ++k) s += a[r * P + k] * v[k];
    out[r] = s;
  }
}

// Gaussian elimination with partial pivoting for the small Woodbury system.
void dense_solve(int n, std::vector<double>& a, std::vector<double>& b) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    const double d = a[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / d;
      for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * b[c];
    b[r] = s / a[r * n + r];
  }
}

}  // namespace

void solve_cyclic_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                              std::span<const double> upper, std::span<const double> rhs,
                              std::span<double> x) {
  const int n = static_cast<int>(diag.size());
  if (n < 3) throw std::invalid_argument("solve_cyclic_tridiagonal: need n >= 3");

  const double corner_top = lower[0];       // (0, n-1) entry
  const double corner_bottom = upper[n - 1];  // (n-1, 0) entry
  const double gamma = -diag[0];

  std::vector<double> b(diag.begin(), diag.end());
  b[0] -= gamma;
  b[n - 1] -= corner_top * corner_bottom / gamma;

  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = corner_bottom;

  std::vector<double> y(n), z(n);
  solve_tridiagonal(lower, b, upper, rhs, y);
  solve_tridiagonal(lower, b, upper, u, z);

  // v = (1, 0, ..., 0, corner_top/gamma)
  const double vy = y[0] + corner_top / gamma * y[n - 1];
  const double vz = z[0] + corner_top / gamma * z[n - 1];
  const double factor = vy / (1.0 + vz);
  for (int i = 0; i < n; ++i) x[i] = y[i] - factor * z[i];
}

void solve_block_tridiagonal(int n, int P, std::span<const double> lower,
                             std::span<const double> diag, std::span<const double> upper,
                             std::span<const double> rhs, std::span<double> x) {
  const int B = P * P;
  std::vector<double> c_star(static_cast<size_t>(n) * B), d_star(static_cast<size_t>(n) * P);
  std::vector<double> inv(B), work(B), tmp(B), vec(P);

  block_invert(P, &diag[0], inv.data());
  block_mul(P, inv.data(), &upper[0], &c_star[0]);
  block_mul_vec(P, inv.data(), &rhs[0], &d_star[0]);

  for (int i = 1; i < n; ++i) {
    // M = inv(D_i - L_i C_{i-1})
    block_mul(P, &lower[static_cast<size_t>(i) * B], &c_star[static_cast<size_t>(i - 1) * B],
              work.data());
    for (int k = 0; k < B; ++k) tmp[k] = diag[static_cast<size_t>(i) * B + k] - work[k];
    block_invert(P, tmp.data(), inv.data());
    if (i < n - 1)
      block_mul(P, inv.data(), &upper[static_cast<size_t>(i) * B],
                &c_star[static_cast<size_t>(i) * B]);
    block_mul_vec(P, &lower[static_cast<size_t>(i) * B],
                  &d_star[static_cast<size_t>(i - 1) * P], vec.data());
    for (int k = 0; k < P; ++k) vec[k] = rhs[static_cast<size_t>(i) * P + k] - vec[k];
    block_mul_vec(P, inv.data(), vec.data(), &d_star[static_cast<size_t>(i) * P]);
  }

  for (int k = 0; k < P; ++k)
    x[static_cast<size_t>(n - 1) * P + k] = d_star[static_cast<size_t>(n - 1) * P + k];
  for (int i = n - 2; i >= 0; --i) {
    block_mul_vec(P, &c_star[static_cast<size_t>(i) * B], &x[static_cast<size_t>(i + 1) * P],
                  vec.data());
    for (int k = 0; k < P; ++k)
      x[static_cast<size_t>(i) * P + k] = d_star[static_cast<size_t>(i) * P + k] - vec[k];
  }
}

void solve_cyclic_block_tridiagonal(int n, int P, std::span<const double> lower,
                                    std::span<const double> diag, std::span<const double> upper,
                                    std::span<const double> corner_top,
                                    std::span<const double> corner_bottom,
                                    std::span<const double> rhs, std::span<double> x) {
  if (n < 3) throw std::invalid_argument("solve_cyclic_block_tridiagonal: need n >= 3");
  const int B = P * P;
  // A = T + E_0 C_top E_{n-1}^T + E_{n-1} C_bottom E_0^T; Woodbury with the
  // 2P-column correction U = [E_0 C_top | E_{n-1} C_bottom].
  std::vector<double> y(static_cast<size_t>(n) * P);
  solve_block_tridiagonal(n, P, lower, diag, upper, rhs, y);

  std::vector<std::vector<double>> z(2 * P, std::vector<double>(static_cast<size_t>(n) * P));
  std::vector<double> col(static_cast<size_t>(n) * P, 0.0);
  for (int j = 0; j < P; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    for (int r = 0; r < P; ++r) col[r] = corner_top[r * P + j];
    solve_block_tridiagonal(n, P, lower, diag, upper, col, z[j]);
    std::fill(col.begin(), col.end(), 0.0);
    for (int r = 0; r < P; ++r) col[static_cast<size_t>(n - 1) * P + r] = corner_bottom[r * P + j];
    solve_block_tridiagonal(n, P, lower, diag, upper, col, z[P + j]);
  }

  // V^T picks block rows n-1 (for the top corner) and 0 (for the bottom one).
  const int w = 2 * P;
  std::vector<double> small(static_cast<size_t>(w) * w, 0.0), svec(w);
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < P; ++r) {
      small[static_cast<size_t>(r) * w + c] = z[c][static_cast<size_t>(n - 1) * P + r];
      small[static_cast<size_t>(P + r) * w + c] = z[c][r];
    }
    small[static_cast<size_t>(c) * w + c] += 1.0;
  }
  for (int r = 0; r < P; ++r) {
    svec[r] = y[static_cast<size_t>(n - 1) * P + r];
    svec[P + r] = y[r];
  }
  dense_solve(w, small, svec);

  for (int i = 0; i < n * P; ++i) {
    double corr = 0.0;
    for (int c = 0; c < w; ++c) corr += z[c][i] * svec[c];
    x[i] = y[i] - corr;
  }
}

}  // namespace satflow
