#pragma once

#include <span>

namespace satflow {

// Thomas algorithm for a x_{i-1} + b x_i + c x_{i+1} = d (no pivoting; the
// transport systems assembled here are M-matrices, for which this is stable).
// lower/upper have length n with lower[0] and upper[n-1] ignored.
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<const double> rhs,
                       std::span<double> x);

// Cyclic variant: lower[0] couples x_0 to x_{n-1} and upper[n-1] couples
// x_{n-1} to x_0 (Sherman-Morrison around the Thomas solve). Requires n >= 3.
void solve_cyclic_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                              std::span<const double> upper, std::span<const double> rhs,
                              std::span<double> x);

// Block-tridiagonal Thomas solve with PxP row-major blocks (P <= 2). lower[0]
// and upper[n-1] are ignored. rhs and x hold n*P values.
void solve_block_tridiagonal(int n, int P, std::span<const double> lower,
                             std::span<const double> diag, std::span<const double> upper,
                             std::span<const double> rhs, std::span<double> x);

// Cyclic block variant: corner_top is the (0, n-1) block, corner_bottom the
// (n-1, 0) block (Woodbury around the block Thomas solve). Requires n >= 3.
void solve_cyclic_block_tridiagonal(int n, int P, std::span<const double> lower,
                                    std::span<const double> diag, std::span<const double> upper,
                                    std::span<const double> corner_top,
                                    std::span<const double> corner_bottom,
                                    std::span<const double> rhs, std::span<double> x);

}  // namespace satflow
