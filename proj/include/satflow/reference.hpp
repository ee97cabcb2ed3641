#pragma once

#include <functional>
#include <span>
#include <vector>

#include "satflow/core.hpp"

namespace satflow::reference {

// Serial direct-sum convolutions evaluating the kernel function per pair,
// with no displacement table. Kept as the independent reference for the
// table-backed parallel paths; the benchmark compares them.
std::vector<double> convolve_direct(const std::function<double(double)>& kernel,
                                    std::span<const double> values, const Grid1D& grid);

std::vector<double> convolve_direct_2d(const std::function<double(double, double)>& kernel,
                                       std::span<const double> field, const Grid2D& grid);

}  // namespace satflow::reference
