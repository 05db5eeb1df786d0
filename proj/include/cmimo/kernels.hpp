#pragma once

// Data-parallel scans behind the verifiers. Every OpenMP kernel has a plain
// serial twin in `cmimo::serial`; both produce identical results for any
// thread count because per-index work is a pure function of the index and
// ties resolve to the lowest index.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cmimo/matrix_kernel.hpp"

namespace cmimo {

/// Column-wise minimum of a count x width table produced one row at a time.
struct MinScan {
  std::vector<double> minimum;
  std::vector<std::size_t> argmin;
};

/// Fills `out` (size `width`) with the observations for one index.
using ScanRow = std::function<void(std::size_t index, std::span<double> out)>;

MinScan min_scan(std::size_t count, std::size_t width, const ScanRow& row, int threads = 0);

/// F with Q = F F^H, dropping eigen-directions at or below zero.
ComplexMatrix covariance_factor(const ComplexMatrix& q);

/// ln det(I + gamma (H F)(H F)^H); no PSD validation, for hot loops.
double log_det_factored(const ChannelMatrix& h, const ComplexMatrix& factor, double gamma);

/// table[k] = min over `sigma_points` evenly spaced sigma in [lo, hi] of
/// ln(1 + gamma sigma^2 lambdas[k]).
std::vector<double> grid_inner_table(double lo, double hi, std::size_t sigma_points,
                                     std::span<const double> lambdas, double gamma,
                                     int threads = 0);

/// max over k_1 + ... + k_n == steps of sum_i tables[i][k_i], for n <= 3.
double simplex_max(const std::vector<std::vector<double>>& tables, std::size_t steps,
                   int threads = 0);

namespace serial {

MinScan min_scan(std::size_t count, std::size_t width, const ScanRow& row);

std::vector<double> grid_inner_table(double lo, double hi, std::size_t sigma_points,
                                     std::span<const double> lambdas, double gamma);

double simplex_max(const std::vector<std::vector<double>>& tables, std::size_t steps);

}  // namespace serial

}  // namespace cmimo
