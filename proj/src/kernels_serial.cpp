// Single-threaded references for the OpenMP kernels in kernels.cpp.

#include <algorithm>
#include <cmath>

#include "kernel_detail.hpp"

namespace cmimo {

using detail::kInf;
using detail::empty_scan;
using detail::sigma_at;

namespace serial {

MinScan min_scan(std::size_t count, std::size_t width, const ScanRow& row) {
  MinScan result = empty_scan(width);
  std::vector<double> buf(width);
  for (std::size_t k = 0; k < count; ++k) {
    row(k, buf);
    for (std::size_t c = 0; c < width; ++c) {
      if (buf[c] < result.minimum[c]) {
        result.minimum[c] = buf[c];
        result.argmin[c] = k;
      }
    }
  }
  return result;
}

std::vector<double> grid_inner_table(double lo, double hi, std::size_t sigma_points,
                                     std::span<const double> lambdas, double gamma) {
  std::vector<double> table;
  table.reserve(lambdas.size());
  for (double lam : lambdas) {
    double best = kInf;
    for (std::size_t j = 0; j < sigma_points; ++j) {
      const double s = sigma_at(lo, hi, sigma_points, j);
      best = std::min(best, std::log1p(gamma * s * s * lam));
    }
    table.push_back(best);
  }
  return table;
}

double simplex_max(const std::vector<std::vector<double>>& tables, std::size_t steps) {
  const std::size_t n = tables.size();
  if (n == 1) return tables[0][steps];
  double best = -kInf;
  for (std::size_t ka = 0; ka <= steps; ++ka) {
    const std::size_t rest = steps - ka;
    if (n == 2) {
      best = std::max(best, tables[0][ka] + tables[1][rest]);
      continue;
    }
    for (std::size_t kb = 0; kb <= rest; ++kb) {
      best = std::max(best, tables[0][ka] + tables[1][kb] + tables[2][rest - kb]);
    }
  }
  return best;
}

}  // namespace serial

}  // namespace cmimo
