#pragma once

#include <limits>

#include "cmimo/kernels.hpp"

namespace cmimo {

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline void merge_into(MinScan& into, const MinScan& from) {
  for (std::size_t c = 0; c < into.minimum.size(); ++c) {
    const bool better = from.minimum[c] < into.minimum[c] ||
                        (from.minimum[c] == into.minimum[c] && from.argmin[c] < into.argmin[c]);
    if (better) {
      into.minimum[c] = from.minimum[c];
      into.argmin[c] = from.argmin[c];
    }
  }
}

inline MinScan empty_scan(std::size_t width) {
  return MinScan{std::vector<double>(width, kInf),
                 std::vector<std::size_t>(width, std::numeric_limits<std::size_t>::max())};
}

inline double sigma_at(double lo, double hi, std::size_t points, std::size_t j) {
  if (points <= 1) return lo;
  if (j + 1 == points) return hi;
  return lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(points - 1);
}

}  // namespace detail

}  // namespace cmimo
