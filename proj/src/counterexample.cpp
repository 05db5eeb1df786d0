#include <array>
#include <cmath>
#include <limits>

#include "cmimo/verification.hpp"

namespace cmimo {

CounterexampleL1 counterexample_l1() {
  const double s1 = 2.0, s2 = 1.0;
  const double d1 = 4.0, d2 = 3.0;
  const double epsilon = 1.0;

  // Diagonal Delta: the l1 ball in (delta_11, delta_22). Both factors are
  // minimized on the boundary, so scan every edge of the diamond.
  auto diag_value = [&](double a, double b) {
    return (1.0 + (s1 + a) * (s1 + a) * d1) * (1.0 + (s2 + b) * (s2 + b) * d2);
  };
  constexpr long kSteps = 1'000'000;
  CounterexampleL1 out;
  out.diag_restricted_min = diag_value(0.0, 0.0);
  for (const auto& signs : std::array<std::array<double, 2>, 4>{
           {{-1.0, -1.0}, {-1.0, 1.0}, {1.0, -1.0}, {1.0, 1.0}}}) {
    for (long k = 0; k <= kSteps; ++k) {
      const double split = static_cast<double>(k) / static_cast<double>(kSteps);
      const double a = signs[0] * epsilon * split;
      const double b = signs[1] * epsilon * (1.0 - split);
      const double v = diag_value(a, b);
      if (v < out.diag_restricted_min) {
        out.diag_restricted_min = v;
        out.diag_argmin_first = a;
        out.diag_argmin_second = b;
      }
    }
  }

  Eigen::Matrix2d sigma;
  sigma << s1, 0.0, 0.0, s2;
  const Eigen::Matrix2d delta = Eigen::Matrix2d::Constant(-0.5);
  const Eigen::Matrix2d lambda = Eigen::Vector2d(d1, d2).asDiagonal();
  const Eigen::Matrix2d m = sigma + delta;
  out.full_matrix_value =
      (Eigen::Matrix2d::Identity() + m * lambda * m.transpose()).determinant();
  out.full_delta_nuclear_norm =
      matrix_norm(delta.cast<Complex>(), NormKind::Nuclear);
  out.full_below_diag = out.full_matrix_value < out.diag_restricted_min;
  return out;
}

}  // namespace cmimo
