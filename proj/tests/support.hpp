#pragma once

// Independent helpers for the unit tests. None of these call into the
// library's solvers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace testing_support {

inline Eigen::MatrixXcd random_complex(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                                       double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, scale);
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = {n(rng), n(rng)};
  return m;
}

inline Eigen::MatrixXcd haar_unitary(Eigen::Index n, std::uint64_t seed) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(random_complex(n, n, seed));
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

/// Classic water-filling: bisection on the water level mu with
/// lambda_i = max(mu - 1/(gamma s_i^2), 0).
inline Eigen::VectorXd bisection_waterfill(const Eigen::VectorXd& s, double gamma, double budget) {
  auto spent = [&](double mu) {
    double acc = 0.0;
    for (double v : s)
      if (v > 0) acc += std::max(mu - 1.0 / (gamma * v * v), 0.0);
    return acc;
  };
  double lo = 0.0, hi = 1.0;
  while (spent(hi) < budget) hi *= 2.0;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    (spent(mid) < budget ? lo : hi) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  Eigen::VectorXd lambda(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    lambda(i) = s(i) > 0 ? std::max(mu - 1.0 / (gamma * s(i) * s(i)), 0.0) : 0.0;
  return lambda;
}

inline double mode_sum(const Eigen::VectorXd& s, const Eigen::VectorXd& l, double gamma) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::log(1.0 + gamma * s(i) * s(i) * l(i));
  return acc;
}

/// Singular values of a 2x2 real matrix from the eigenvalues of A^T A.
inline std::pair<double, double> singular_2x2(double a, double b, double c, double d) {
  const double p = a * a + b * b + c * c + d * d;
  const double q = a * d - b * c;
  const double disc = std::sqrt(std::max(p * p - 4.0 * q * q, 0.0));
  return {std::sqrt(0.5 * (p + disc)), std::sqrt(std::max(0.5 * (p - disc), 0.0))};
}

}  // namespace testing_support
