#include <doctest.h>

#include <cmath>
#include <vector>

#include "cmimo/kernels.hpp"
#include "cmimo/parallel.hpp"
#include "support.hpp"

using namespace cmimo;
namespace ts = testing_support;

TEST_CASE("min_scan matches the serial reference for every thread count") {
  const ScanRow row = [](std::size_t k, std::span<double> out) {
    out[0] = std::sin(0.37 * static_cast<double>(k)) + 1e-3 * static_cast<double>(k % 11);
    out[1] = static_cast<double>((k * 7919) % 1000);  // many ties
  };
  const MinScan ref = serial::min_scan(5000, 2, row);
  for (int threads : {1, 2, 3, 7}) {
    const MinScan p = min_scan(5000, 2, row, threads);
    CHECK(p.minimum == ref.minimum);
    CHECK(p.argmin == ref.argmin);
  }
  CHECK(ref.minimum[1] == 0.0);
  CHECK(ref.argmin[1] == 0);
}

TEST_CASE("grid kernels match their serial references") {
  std::vector<double> lambdas;
  for (int k = 0; k <= 100; ++k) lambdas.push_back(0.02 * k);
  const std::vector<double> ref = serial::grid_inner_table(0.5, 1.5, 101, lambdas, 2.0);
  for (int threads : {1, 2, 5}) {
    CHECK(grid_inner_table(0.5, 1.5, 101, lambdas, 2.0, threads) == ref);
  }
  // The inner minimum of an increasing function sits at the lower edge.
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    CHECK(std::abs(ref[k] - std::log1p(2.0 * 0.25 * lambdas[k])) <= 1e-15);
  }

  const std::vector<std::vector<double>> tables{ref, ref, ref};
  const double s = serial::simplex_max(tables, 100);
  for (int threads : {1, 2, 4}) CHECK(simplex_max(tables, 100, threads) == s);
  // Brute force for three identical tables.
  double best = -INFINITY;
  for (int a = 0; a <= 100; ++a)
    for (int b = 0; a + b <= 100; ++b) best = std::max(best, ref[a] + ref[b] + ref[100 - a - b]);
  CHECK(s == best);
}

TEST_CASE("factored log-det matches the direct determinant") {
  for (int k = 0; k < 12; ++k) {
    const Eigen::Index r = 1 + k % 4, t = 1 + (k * 5) % 4;
    const ComplexMatrix h = ts::random_complex(r, t, 300 + k);
    const ComplexMatrix f = ts::random_complex(t, t, 400 + k);
    const ComplexMatrix q = f * f.adjoint();
    const ComplexMatrix eye = ComplexMatrix::Identity(r, r);
    const double direct = std::log((eye + 0.8 * h * q * h.adjoint()).determinant().real());
    CHECK(std::abs(log_det_factored(h, covariance_factor(q), 0.8) - direct) <= 1e-9 * std::max(1.0, direct));
  }
}

TEST_CASE("thread cap from the environment") {
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(0) >= 1);
}
