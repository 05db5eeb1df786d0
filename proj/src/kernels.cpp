#include "cmimo/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmimo/parallel.hpp"
#include "kernel_detail.hpp"

namespace cmimo {

using detail::kInf;
using detail::empty_scan;
using detail::sigma_at;

MinScan min_scan(std::size_t count, std::size_t width, const ScanRow& row, int threads) {
  MinScan result = empty_scan(width);
  const long n = static_cast<long>(count);
#pragma omp parallel num_threads(resolve_threads(threads))
  {
    MinScan local = empty_scan(width);
    std::vector<double> buf(width);
#pragma omp for schedule(static)
    for (long k = 0; k < n; ++k) {
      row(static_cast<std::size_t>(k), buf);
      for (std::size_t c = 0; c < width; ++c) {
        if (buf[c] < local.minimum[c]) {
          local.minimum[c] = buf[c];
          local.argmin[c] = static_cast<std::size_t>(k);
        }
      }
    }
#pragma omp critical(cmimo_min_scan)
    detail::merge_into(result, local);
  }
  return result;
}

ComplexMatrix covariance_factor(const ComplexMatrix& q) {
  const ComplexMatrix herm = 0.5 * (q + q.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(herm);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    if (eig.eigenvalues()(i) > 0.0) keep.push_back(i);
  }
  ComplexMatrix f(q.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    const Eigen::Index i = keep[c];
    f.col(static_cast<Eigen::Index>(c)) =
        eig.eigenvectors().col(i) * std::sqrt(eig.eigenvalues()(i));
  }
  return f;
}

double log_det_factored(const ChannelMatrix& h, const ComplexMatrix& factor, double gamma) {
  if (factor.cols() == 0) return 0.0;
  const ComplexMatrix hf = h * factor;
  // Sylvester: det(I_r + g HF (HF)^H) = det(I_k + g (HF)^H HF); use the smaller side.
  ComplexMatrix a = hf.cols() <= hf.rows() ? ComplexMatrix(gamma * (hf.adjoint() * hf))
                                           : ComplexMatrix(gamma * (hf * hf.adjoint()));
  a = 0.5 * (a + a.adjoint());
  a += ComplexMatrix::Identity(a.rows(), a.cols());
  Eigen::LLT<ComplexMatrix> llt(a);
  const ComplexMatrix& l = llt.matrixLLT();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log(std::real(l(i, i)));
  return 2.0 * acc;
}

std::vector<double> grid_inner_table(double lo, double hi, std::size_t sigma_points,
                                     std::span<const double> lambdas, double gamma,
                                     int threads) {
  std::vector<double> table(lambdas.size(), kInf);
  const long n = static_cast<long>(lambdas.size());
#pragma omp parallel for schedule(static) num_threads(resolve_threads(threads))
  for (long k = 0; k < n; ++k) {
    double best = kInf;
    for (std::size_t j = 0; j < sigma_points; ++j) {
      const double s = sigma_at(lo, hi, sigma_points, j);
      best = std::min(best, std::log1p(gamma * s * s * lambdas[static_cast<std::size_t>(k)]));
    }
    table[static_cast<std::size_t>(k)] = best;
  }
  return table;
}

double simplex_max(const std::vector<std::vector<double>>& tables, std::size_t steps,
                   int threads) {
  const std::size_t n = tables.size();
  if (n == 1) return tables[0][steps];
  double best = -kInf;
  const long outer = static_cast<long>(steps) + 1;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : best) \
    num_threads(resolve_threads(threads))
  for (long a = 0; a < outer; ++a) {
    const std::size_t ka = static_cast<std::size_t>(a);
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


}  // namespace cmimo
