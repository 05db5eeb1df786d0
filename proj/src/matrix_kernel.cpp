#include "cmimo/matrix_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace cmimo {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnsupportedNorm: return "UnsupportedNorm";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::Spectral: return "spectral";
    case NormKind::Frobenius: return "frobenius";
    case NormKind::Nuclear: return "nuclear";
  }
  return "unknown";
}

NormKind parse_norm_kind(std::string_view text) {
  if (text == "spectral") return NormKind::Spectral;
  if (text == "frobenius") return NormKind::Frobenius;
  if (text == "nuclear") return NormKind::Nuclear;
  throw Error(ErrorCode::ParseError,
              "--norm: expected spectral|frobenius|nuclear, got '" +
                  std::string(text) + "'");
}

void require_valid_channel(const ComplexMatrix& m, std::string_view name) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw Error(ErrorCode::ShapeError,
                std::string(name) + ": matrix must have at least one row and column");
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::NonFinite,
                std::string(name) + ": matrix contains NaN or Inf entries");
  }
}

namespace {

void clamp_small_singulars(RealVector& s) {
  if (s.size() == 0) return;
  const double cutoff = kRankTolerance * s(0);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) < cutoff) s(i) = 0.0;
  }
}

}  // namespace

NominalDecomposition svd(const ChannelMatrix& m) {
  require_valid_channel(m, "svd");
  Eigen::JacobiSVD<ComplexMatrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  NominalDecomposition out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
  clamp_small_singulars(out.singular);

  // Jacobi sweeps have no failure flag; a bad reconstruction is the symptom.
  const ComplexMatrix rebuilt =
      out.left * diag_embed(out.singular, m.rows(), m.cols()) * out.right.adjoint();
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if (!rebuilt.allFinite() || (rebuilt - m).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw Error(ErrorCode::ConvergenceFailure, "svd: decomposition did not converge");
  }
  return out;
}

RealVector singular_values(const ComplexMatrix& m) {
  require_valid_channel(m, "singular_values");
  Eigen::JacobiSVD<ComplexMatrix> solver(m);
  RealVector s = solver.singularValues();
  clamp_small_singulars(s);
  return s;
}

double spectrum_norm(const RealVector& v, NormKind kind) {
  if (v.size() == 0) return 0.0;
  switch (kind) {
    case NormKind::Spectral: return v.cwiseAbs().maxCoeff();
    case NormKind::Frobenius: return v.norm();
    case NormKind::Nuclear: return v.cwiseAbs().sum();
  }
  return 0.0;
}

double matrix_norm(const ChannelMatrix& m, NormKind kind) {
  require_valid_channel(m, "matrix_norm");
  if (kind == NormKind::Frobenius) return m.norm();
  return spectrum_norm(singular_values(m), kind);
}

ComplexMatrix diag_embed(const RealVector& diagonal, Eigen::Index rows,
                         Eigen::Index cols) {
  ComplexMatrix out = ComplexMatrix::Zero(rows, cols);
  const Eigen::Index n = std::min({rows, cols, diagonal.size()});
  for (Eigen::Index i = 0; i < n; ++i) out(i, i) = diagonal(i);
  return out;
}

bool is_psd(const ComplexMatrix& q, double tol) {
  if (q.rows() != q.cols()) return false;
  if (q.size() == 0) return true;
  if (!q.allFinite()) return false;
  if ((q - q.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  const ComplexMatrix herm = 0.5 * (q + q.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(herm, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol;
}

double log_det_capacity(const ChannelMatrix& h, const ComplexMatrix& q,
                        double gamma, double psd_tolerance) {
  require_valid_channel(h, "log_det_capacity: H");
  if (q.rows() != q.cols() || q.cols() != h.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "log_det_capacity: Q must be " + std::to_string(h.cols()) + "x" +
                    std::to_string(h.cols()) + " to match H.cols");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::InvalidArgument, "log_det_capacity: gamma must be positive");
  }
  if (!is_psd(q, psd_tolerance)) {
    throw Error(ErrorCode::NotPSD, "log_det_capacity: Q is not Hermitian PSD");
  }
  ComplexMatrix a = gamma * (h * q * h.adjoint());
  a = 0.5 * (a + a.adjoint());
  a += ComplexMatrix::Identity(h.rows(), h.rows());
  Eigen::LLT<ComplexMatrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "log_det_capacity: Cholesky failed");
  }
  const ComplexMatrix& l = llt.matrixLLT();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log(std::real(l(i, i)));
  return std::max(0.0, 2.0 * acc);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

ComplexMatrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

}  // namespace

ComplexMatrix random_unitary(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ComplexMatrix g = gaussian(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

ChannelMatrix sample_ball(Eigen::Index rows, Eigen::Index cols, double epsilon,
                          NormKind kind, std::uint64_t seed) {
  if (rows < 1 || cols < 1) {
    throw Error(ErrorCode::ShapeError, "sample_ball: dimensions must be positive");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::InvalidArgument, "sample_ball: epsilon must be >= 0");
  }
  if (epsilon == 0.0) return ComplexMatrix::Zero(rows, cols);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  const double shell = uniform(rng);
  const double shell_pos = uniform(rng);
  const double radius = shell < 0.75 ? 0.99 + 0.01 * shell_pos : 0.99 * shell_pos;
  const bool reshape_spectrum = uniform(rng) < 0.5;

  ComplexMatrix g = gaussian(rows, cols, rng);
  ComplexMatrix direction;
  if (reshape_spectrum) {
    // Keep the random singular vectors, redraw the singular values.
    Eigen::JacobiSVD<ComplexMatrix> dec(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    RealVector s(dec.singularValues().size());
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = uniform(rng);
    const double n = spectrum_norm(s, kind);
    if (n > 0.0) s /= n; else s.setOnes();
    s /= spectrum_norm(s, kind);
    direction = dec.matrixU() * diag_embed(s, rows, cols) * dec.matrixV().adjoint();
  } else {
    direction = g / matrix_norm(g, kind);
  }

  ComplexMatrix delta = (radius * epsilon) * direction;
  while (matrix_norm(delta, kind) > epsilon) delta *= 1.0 - 1e-15;
  return delta;
}

}  // namespace cmimo
