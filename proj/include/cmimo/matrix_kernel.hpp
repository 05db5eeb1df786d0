#pragma once

// Dense complex-matrix primitives shared by the solvers and the verifiers.

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

#include "cmimo/error.hpp"

namespace cmimo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// r x t channel gains (H, H0 or a perturbation Delta). Rows are receive
/// antennas, columns transmit antennas.
using ChannelMatrix = ComplexMatrix;

/// Full SVD of a channel: source = left * diag_embed(singular) * right^H.
struct NominalDecomposition {
  ComplexMatrix left;   // r x r unitary
  RealVector singular;  // min(r, t) entries, descending, >= 0
  ComplexMatrix right;  // t x t unitary
};

enum class NormKind { Spectral, Frobenius, Nuclear };

std::string_view to_string(NormKind kind);
NormKind parse_norm_kind(std::string_view text);

/// Singular values below this fraction of the largest one are set to zero.
inline constexpr double kRankTolerance = 1e-12;
inline constexpr double kDefaultPsdTolerance = 1e-9;

/// Throws ShapeError for an empty matrix and NonFinite for NaN/Inf entries.
void require_valid_channel(const ComplexMatrix& m, std::string_view name);

NominalDecomposition svd(const ChannelMatrix& m);

/// Descending singular values only; cheaper than a full decomposition.
RealVector singular_values(const ComplexMatrix& m);

double matrix_norm(const ChannelMatrix& m, NormKind kind);

/// Vector norm on singular values matching `kind` (inf, 2 or 1 norm).
double spectrum_norm(const RealVector& v, NormKind kind);

/// r x t matrix with `diagonal` on its main diagonal; entries past
/// min(r, t) are ignored, missing entries are zero.
ComplexMatrix diag_embed(const RealVector& diagonal, Eigen::Index rows,
                         Eigen::Index cols);

/// ln det(I_r + gamma * H Q H^H) in nats, via a Cholesky factor.
double log_det_capacity(const ChannelMatrix& h, const ComplexMatrix& q,
                        double gamma,
                        double psd_tolerance = kDefaultPsdTolerance);

bool is_psd(const ComplexMatrix& q, double tol = kDefaultPsdTolerance);

/// Deterministic draw from the `kind` ball of radius epsilon. Most draws sit
/// in the outer shell [0.99 eps, eps].
ChannelMatrix sample_ball(Eigen::Index rows, Eigen::Index cols, double epsilon,
                          NormKind kind, std::uint64_t seed);

/// Haar-distributed unitary of size n (QR of a complex Gaussian matrix).
ComplexMatrix random_unitary(Eigen::Index n, std::uint64_t seed);

/// splitmix64 mix of a base seed and a stream index; used to hand out
/// disjoint seeds to parallel workers.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace cmimo
