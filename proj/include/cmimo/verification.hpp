#pragma once

// Adversarial and brute-force checks of the capacity results. Nothing here
// calls the capacity solvers except verify_instance, which wires a solver
// run to the independent checks.

#include <cstdint>
#include <string>
#include <vector>

#include "cmimo/capacity.hpp"
#include "cmimo/matrix_kernel.hpp"

namespace cmimo {

struct VerificationConfig {
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  double grid_step = 1e-3;
  int threads = 0;  // 0: COMPOUND_MIMO_THREADS / OpenMP default
};

void validate(const VerificationConfig& cfg);

enum class CheckSense { AtLeast, AtMost };

/// margin = observed - bound for AtLeast checks and bound - observed for
/// AtMost checks, so a check passes iff margin >= -tolerance.
struct Check {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  CheckSense sense = CheckSense::AtLeast;
};

Check make_check(std::string name, double observed, double bound, CheckSense sense,
                 double tolerance);

struct VerificationReport {
  std::vector<Check> checks;
  double min_observed_mi = 0.0;
  ChannelMatrix worst_delta;

  bool all_passed() const;
  void add(Check c) { checks.push_back(std::move(c)); }
};

struct AdversarialFloor {
  double min_mi = 0.0;           // over samples and the analytic worst case
  double min_sampled_mi = 0.0;
  double analytic_mi = 0.0;      // I(Q, H0 + Delta*)
  ChannelMatrix worst_delta;
  ChannelMatrix analytic_delta;  // U0 diag(sigma* - sigma0) V0^H
  bool attained_by_analytic = false;
  std::size_t samples = 0;
};

/// Smallest I(Q, H0 + Delta) over cfg.samples spectral-ball perturbations
/// (mostly on the boundary, a quarter aligned with H0's singular vectors)
/// plus the analytic worst case.
AdversarialFloor adversarial_mi_floor(const ChannelMatrix& h0, const ComplexMatrix& q,
                                      double epsilon, double gamma,
                                      const VerificationConfig& cfg);

/// Serial reference of adversarial_mi_floor; identical output.
AdversarialFloor adversarial_mi_floor_serial(const ChannelMatrix& h0, const ComplexMatrix& q,
                                             double epsilon, double gamma,
                                             const VerificationConfig& cfg);

/// det[I + (S + D) L (S + D)^H] >= prod_j (1 + max(s_jj - eps, 0)^2 l_jj) for
/// spectral-ball D, plus the diagonal equality achiever.
struct ProductBoundResult {
  VerificationReport report;
  double bound = 0.0;
  double achiever_det = 0.0;
  double min_sampled_det = 0.0;
  ChannelMatrix achiever;
};

/// sigma: real nonnegative diagonal r x t; lambda: real nonnegative diagonal
/// t x t. Throws ShapeError otherwise.
ProductBoundResult lemma1_inequality_check(const ComplexMatrix& sigma, const ComplexMatrix& lambda,
                                     double epsilon, const VerificationConfig& cfg);

/// Weyl-type singular value bounds and the Gram determinant bound for
/// spectral-ball perturbations of a diagonal matrix.
VerificationReport singular_perturbation_check(const ComplexMatrix& sigma, double epsilon,
                                               const VerificationConfig& cfg);

/// Principal-submatrix determinant bounds and the submatrix spectral norm
/// contraction over every nonempty column subset. t <= 4.
VerificationReport submatrix_inequality_check(const ComplexMatrix& sigma, double epsilon,
                                              const VerificationConfig& cfg);

/// Reproduces the nuclear-norm counterexample: Sigma = diag(2, 1),
/// Lambda = diag(4, 3), eps = 1.
struct CounterexampleL1 {
  double diag_restricted_min = 0.0;
  double diag_argmin_first = 0.0;   // delta_11
  double diag_argmin_second = 0.0;  // delta_22
  double full_matrix_value = 0.0;   // at Delta = -0.5 * ones(2, 2)
  double full_delta_nuclear_norm = 0.0;
  bool full_below_diag = false;
};

CounterexampleL1 counterexample_l1();

struct DiagonalMinimum {
  double value = 0.0;  // determinant
  RealVector delta;
};

/// min over diagonal Delta = diag(delta) with ||delta|| <= eps (vector norm of
/// `kind`) of prod_j (1 + (s_j + delta_j)^2 d_j). Spectral is separable;
/// Frobenius and nuclear use pairwise exchange sweeps along the ball boundary.
DiagonalMinimum diagonal_determinant_min(const RealVector& s, const RealVector& d,
                                         double epsilon, NormKind kind);

struct LemmaSearchOptions {
  std::size_t samples_per_trial = 2000;
  std::size_t refine_steps = 400;
  double max_singular = 3.0;
  double max_power = 5.0;
  double max_epsilon = 1.5;
  bool zero_epsilon = false;
  double tolerance = 1e-9;  // margins at or below this are rounding noise
  int threads = 0;
};

struct LemmaSearchResult {
  NormKind kind = NormKind::Frobenius;
  double best_margin = 0.0;  // diagonal_min - nondiagonal_min; 0 when nothing beats tolerance
  std::size_t best_trial = 0;
  std::size_t trials = 0;
  RealVector best_s;
  RealVector best_d;
  double best_epsilon = 0.0;
  ChannelMatrix best_delta;
  bool exploratory = true;
};

/// Margin for one instance: best diagonal minimum minus the best non-diagonal
/// Delta found by boundary-heavy sampling plus random local refinement.
double lemma_margin(const RealVector& s, const RealVector& d, Eigen::Index rows,
                    Eigen::Index cols, double epsilon, NormKind kind, std::uint64_t seed,
                    const LemmaSearchOptions& options, ChannelMatrix* best_delta = nullptr);

/// Exploratory search for instances where no diagonal perturbation is a
/// minimizer. A positive margin is a candidate, not a proof.
LemmaSearchResult lemma_search(NormKind kind, Eigen::Index rows, Eigen::Index cols,
                               std::size_t trials, std::uint64_t seed,
                               const LemmaSearchOptions& options = {});

LemmaSearchResult frobenius_lemma_search(Eigen::Index rows, Eigen::Index cols,
                                         std::size_t trials, std::uint64_t seed,
                                         const LemmaSearchOptions& options = {});

struct GridOracle {
  double value = 0.0;
  double tolerance = 0.0;  // 3 * step * lipschitz
  double lipschitz = 0.0;
  std::size_t lambda_steps = 0;
  std::size_t sigma_points = 0;
};

/// Brute force max over a lambda grid of min over a sigma-box grid of
/// sum_i ln(1 + gamma sigma_i^2 lambda_i). At most three modes.
GridOracle grid_oracle_maxmin(const RealVector& sigma0, double epsilon, double gamma,
                              const PowerConstraint& constraint, double grid_step,
                              int threads = 0);

GridOracle grid_oracle_maxmin_serial(const RealVector& sigma0, double epsilon, double gamma,
                                     const PowerConstraint& constraint, double grid_step);

struct InstanceVerification {
  CapacityReport capacity;
  AdversarialFloor floor;
  VerificationReport report;
};

/// Solves the spectral instance and runs every applicable check on it.
InstanceVerification verify_instance(const ChannelMatrix& h0, double epsilon, double gamma,
                                     const PowerConstraint& constraint,
                                     const VerificationConfig& cfg);

}  // namespace cmimo
