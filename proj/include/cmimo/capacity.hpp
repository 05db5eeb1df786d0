#pragma once

// Compound-channel capacity solvers for additive norm-bounded uncertainty
// H = H0 + Delta, |||Delta||| <= epsilon. All values are in nats.

#include <variant>

#include "cmimo/matrix_kernel.hpp"

namespace cmimo {

struct UncertaintyRegion {
  NormKind kind = NormKind::Spectral;
  double epsilon = 0.0;
};

/// tr(Q) <= budget.
struct SumPower {
  double budget = 1.0;
};

/// lambda_max(Q) <= cap.
struct MaxPower {
  double cap = 1.0;
};

using PowerConstraint = std::variant<SumPower, MaxPower>;

/// Throws InvalidArgument unless the budget/cap is positive and finite.
void validate(const PowerConstraint& constraint);
void validate(const UncertaintyRegion& region);

/// Channel singular values, covariance eigenvalues and SNR of the reduced
/// per-mode problem.
struct SpectrumPair {
  RealVector sigma;
  RealVector lambda;
  double gamma = 1.0;
};

/// sum_i ln(1 + gamma sigma_i^2 lambda_i).
double mode_objective(const RealVector& sigma, const RealVector& lambda, double gamma);

struct Allocation {
  RealVector lambda;
  double capacity = 0.0;
  double water_level = 0.0;  // sum-power only
  bool all_zero_channel = false;
};

/// sigma_i* = max(sigma0_i - epsilon, 0).
RealVector worst_case_sigma(const RealVector& sigma0, double epsilon);

/// Exact water-filling by active-set enumeration over the modes sorted by
/// gain. Modes with sigma_i == 0 get no power. An all-zero channel returns
/// lambda = 0 with `all_zero_channel` set.
Allocation waterfill_sum_power(const RealVector& sigma, double gamma, double budget);

/// Every mode with sigma_i > 0 is saturated at `cap`.
Allocation waterfill_max_power(const RealVector& sigma, double gamma, double cap);

/// Dispatches on the constraint.
Allocation allocate_power(const RealVector& sigma, double gamma,
                          const PowerConstraint& constraint);

/// Largest violation of the sum-power KKT system: stationarity on active
/// modes, the water level bound on inactive modes and the budget equality.
double waterfill_kkt_residual(const RealVector& sigma, double gamma, double budget,
                              const Allocation& allocation);

struct SaddleGaps {
  double max_side = 0.0;  // best response in lambda minus f(lambda*, sigma*)
  double min_side = 0.0;  // f(lambda*, sigma*) minus best response in sigma
};

inline constexpr double kSaddleTolerance = 1e-8;

SaddleGaps saddle_check(const RealVector& sigma_star, const RealVector& lambda_star,
                        const RealVector& sigma0, double epsilon, double gamma,
                        const PowerConstraint& constraint);

struct MinmaxOptions {
  int max_iterations = 20000;
  double stall_tolerance = 1e-10;  // objective decrease over `stall_window` steps
  int stall_window = 5;
  int projection_rounds = 200;
  double projection_tolerance = 1e-10;
};

struct MinmaxResult {
  double capacity = 0.0;
  RealVector sigma;
  RealVector lambda;
  int iterations = 0;
  bool converged = true;
};

/// Projection onto {sigma >= 0, ||sigma - center|| <= radius} for the vector
/// norm paired with `kind` (box for Spectral, Dykstra alternating projections
/// for Frobenius).
RealVector project_sigma_region(const RealVector& point, const RealVector& center,
                                double radius, NormKind kind,
                                const MinmaxOptions& options = {});

/// Projected descent on the value function sigma -> max_lambda f(lambda, sigma)
/// with envelope gradients and backtracking from a unit step. Restarted from
/// a few corners of the ball; the lowest end point wins.
MinmaxResult minmax_projected_descent(const RealVector& sigma0, NormKind kind,
                                      double epsilon, double gamma,
                                      const PowerConstraint& constraint,
                                      const MinmaxOptions& options = {});

/// Min over the channel ball of the channel's own capacity. Spectral uses the
/// closed-form saddle, Frobenius the projected descent. Nuclear throws
/// UnsupportedNorm.
MinmaxResult minmax_capacity(const ChannelMatrix& h0, const UncertaintyRegion& region,
                             double gamma, const PowerConstraint& constraint,
                             const MinmaxOptions& options = {});

struct CapacityReport {
  double c_maxmin = 0.0;
  double c_minmax = 0.0;
  double duality_gap = 0.0;
  SpectrumPair star;         // sigma*, lambda*, gamma
  RealVector sigma0;
  ComplexMatrix q_star;      // t x t
  ChannelMatrix h_star;      // r x t
  SaddleGaps saddle;
  bool saddle_certified = false;
  bool all_zero_channel = false;
  int solver_iterations = 0;
};

/// Max-min capacity for a spectral-norm region: SVD, worst-case singular
/// values, water-filling and Q* = V0 diag(lambda*) V0^H,
/// H* = U0 diag(sigma*) V0^H.
CapacityReport compound_capacity(const ChannelMatrix& h0, const UncertaintyRegion& region,
                                 double gamma, const PowerConstraint& constraint);

struct CapacityBounds {
  double lower = 0.0;
  double upper = 0.0;
  double alpha_low = 1.0;
  double alpha_high = 1.0;
};

/// Brackets the capacity for a Frobenius or nuclear region between the
/// spectral capacities at radii epsilon/alpha_low and epsilon/alpha_high.
CapacityBounds capacity_bounds_other_norm(const ChannelMatrix& h0, NormKind kind,
                                          double epsilon, double gamma,
                                          const PowerConstraint& constraint);

}  // namespace cmimo
