#include "cmimo/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace cmimo {

namespace {

bool positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

void validate(const PowerConstraint& constraint) {
  std::visit(overloaded{
                 [](const SumPower& p) {
                   if (!positive_finite(p.budget))
                     throw Error(ErrorCode::InvalidArgument,
                                 "constraint: sum-power budget must be positive");
                 },
                 [](const MaxPower& p) {
                   if (!positive_finite(p.cap))
                     throw Error(ErrorCode::InvalidArgument,
                                 "constraint: max-power cap must be positive");
                 },
             },
             constraint);
}

void validate(const UncertaintyRegion& region) {
  if (!(region.epsilon >= 0.0) || !std::isfinite(region.epsilon)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon: must be finite and >= 0");
  }
}

double mode_objective(const RealVector& sigma, const RealVector& lambda, double gamma) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    acc += std::log1p(gamma * sigma(i) * sigma(i) * lambda(i));
  }
  return acc;
}

RealVector worst_case_sigma(const RealVector& sigma0, double epsilon) {
  return (sigma0.array() - epsilon).max(0.0).matrix();
}

Allocation waterfill_sum_power(const RealVector& sigma, double gamma, double budget) {
  if (!positive_finite(gamma)) {
    throw Error(ErrorCode::InvalidArgument, "waterfill: gamma must be positive");
  }
  if (!positive_finite(budget)) {
    throw Error(ErrorCode::InvalidArgument, "waterfill: budget must be positive");
  }
  const Eigen::Index n = sigma.size();
  Allocation out;
  out.lambda = RealVector::Zero(n);

  // Inverse gains 1/(gamma sigma^2) of the usable modes, strongest first.
  std::vector<Eigen::Index> order;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sigma(i) > 0.0 && gamma * sigma(i) * sigma(i) > 0.0) order.push_back(i);
  }
  if (order.empty()) {
    out.all_zero_channel = true;
    return out;
  }
  auto inverse_gain = [&](Eigen::Index i) { return 1.0 / (gamma * sigma(i) * sigma(i)); };
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return inverse_gain(a) < inverse_gain(b);
  });

  // The active set is a prefix of `order`: take the longest prefix whose
  // water level still clears its weakest mode.
  double prefix = 0.0;
  double level = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double inv = inverse_gain(order[k]);
    const double candidate = (budget + prefix + inv) / static_cast<double>(k + 1);
    if (k > 0 && candidate <= inv) break;
    prefix += inv;
    level = candidate;
  }
  for (Eigen::Index i : order) out.lambda(i) = std::max(level - inverse_gain(i), 0.0);

  out.water_level = level;
  out.capacity = mode_objective(sigma, out.lambda, gamma);
  return out;
}

Allocation waterfill_max_power(const RealVector& sigma, double gamma, double cap) {
  if (!positive_finite(gamma)) {
    throw Error(ErrorCode::InvalidArgument, "waterfill: gamma must be positive");
  }
  if (!positive_finite(cap)) {
    throw Error(ErrorCode::InvalidArgument, "waterfill: cap must be positive");
  }
  Allocation out;
  out.lambda = RealVector::Zero(sigma.size());
  out.all_zero_channel = true;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > 0.0) {
      out.lambda(i) = cap;
      out.all_zero_channel = false;
    }
  }
  out.capacity = mode_objective(sigma, out.lambda, gamma);
  return out;
}

Allocation allocate_power(const RealVector& sigma, double gamma,
                          const PowerConstraint& constraint) {
  return std::visit(
      overloaded{
          [&](const SumPower& p) { return waterfill_sum_power(sigma, gamma, p.budget); },
          [&](const MaxPower& p) { return waterfill_max_power(sigma, gamma, p.cap); },
      },
      constraint);
}

double waterfill_kkt_residual(const RealVector& sigma, double gamma, double budget,
                              const Allocation& allocation) {
  if (allocation.all_zero_channel) return allocation.lambda.cwiseAbs().maxCoeff();
  double residual = std::abs(allocation.lambda.sum() - budget);
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    const double lam = allocation.lambda(i);
    if (!(sigma(i) > 0.0)) {
      residual = std::max(residual, std::abs(lam));
      continue;
    }
    const double inv = 1.0 / (gamma * sigma(i) * sigma(i));
    if (lam > 0.0) {
      residual = std::max(residual, std::abs(allocation.water_level - inv - lam));
    } else {
      residual = std::max(residual, std::max(allocation.water_level - inv, 0.0));
    }
  }
  return residual;
}

SaddleGaps saddle_check(const RealVector& sigma_star, const RealVector& lambda_star,
                        const RealVector& sigma0, double epsilon, double gamma,
                        const PowerConstraint& constraint) {
  const double value = mode_objective(sigma_star, lambda_star, gamma);
  SaddleGaps gaps;
  gaps.max_side = allocate_power(sigma_star, gamma, constraint).capacity - value;

  // Box minimization is separable and each term is monotone in sigma_i >= 0,
  // so each coordinate's minimum sits on one of the two box edges.
  double box_min = 0.0;
  for (Eigen::Index i = 0; i < sigma0.size(); ++i) {
    const double lo = std::max(sigma0(i) - epsilon, 0.0);
    const double hi = sigma0(i) + epsilon;
    const double g = gamma * lambda_star(i);
    box_min += std::min(std::log1p(g * lo * lo), std::log1p(g * hi * hi));
  }
  gaps.min_side = value - box_min;
  return gaps;
}

CapacityReport compound_capacity(const ChannelMatrix& h0, const UncertaintyRegion& region,
                                 double gamma, const PowerConstraint& constraint) {
  validate(region);
  validate(constraint);
  if (!positive_finite(gamma)) {
    throw Error(ErrorCode::InvalidArgument, "gamma: must be positive");
  }
  if (region.kind != NormKind::Spectral) {
    throw Error(ErrorCode::UnsupportedNorm,
                "norm: the closed-form capacity needs a spectral region; use minmax or "
                "bounds for " + std::string(to_string(region.kind)));
  }
  const NominalDecomposition dec = svd(h0);
  const Eigen::Index r = h0.rows();
  const Eigen::Index t = h0.cols();

  CapacityReport rep;
  rep.sigma0 = dec.singular;
  rep.star.gamma = gamma;
  rep.star.sigma = worst_case_sigma(dec.singular, region.epsilon);
  const Allocation alloc = allocate_power(rep.star.sigma, gamma, constraint);
  rep.star.lambda = alloc.lambda;
  rep.all_zero_channel = alloc.all_zero_channel;
  rep.c_maxmin = alloc.capacity;

  RealVector lambda_full = RealVector::Zero(t);
  lambda_full.head(alloc.lambda.size()) = alloc.lambda;
  rep.q_star = dec.right * lambda_full.cast<Complex>().asDiagonal() * dec.right.adjoint();
  rep.q_star = 0.5 * (rep.q_star + rep.q_star.adjoint());
  rep.h_star = dec.left * diag_embed(rep.star.sigma, r, t) * dec.right.adjoint();

  const MinmaxResult dual = minmax_capacity(h0, region, gamma, constraint);
  rep.c_minmax = dual.capacity;
  rep.duality_gap = rep.c_minmax - rep.c_maxmin;
  rep.solver_iterations = dual.iterations;

  rep.saddle = saddle_check(rep.star.sigma, rep.star.lambda, dec.singular, region.epsilon,
                            gamma, constraint);
  rep.saddle_certified = rep.saddle.max_side <= kSaddleTolerance &&
                         rep.saddle.min_side <= kSaddleTolerance &&
                         std::abs(rep.duality_gap) <= kSaddleTolerance;
  return rep;
}

CapacityBounds capacity_bounds_other_norm(const ChannelMatrix& h0, NormKind kind,
                                          double epsilon, double gamma,
                                          const PowerConstraint& constraint) {
  require_valid_channel(h0, "bounds: H0");
  const double modes = static_cast<double>(std::min(h0.rows(), h0.cols()));
  CapacityBounds b;
  switch (kind) {
    case NormKind::Spectral:
      throw Error(ErrorCode::UnsupportedNorm,
                  "norm: bounds are exact for spectral regions; use capacity instead");
    case NormKind::Frobenius:
      b.alpha_high = std::sqrt(modes);
      break;
    case NormKind::Nuclear:
      b.alpha_high = modes;
      break;
  }
  // alpha_l |||.|||_2 <= |||.||| <= alpha_h |||.|||_2: the larger spectral
  // ball (radius eps/alpha_l) gives the lower bound.
  b.lower = compound_capacity(h0, {NormKind::Spectral, epsilon / b.alpha_low}, gamma,
                              constraint).c_maxmin;
  b.upper = compound_capacity(h0, {NormKind::Spectral, epsilon / b.alpha_high}, gamma,
                              constraint).c_maxmin;
  if (b.lower > b.upper + 1e-12) {
    throw Error(ErrorCode::ConvergenceFailure, "bounds: lower bound exceeds upper bound");
  }
  return b;
}

}  // namespace cmimo
