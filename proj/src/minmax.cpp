#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <vector>

#include "cmimo/capacity.hpp"

namespace cmimo {

namespace {

RealVector clamp_nonnegative(const RealVector& x) { return x.cwiseMax(0.0); }

RealVector project_l2_ball(const RealVector& x, const RealVector& center, double radius) {
  const RealVector d = x - center;
  const double n = d.norm();
  if (n <= radius) return x;
  return center + (radius / n) * d;
}

struct DescentRun {
  double value = 0.0;
  RealVector sigma;
  RealVector lambda;
  int iterations = 0;
  bool converged = false;
};

DescentRun descend_from(const RealVector& start, const RealVector& sigma0, NormKind kind,
                        double epsilon, double gamma, const PowerConstraint& constraint,
                        const MinmaxOptions& opt) {
  DescentRun run;
  run.sigma = project_sigma_region(start, sigma0, epsilon, kind, opt);
  Allocation alloc = allocate_power(run.sigma, gamma, constraint);
  run.value = alloc.capacity;
  run.lambda = alloc.lambda;

  std::deque<double> history{run.value};
  const Eigen::Index n = sigma0.size();
  for (run.iterations = 0; run.iterations < opt.max_iterations; ++run.iterations) {
    // Envelope gradient: lambda frozen at its maximizer for the current sigma.
    RealVector grad(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = run.sigma(i);
      const double g = gamma * run.lambda(i);
      grad(i) = 2.0 * g * s / (1.0 + g * s * s);
    }
    if (grad.cwiseAbs().maxCoeff() == 0.0) {
      run.converged = true;
      return run;
    }

    bool accepted = false;
    double step = 1.0;
    for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
      const RealVector cand =
          project_sigma_region(run.sigma - step * grad, sigma0, epsilon, kind, opt);
      const double predicted = grad.dot(run.sigma - cand);
      if (halving == 0 && (cand - run.sigma).cwiseAbs().maxCoeff() == 0.0) break;
      const Allocation next = allocate_power(cand, gamma, constraint);
      if (next.capacity <= run.value - 1e-4 * predicted && next.capacity < run.value) {
        run.sigma = cand;
        run.value = next.capacity;
        run.lambda = next.lambda;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      run.converged = true;
      return run;
    }

    history.push_back(run.value);
    if (static_cast<int>(history.size()) > opt.stall_window) {
      if (history.front() - run.value < opt.stall_tolerance) {
        run.converged = true;
        ++run.iterations;
        return run;
      }
      history.pop_front();
    }
  }
  return run;
}

}  // namespace

RealVector project_sigma_region(const RealVector& point, const RealVector& center,
                                double radius, NormKind kind, const MinmaxOptions& options) {
  switch (kind) {
    case NormKind::Spectral: {
      RealVector out(point.size());
      for (Eigen::Index i = 0; i < point.size(); ++i) {
        const double lo = std::max(center(i) - radius, 0.0);
        out(i) = std::clamp(point(i), lo, center(i) + radius);
      }
      return out;
    }
    case NormKind::Frobenius: {
      // Dykstra's correction turns plain alternation into the exact projection.
      RealVector x = point;
      RealVector p = RealVector::Zero(point.size());
      RealVector q = RealVector::Zero(point.size());
      for (int round = 0; round < options.projection_rounds; ++round) {
        const RealVector y = project_l2_ball(x + p, center, radius);
        p = x + p - y;
        const RealVector next = clamp_nonnegative(y + q);
        q = y + q - next;
        const double moved = (next - x).cwiseAbs().maxCoeff();
        x = next;
        if (moved <= options.projection_tolerance) break;
      }
      // The center lies in the orthant, so pulling x into the ball keeps it there.
      return clamp_nonnegative(project_l2_ball(x, center, radius));
    }
    case NormKind::Nuclear:
      break;
  }
  throw Error(ErrorCode::UnsupportedNorm, "norm: nuclear min-max is not supported");
}

MinmaxResult minmax_projected_descent(const RealVector& sigma0, NormKind kind,
                                      double epsilon, double gamma,
                                      const PowerConstraint& constraint,
                                      const MinmaxOptions& options) {
  if (kind == NormKind::Nuclear) {
    throw Error(ErrorCode::UnsupportedNorm, "norm: nuclear min-max is not supported");
  }
  const Eigen::Index n = sigma0.size();
  std::vector<RealVector> starts{sigma0};
  if (epsilon > 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      RealVector s = sigma0;
      s(i) -= epsilon;
      starts.push_back(s);
    }
    const double spread =
        kind == NormKind::Spectral ? epsilon : epsilon / std::sqrt(static_cast<double>(n));
    starts.push_back((sigma0.array() - spread).matrix());
  }

  MinmaxResult best;
  best.capacity = std::numeric_limits<double>::infinity();
  best.converged = true;
  for (const RealVector& s : starts) {
    DescentRun run = descend_from(s, sigma0, kind, epsilon, gamma, constraint, options);
    best.iterations += run.iterations;
    best.converged = best.converged && run.converged;
    if (run.value < best.capacity) {
      best.capacity = run.value;
      best.sigma = std::move(run.sigma);
      best.lambda = std::move(run.lambda);
    }
  }
  return best;
}

MinmaxResult minmax_capacity(const ChannelMatrix& h0, const UncertaintyRegion& region,
                             double gamma, const PowerConstraint& constraint,
                             const MinmaxOptions& options) {
  validate(region);
  validate(constraint);
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::InvalidArgument, "gamma: must be positive");
  }
  if (region.kind == NormKind::Nuclear) {
    throw Error(ErrorCode::UnsupportedNorm,
                "norm: minmax supports spectral and frobenius regions, not nuclear");
  }
  const RealVector sigma0 = singular_values(h0);

  if (region.kind == NormKind::Spectral || region.epsilon == 0.0) {
    MinmaxResult out;
    out.sigma = worst_case_sigma(sigma0, region.epsilon);
    const Allocation alloc = allocate_power(out.sigma, gamma, constraint);
    out.lambda = alloc.lambda;
    out.capacity = alloc.capacity;
    return out;
  }
  return minmax_projected_descent(sigma0, region.kind, region.epsilon, gamma, constraint,
                                  options);
}

}  // namespace cmimo
