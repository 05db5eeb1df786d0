#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cmimo/kernels.hpp"
#include "cmimo/verification.hpp"

namespace cmimo {

namespace {

double log_diag_objective(const RealVector& s, const RealVector& d, const RealVector& delta) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    const double v = s(j) + delta(j);
    acc += std::log1p(v * v * d(j));
  }
  return acc;
}

/// Point on the arc of a coordinate pair holding its share of the norm budget.
std::pair<double, double> pair_point(double budget, double x, NormKind kind) {
  if (kind == NormKind::Frobenius) {
    const double theta = x * 0.5 * M_PI;
    return {-budget * std::cos(theta), -budget * std::sin(theta)};
  }
  return {-budget * (1.0 - x), -budget * x};
}

double pair_position(double a, double b, NormKind kind) {
  if (kind == NormKind::Frobenius) return std::atan2(-b, -a) / (0.5 * M_PI);
  const double total = std::abs(a) + std::abs(b);
  return total > 0.0 ? std::abs(b) / total : 0.0;
}

/// Pairwise exchange sweeps starting from `delta` (already on the boundary).
void exchange_sweeps(const RealVector& s, const RealVector& d, NormKind kind,
                     RealVector& delta) {
  const Eigen::Index m = s.size();
  double current = log_diag_objective(s, d, delta);
  for (int sweep = 0; sweep < 200; ++sweep) {
    const double before = current;
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i + 1; j < m; ++j) {
        const double budget = kind == NormKind::Frobenius
                                  ? std::hypot(delta(i), delta(j))
                                  : std::abs(delta(i)) + std::abs(delta(j));
        if (budget == 0.0) continue;
        auto pair_cost = [&](double x) {
          const auto [a, b] = pair_point(budget, x, kind);
          const double vi = s(i) + a;
          const double vj = s(j) + b;
          return std::log1p(vi * vi * d(i)) + std::log1p(vj * vj * d(j));
        };
        constexpr int kGrid = 256;
        double best_x = pair_position(delta(i), delta(j), kind);
        double best = pair_cost(best_x);
        int best_k = -1;
        for (int k = 0; k <= kGrid; ++k) {
          const double x = static_cast<double>(k) / kGrid;
          const double c = pair_cost(x);
          if (c < best) { best = c; best_x = x; best_k = k; }
        }
        if (best_k >= 0) {
          // Golden-section polish inside the neighbouring grid cells.
          double lo = std::max(0.0, best_x - 1.0 / kGrid);
          double hi = std::min(1.0, best_x + 1.0 / kGrid);
          const double g = 0.5 * (std::sqrt(5.0) - 1.0);
          for (int it = 0; it < 60; ++it) {
            const double x1 = hi - g * (hi - lo);
            const double x2 = lo + g * (hi - lo);
            if (pair_cost(x1) < pair_cost(x2)) hi = x2; else lo = x1;
          }
          const double x = 0.5 * (lo + hi);
          if (pair_cost(x) < best) { best = pair_cost(x); best_x = x; }
        }
        const auto [a, b] = pair_point(budget, best_x, kind);
        RealVector trial = delta;
        trial(i) = a;
        trial(j) = b;
        const double value = log_diag_objective(s, d, trial);
        if (value < current) {
          delta = trial;
          current = value;
        }
      }
    }
    if (before - current <= 1e-15 * std::max(1.0, std::abs(current))) break;
  }
}

}  // namespace

DiagonalMinimum diagonal_determinant_min(const RealVector& s, const RealVector& d,
                                         double epsilon, NormKind kind) {
  if (s.size() != d.size()) {
    throw Error(ErrorCode::DimensionMismatch, "diagonal_min: s and d differ in length");
  }
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon: must be >= 0");
  const Eigen::Index m = s.size();
  DiagonalMinimum out;

  if (spectrum_norm(s, kind) <= epsilon) {
    out.delta = -s;
    out.value = std::exp(log_diag_objective(s, d, out.delta));
    return out;
  }
  if (kind == NormKind::Spectral || m <= 1) {
    // Separable box (or a scalar): shrink every entry independently.
    out.delta = (s.array() - epsilon).max(0.0).matrix() - s;
    out.value = std::exp(log_diag_objective(s, d, out.delta));
    return out;
  }

  std::vector<RealVector> starts;
  starts.push_back(-epsilon * s / spectrum_norm(s, kind));
  for (Eigen::Index i = 0; i < m; ++i) {
    RealVector e = RealVector::Zero(m);
    e(i) = -epsilon;
    starts.push_back(e);
  }
  double best = std::numeric_limits<double>::infinity();
  for (RealVector& start : starts) {
    exchange_sweeps(s, d, kind, start);
    const double v = log_diag_objective(s, d, start);
    if (v < best) {
      best = v;
      out.delta = start;
    }
  }
  out.value = std::exp(best);
  return out;
}

double lemma_margin(const RealVector& s, const RealVector& d, Eigen::Index rows,
                    Eigen::Index cols, double epsilon, NormKind kind, std::uint64_t seed,
                    const LemmaSearchOptions& options, ChannelMatrix* best_delta) {
  const Eigen::Index m = std::min(rows, cols);
  if (s.size() != m || d.size() != cols) {
    throw Error(ErrorCode::DimensionMismatch,
                "lemma_margin: need min(r,t) singular values and t powers");
  }
  const ComplexMatrix sigma = diag_embed(s, rows, cols);
  ComplexMatrix factor = ComplexMatrix::Zero(cols, cols);
  for (Eigen::Index j = 0; j < cols; ++j) factor(j, j) = std::sqrt(d(j));
  auto objective = [&](const ChannelMatrix& delta) {
    return log_det_factored(sigma + delta, factor, 1.0);
  };

  const DiagonalMinimum diag = diagonal_determinant_min(s, d.head(m), epsilon, kind);
  const ChannelMatrix diag_delta = diag_embed(diag.delta, rows, cols);

  const MinScan scan = min_scan(
      options.samples_per_trial, 1,
      [&](std::size_t k, std::span<double> row) {
        row[0] = objective(sample_ball(rows, cols, epsilon, kind, derive_seed(seed, k)));
      },
      options.threads);

  // Random local search from the best sample and from the diagonal optimum.
  auto refine = [&](ChannelMatrix start, std::uint64_t stream) {
    double value = objective(start);
    for (std::size_t k = 0; k < options.refine_steps; ++k) {
      const double scale =
          0.25 * epsilon * (1.0 - static_cast<double>(k) / static_cast<double>(options.refine_steps));
      ChannelMatrix cand =
          start + scale * sample_ball(rows, cols, 1.0, kind, derive_seed(stream, k));
      const double n = matrix_norm(cand, kind);
      if (n > epsilon) cand *= epsilon / n;
      while (matrix_norm(cand, kind) > epsilon) cand *= 1.0 - 1e-15;
      const double v = objective(cand);
      if (v < value) {
        value = v;
        start = std::move(cand);
      }
    }
    return std::pair{value, start};
  };

  std::pair<double, ChannelMatrix> best{std::numeric_limits<double>::infinity(), {}};
  if (epsilon > 0.0) {
    const ChannelMatrix sampled = sample_ball(rows, cols, epsilon, kind,
                                              derive_seed(seed, scan.argmin[0]));
    for (auto&& candidate : {refine(sampled, derive_seed(seed, ~0ULL)),
                             refine(diag_delta, derive_seed(seed, ~1ULL))}) {
      if (candidate.first < best.first) best = candidate;
    }
  } else {
    best = {objective(diag_delta), diag_delta};
  }
  if (best_delta) *best_delta = best.second;
  return diag.value - std::exp(best.first);
}

LemmaSearchResult lemma_search(NormKind kind, Eigen::Index rows, Eigen::Index cols,
                               std::size_t trials, std::uint64_t seed,
                               const LemmaSearchOptions& options) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials: must be >= 1");
  if (rows < 1 || cols < 1) throw Error(ErrorCode::ShapeError, "search: bad dimensions");
  const Eigen::Index m = std::min(rows, cols);
  LemmaSearchResult out;
  out.kind = kind;
  out.trials = trials;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(derive_seed(seed, trial));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    RealVector s(m);
    for (Eigen::Index j = 0; j < m; ++j) s(j) = options.max_singular * uniform(rng);
    std::sort(s.begin(), s.end(), std::greater<>());
    RealVector d(cols);
    for (Eigen::Index j = 0; j < cols; ++j) d(j) = options.max_power * uniform(rng);
    const double eps = options.zero_epsilon ? 0.0 : options.max_epsilon * uniform(rng);

    ChannelMatrix delta;
    const double margin = lemma_margin(s, d, rows, cols, eps, kind,
                                       derive_seed(seed ^ 0x5eed5eedULL, trial), options, &delta);
    if (margin > options.tolerance && margin > out.best_margin) {
      out.best_margin = margin;
      out.best_trial = trial;
      out.best_s = s;
      out.best_d = d;
      out.best_epsilon = eps;
      out.best_delta = delta;
    }
  }
  return out;
}

LemmaSearchResult frobenius_lemma_search(Eigen::Index rows, Eigen::Index cols,
                                         std::size_t trials, std::uint64_t seed,
                                         const LemmaSearchOptions& options) {
  return lemma_search(NormKind::Frobenius, rows, cols, trials, seed, options);
}

}  // namespace cmimo
