// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "cmimo/capacity.hpp"
#include "cmimo/verification.hpp"

using namespace cmimo;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const Outcome& o, double seconds, double budget) {
  const bool in_time = seconds < budget;
  const bool ok = o.passed && in_time;
  if (!ok) ++failures;
  std::printf("[%s] %d %-34s %8.2fs (limit %gs)  %s%s\n", ok ? "PASS" : "FAIL", id, title, seconds,
              budget, o.detail.c_str(), in_time ? "" : "  [over time]");
  std::fflush(stdout);
}

template <class F>
void criterion(int id, const char* title, double budget, F&& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  report(id, title, o, std::chrono::duration<double>(Clock::now() - t0).count(), budget);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  ComplexMatrix complex(Eigen::Index r, Eigen::Index t) {
    std::normal_distribution<double> n(0.0, 1.0);
    ComplexMatrix m(r, t);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = {n(gen), n(gen)};
    return m;
  }
};

struct SpectralInstance {
  ChannelMatrix h0;
  double epsilon = 0.0;
  double gamma = 1.0;
  PowerConstraint constraint;
};

SpectralInstance random_spectral(Rng& rng, int max_dim, bool max_power, double radius_scale) {
  SpectralInstance in;
  in.h0 = rng.complex(rng.integer(1, max_dim), rng.integer(1, max_dim));
  in.epsilon = rng.uniform(0.0, radius_scale * singular_values(in.h0)(0));
  in.gamma = rng.log_uniform(0.01, 100.0);
  if (max_power) {
    in.constraint = MaxPower{rng.uniform(0.1, 3.0)};
  } else {
    in.constraint = SumPower{static_cast<double>(in.h0.cols()) * rng.uniform(0.2, 2.0)};
  }
  return in;
}

// Classic water-filling by bisection on the water level; independent of the
// library's active-set solver.
double classic_waterfill_capacity(const RealVector& s, double gamma, double budget) {
  auto spent = [&](double mu) {
    double acc = 0.0;
    for (double v : s)
      if (v > 0) acc += std::max(mu - 1.0 / (gamma * v * v), 0.0);
    return acc;
  };
  if (s.maxCoeff() <= 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (spent(hi) < budget) hi *= 2.0;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    (spent(mid) < budget ? lo : hi) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  double c = 0.0;
  for (double v : s)
    if (v > 0) c += std::log1p(gamma * v * v * std::max(mu - 1.0 / (gamma * v * v), 0.0));
  return c;
}

// Saddle bookkeeping shared by criteria 2, 3 and 8.
struct SaddleLedger {
  std::size_t runs = 0;
  double worst_gap = 0.0;
  std::size_t perturbations = 0;
  std::size_t nonpositive = 0;

  void record(const CapacityReport& rep, double epsilon, const PowerConstraint& pc) {
    ++runs;
    worst_gap = std::max({worst_gap, std::abs(rep.saddle.max_side), std::abs(rep.saddle.min_side)});
    const RealVector& ss = rep.star.sigma;
    const RealVector& ls = rep.star.lambda;
    const double g = rep.star.gamma;

    // Sum power: move 0.1 of mass (or less) between the two strongest active modes.
    if (std::holds_alternative<SumPower>(pc)) {
      std::vector<Eigen::Index> active;
      for (Eigen::Index i = 0; i < ls.size(); ++i)
        if (ls(i) > 0.0) active.push_back(i);
      if (active.size() >= 2) {
        const double step = std::min(0.1, ls(active[1]));
        RealVector moved = ls;
        moved(active[0]) += step;
        moved(active[1]) -= step;
        ++perturbations;
        if (!(saddle_check(ss, moved, rep.sigma0, epsilon, g, pc).max_side > 0.0)) ++nonpositive;
      }
    } else {
      // Max power: dropping power on an active mode is strictly worse.
      for (Eigen::Index i = 0; i < ls.size(); ++i) {
        if (ls(i) > 0.0) {
          RealVector lowered = ls;
          lowered(i) *= 0.9;
          ++perturbations;
          if (!(saddle_check(ss, lowered, rep.sigma0, epsilon, g, pc).max_side > 0.0)) ++nonpositive;
          break;
        }
      }
    }
    // Raise sigma* on an active mode while staying inside the box.
    if (epsilon > 0.0) {
      for (Eigen::Index i = 0; i < ls.size(); ++i) {
        if (ls(i) > 0.0) {
          RealVector up = ss;
          up(i) += std::min(0.1, epsilon);
          ++perturbations;
          if (!(saddle_check(up, ls, rep.sigma0, epsilon, g, pc).min_side > 0.0)) ++nonpositive;
          break;
        }
      }
    }
  }
};

}  // namespace

int main() {
  SaddleLedger saddle;

  criterion(1, "nuclear counterexample", 1.0, [] {
    const CounterexampleL1 ce = counterexample_l1();
    Outcome o;
    o.passed = std::abs(ce.diag_restricted_min - 15.63) <= 0.01 &&
               std::abs(ce.full_matrix_value - 15.5) <= 1e-9 &&
               ce.full_matrix_value < ce.diag_restricted_min && ce.full_below_diag;
    o.detail = fmt("diagonal min %.6f, full %.12f", ce.diag_restricted_min, ce.full_matrix_value);
    return o;
  });

  criterion(2, "zero duality gap (200 spectral)", 30.0, [&] {
    Rng rng(20260101);
    double worst = 0.0, worst_descent = 0.0;
    for (int k = 0; k < 200; ++k) {
      const SpectralInstance in = random_spectral(rng, 8, k % 2 == 1, 2.0);
      const CapacityReport rep =
          compound_capacity(in.h0, {NormKind::Spectral, in.epsilon}, in.gamma, in.constraint);
      saddle.record(rep, in.epsilon, in.constraint);
      const MinmaxResult mm =
          minmax_capacity(in.h0, {NormKind::Spectral, in.epsilon}, in.gamma, in.constraint);
      // Second, iterative route to the min-max value over the singular-value box.
      const MinmaxResult descent = minmax_projected_descent(
          rep.sigma0, NormKind::Spectral, in.epsilon, in.gamma, in.constraint);
      worst = std::max({worst, std::abs(mm.capacity - rep.c_maxmin),
                        std::abs(rep.c_minmax - rep.c_maxmin)});
      worst_descent = std::max(worst_descent, std::abs(descent.capacity - rep.c_maxmin));
    }
    Outcome o;
    o.passed = worst <= 1e-8 && worst_descent <= 1e-8;
    o.detail = fmt("max |gap| %.3g, descent route %.3g", worst, worst_descent);
    return o;
  });

  criterion(3, "worst-case floor (50 x 1e4 samples)", 300.0, [&] {
    Rng rng(20260102);
    double worst_sampled = INFINITY, worst_analytic = 0.0;
    int positive = 0;
    for (int k = 0; k < 50; ++k) {
      const SpectralInstance in = random_spectral(rng, 6, k % 2 == 1, 0.95);
      const CapacityReport rep =
          compound_capacity(in.h0, {NormKind::Spectral, in.epsilon}, in.gamma, in.constraint);
      saddle.record(rep, in.epsilon, in.constraint);
      VerificationConfig cfg;
      cfg.samples = 10000;
      cfg.seed = static_cast<std::uint64_t>(k);
      const AdversarialFloor f = adversarial_mi_floor(in.h0, rep.q_star, in.epsilon, in.gamma, cfg);
      if (rep.c_maxmin > 0.0) ++positive;
      worst_sampled = std::min(worst_sampled, f.min_sampled_mi - rep.c_maxmin);
      worst_analytic = std::max(worst_analytic, std::abs(f.analytic_mi - rep.c_maxmin));
    }
    Outcome o;
    o.passed = worst_sampled >= -1e-9 && worst_analytic <= 1e-9;
    o.detail = fmt("min(sampled - C) %.3g, max |analytic - C| %.3g, %g with C > 0", worst_sampled,
                   worst_analytic, positive);
    return o;
  });

  criterion(4, "product bound harness (100 diag)", 120.0, [] {
    Rng rng(20260103);
    int failed = 0, rectangular = 0;
    double worst_achiever = 0.0;
    for (int k = 0; k < 100; ++k) {
      const int r = rng.integer(1, 5), t = rng.integer(1, 5);
      if (r != t) ++rectangular;
      const int m = std::min(r, t);
      RealVector s(m), d(t);
      for (int i = 0; i < m; ++i) s(i) = rng.uniform(0.0, 3.0);
      std::sort(s.begin(), s.end(), std::greater<>());
      for (int j = 0; j < t; ++j) d(j) = rng.uniform(0.0, 5.0);
      const double eps = k % 10 == 0 ? 0.0 : rng.uniform(0.0, 1.2 * s(0));
      VerificationConfig cfg;
      cfg.samples = 4000;
      cfg.seed = static_cast<std::uint64_t>(k);
      const ProductBoundResult res =
          lemma1_inequality_check(diag_embed(s, r, t), diag_embed(d, t, t), eps, cfg);
      if (!res.report.all_passed()) ++failed;
      worst_achiever = std::max(worst_achiever, std::abs(res.achiever_det - res.bound) /
                                                    std::max(1.0, res.bound));
    }
    Outcome o;
    o.passed = failed == 0 && worst_achiever <= 1e-10 && rectangular > 0;
    o.detail = fmt("%g failing instances, %g rectangular, max achiever rel. gap %.3g", failed,
                   rectangular, worst_achiever);
    return o;
  });

  criterion(5, "submatrix inequalities (50, t<=4)", 120.0, [] {
    Rng rng(20260104);
    int failed = 0;
    for (int k = 0; k < 50; ++k) {
      const int r = rng.integer(1, 5), t = rng.integer(1, 4);
      const int m = std::min(r, t);
      RealVector s(m);
      for (int i = 0; i < m; ++i) s(i) = rng.uniform(0.0, 3.0);
      std::sort(s.begin(), s.end(), std::greater<>());
      VerificationConfig cfg;
      cfg.samples = 2000;
      cfg.seed = static_cast<std::uint64_t>(k);
      if (!submatrix_inequality_check(diag_embed(s, r, t), rng.uniform(0.0, 1.5), cfg).all_passed())
        ++failed;
    }
    Outcome o;
    o.passed = failed == 0;
    o.detail = fmt("%g failing instances", failed);
    return o;
  });

  criterion(6, "grid oracle equivalence (20, dim<=3)", 120.0, [] {
    Rng rng(20260105);
    int outside = 0, zero_cases = 0;
    double worst_ratio = 0.0, worst_classic = 0.0;
    for (int k = 0; k < 20; ++k) {
      const int n = rng.integer(1, 3);
      RealVector s(n);
      for (int i = 0; i < n; ++i) s(i) = rng.uniform(0.1, 2.5);
      std::sort(s.begin(), s.end(), std::greater<>());
      const bool zero = k % 4 == 0;
      const double eps = zero ? 0.0 : rng.uniform(0.0, 1.2 * s(0));
      const double gamma = rng.log_uniform(0.1, 10.0);
      const bool sum = k % 2 == 0;
      const double budget = rng.uniform(0.5, 3.0);
      const PowerConstraint pc = sum ? PowerConstraint{SumPower{budget}} : PowerConstraint{MaxPower{budget}};
      const double step = n == 3 ? 5e-3 : 1e-3;
      const CapacityReport rep = compound_capacity(diag_embed(s, n, n), {NormKind::Spectral, eps}, gamma, pc);
      const GridOracle g = grid_oracle_maxmin(s, eps, gamma, pc, step);
      const double diff = std::abs(g.value - rep.c_maxmin);
      if (diff > g.tolerance) ++outside;
      worst_ratio = std::max(worst_ratio, diff / g.tolerance);
      if (zero && sum) {
        ++zero_cases;
        worst_classic = std::max(worst_classic,
                                 std::abs(rep.c_maxmin - classic_waterfill_capacity(s, gamma, budget)));
      }
    }
    Outcome o;
    o.passed = outside == 0 && worst_classic <= 1e-9 && zero_cases > 0;
    o.detail = fmt("max |diff|/tol %.3g, eps=0 vs classic water-filling %.3g (%g cases)", worst_ratio,
                   worst_classic, zero_cases);
    return o;
  });

  criterion(7, "Frobenius bracket (20)", 120.0, [] {
    Rng rng(20260106);
    double worst = -INFINITY, tightest = INFINITY;
    int unconverged = 0;
    for (int k = 0; k < 20; ++k) {
      const ChannelMatrix h = rng.complex(rng.integer(1, 4), rng.integer(1, 4));
      const double eps = rng.uniform(0.0, 0.95 * singular_values(h)(0));
      const double gamma = rng.log_uniform(0.1, 10.0);
      const PowerConstraint pc = k % 2 ? PowerConstraint{MaxPower{rng.uniform(0.3, 2.0)}}
                                       : PowerConstraint{SumPower{static_cast<double>(h.cols())}};
      const CapacityBounds b = capacity_bounds_other_norm(h, NormKind::Frobenius, eps, gamma, pc);
      const MinmaxResult v = minmax_capacity(h, {NormKind::Frobenius, eps}, gamma, pc);
      if (!v.converged) ++unconverged;
      worst = std::max({worst, b.lower - v.capacity, v.capacity - b.upper});
      tightest = std::min(tightest, b.upper - b.lower);
    }
    Outcome o;
    o.passed = worst <= 1e-6;
    o.detail = fmt("max bracket violation %.3g, narrowest bracket %.3g, %g descents capped", worst,
                   tightest, unconverged);
    return o;
  });

  criterion(8, "saddle certificate", 1.0, [&] {
    Outcome o;
    o.passed = saddle.runs == 250 && saddle.worst_gap <= 1e-8 && saddle.perturbations > 0 &&
               saddle.nonpositive == 0;
    o.detail = fmt("%g runs, max gap %.3g, ", static_cast<double>(saddle.runs), saddle.worst_gap) +
               fmt("%g/%g perturbations strictly positive",
                   static_cast<double>(saddle.perturbations - saddle.nonpositive),
                   static_cast<double>(saddle.perturbations));
    return o;
  });

  std::printf("%d of 8 criteria failed\n", failures);
  return failures;
}
