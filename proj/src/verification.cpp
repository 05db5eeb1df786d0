#include "cmimo/verification.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "cmimo/kernels.hpp"

namespace cmimo {

void validate(const VerificationConfig& cfg) {
  if (cfg.samples < 1) throw Error(ErrorCode::InvalidArgument, "samples: must be >= 1");
  if (!(cfg.tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance: must be > 0");
  if (!(cfg.grid_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid_step: must be > 0");
}

Check make_check(std::string name, double observed, double bound, CheckSense sense,
                 double tolerance) {
  Check c;
  c.name = std::move(name);
  c.observed = observed;
  c.bound = bound;
  c.sense = sense;
  c.margin = sense == CheckSense::AtLeast ? observed - bound : bound - observed;
  c.passed = c.margin >= -tolerance;
  return c;
}

bool VerificationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

namespace {

/// Diagonal of a real nonnegative diagonal matrix.
RealVector diagonal_entries(const ComplexMatrix& m, const char* name) {
  require_valid_channel(m, name);
  const Eigen::Index n = std::min(m.rows(), m.cols());
  RealVector d(n);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const Complex v = m(i, j);
      if (i != j && v != Complex(0.0, 0.0)) {
        throw Error(ErrorCode::ShapeError, std::string(name) + ": must be diagonal");
      }
      if (i == j && (v.imag() != 0.0 || v.real() < 0.0)) {
        throw Error(ErrorCode::ShapeError,
                    std::string(name) + ": diagonal entries must be real and >= 0");
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) d(i) = m(i, i).real();
  return d;
}

double relative_margin(double observed, double bound) {
  return (observed - bound) / std::max(1.0, std::abs(bound));
}

ChannelMatrix adversarial_candidate(const NominalDecomposition& dec, Eigen::Index rows,
                                    Eigen::Index cols, double epsilon, std::uint64_t seed,
                                    std::size_t k) {
  const std::uint64_t s = derive_seed(seed, k);
  if (k % 4 != 3) return sample_ball(rows, cols, epsilon, NormKind::Spectral, s);
  // Shrink along the nominal singular directions, occasionally flipping one.
  std::mt19937_64 rng(s);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  RealVector d(dec.singular.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double mag = epsilon * (0.99 + 0.01 * uniform(rng));
    d(i) = uniform(rng) < 0.8 ? -mag : mag;
  }
  return dec.left * diag_embed(d, rows, cols) * dec.right.adjoint();
}

template <bool Parallel>
AdversarialFloor floor_impl(const ChannelMatrix& h0, const ComplexMatrix& q, double epsilon,
                            double gamma, const VerificationConfig& cfg) {
  validate(cfg);
  require_valid_channel(h0, "adversarial_mi_floor: H0");
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon: must be >= 0");
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma: must be positive");
  if (q.rows() != h0.cols() || q.cols() != h0.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "adversarial_mi_floor: Q must be t x t");
  }
  if (!is_psd(q)) throw Error(ErrorCode::NotPSD, "adversarial_mi_floor: Q is not PSD");

  const NominalDecomposition dec = svd(h0);
  const Eigen::Index r = h0.rows();
  const Eigen::Index t = h0.cols();
  const ComplexMatrix factor = covariance_factor(q);

  const ScanRow row = [&](std::size_t k, std::span<double> out) {
    const ChannelMatrix delta = adversarial_candidate(dec, r, t, epsilon, cfg.seed, k);
    out[0] = log_det_factored(h0 + delta, factor, gamma);
  };
  const MinScan scan = Parallel ? min_scan(cfg.samples, 1, row, cfg.threads)
                                : serial::min_scan(cfg.samples, 1, row);

  AdversarialFloor out;
  out.samples = cfg.samples;
  out.min_sampled_mi = scan.minimum[0];
  const RealVector shrunk = (dec.singular.array() - epsilon).max(0.0).matrix();
  out.analytic_delta = dec.left * diag_embed(shrunk - dec.singular, r, t) * dec.right.adjoint();
  out.analytic_mi = log_det_capacity(h0 + out.analytic_delta, q, gamma);
  out.attained_by_analytic = out.analytic_mi <= out.min_sampled_mi;
  if (out.attained_by_analytic) {
    out.min_mi = out.analytic_mi;
    out.worst_delta = out.analytic_delta;
  } else {
    out.min_mi = out.min_sampled_mi;
    out.worst_delta = adversarial_candidate(dec, r, t, epsilon, cfg.seed, scan.argmin[0]);
  }
  return out;
}

}  // namespace

AdversarialFloor adversarial_mi_floor(const ChannelMatrix& h0, const ComplexMatrix& q,
                                      double epsilon, double gamma,
                                      const VerificationConfig& cfg) {
  return floor_impl<true>(h0, q, epsilon, gamma, cfg);
}

AdversarialFloor adversarial_mi_floor_serial(const ChannelMatrix& h0, const ComplexMatrix& q,
                                             double epsilon, double gamma,
                                             const VerificationConfig& cfg) {
  return floor_impl<false>(h0, q, epsilon, gamma, cfg);
}

ProductBoundResult lemma1_inequality_check(const ComplexMatrix& sigma, const ComplexMatrix& lambda,
                                     double epsilon, const VerificationConfig& cfg) {
  validate(cfg);
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon: must be >= 0");
  const RealVector s = diagonal_entries(sigma, "product_bound: Sigma");
  if (lambda.rows() != sigma.cols() || lambda.cols() != sigma.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "product_bound: Lambda must be t x t");
  }
  const RealVector d = diagonal_entries(lambda, "product_bound: Lambda");
  const Eigen::Index r = sigma.rows();
  const Eigen::Index t = sigma.cols();

  // Columns past min(r, t) carry a zero singular value and contribute 1.
  double log_bound = 0.0;
  RealVector shrunk = RealVector::Zero(s.size());
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    shrunk(j) = std::max(s(j) - epsilon, 0.0);
    log_bound += std::log1p(shrunk(j) * shrunk(j) * d(j));
  }

  ProductBoundResult out;
  out.bound = std::exp(log_bound);
  out.achiever = diag_embed(shrunk - s, r, t);
  const double achiever_log = log_det_capacity(sigma + out.achiever, lambda, 1.0);
  out.achiever_det = std::exp(achiever_log);

  ComplexMatrix factor = ComplexMatrix::Zero(t, t);
  for (Eigen::Index j = 0; j < t; ++j) factor(j, j) = std::sqrt(d(j));
  const MinScan scan = min_scan(
      cfg.samples, 1,
      [&](std::size_t k, std::span<double> row) {
        const ChannelMatrix delta =
            sample_ball(r, t, epsilon, NormKind::Spectral, derive_seed(cfg.seed, k));
        row[0] = log_det_factored(sigma + delta, factor, 1.0);
      },
      cfg.threads);
  out.min_sampled_det = std::exp(scan.minimum[0]);

  out.report.add(make_check("product_bound.sampled_log_det_above_bound", scan.minimum[0], log_bound,
                            CheckSense::AtLeast, cfg.tolerance));
  out.report.add(make_check("product_bound.achiever_log_det_gap", std::abs(achiever_log - log_bound),
                            1e-10, CheckSense::AtMost, 0.0));
  out.report.add(make_check("product_bound.achiever_in_ball", matrix_norm(out.achiever,
                                                                   NormKind::Spectral),
                            epsilon, CheckSense::AtMost, cfg.tolerance));
  return out;
}

VerificationReport singular_perturbation_check(const ComplexMatrix& sigma, double epsilon,
                                               const VerificationConfig& cfg) {
  validate(cfg);
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon: must be >= 0");
  const RealVector diag = diagonal_entries(sigma, "singular_perturbation: Sigma");
  const Eigen::Index r = sigma.rows();
  const Eigen::Index t = sigma.cols();
  RealVector sorted = diag;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  // Gram determinant bound over all t columns; padded columns give factor 0.
  double gram_bound = diag.size() < t ? 0.0 : 1.0;
  for (Eigen::Index j = 0; j < diag.size(); ++j) {
    const double m = std::max(diag(j) - epsilon, 0.0);
    gram_bound *= m * m;
  }

  const MinScan scan = min_scan(
      cfg.samples, 3,
      [&](std::size_t k, std::span<double> row) {
        const ChannelMatrix delta =
            sample_ball(r, t, epsilon, NormKind::Spectral, derive_seed(cfg.seed, k));
        const RealVector sv = singular_values(sigma + delta);
        double lower = std::numeric_limits<double>::infinity();
        double upper = lower;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
          lower = std::min(lower, sv(i) - std::max(sorted(i) - epsilon, 0.0));
          upper = std::min(upper, sorted(i) + epsilon - sv(i));
        }
        double gram_det = sv.size() < t ? 0.0 : 1.0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) gram_det *= sv(i) * sv(i);
        row[0] = lower;
        row[1] = upper;
        row[2] = relative_margin(gram_det, gram_bound);
      },
      cfg.threads);

  VerificationReport rep;
  rep.add(make_check("perturbation.singular_lower_margin", scan.minimum[0], 0.0, CheckSense::AtLeast,
                     cfg.tolerance));
  rep.add(make_check("perturbation.singular_upper_margin", scan.minimum[1], 0.0, CheckSense::AtLeast,
                     cfg.tolerance));
  rep.add(make_check("perturbation.gram_det_relative_margin", scan.minimum[2], 0.0,
                     CheckSense::AtLeast, cfg.tolerance));
  return rep;
}

VerificationReport submatrix_inequality_check(const ComplexMatrix& sigma, double epsilon,
                                              const VerificationConfig& cfg) {
  validate(cfg);
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon: must be >= 0");
  const RealVector diag = diagonal_entries(sigma, "submatrix: Sigma");
  const Eigen::Index r = sigma.rows();
  const Eigen::Index t = sigma.cols();
  if (t > 4) {
    throw Error(ErrorCode::DimensionTooLarge, "submatrix: subset enumeration needs t <= 4");
  }
  const unsigned subsets = 1u << t;

  const MinScan scan = min_scan(
      cfg.samples, 4,
      [&](std::size_t k, std::span<double> row) {
        const ChannelMatrix delta =
            sample_ball(r, t, epsilon, NormKind::Spectral, derive_seed(cfg.seed, k));
        const ChannelMatrix m = sigma + delta;
        const ComplexMatrix gram = m.adjoint() * m;
        const double delta_norm = matrix_norm(delta, NormKind::Spectral);
        std::fill(row.begin(), row.end(), std::numeric_limits<double>::infinity());

        for (unsigned mask = 1; mask < subsets; ++mask) {
          std::vector<Eigen::Index> cols_s;
          std::vector<Eigen::Index> rows_s;
          double bound = 1.0;
          for (Eigen::Index j = 0; j < t; ++j) {
            if (!(mask & (1u << j))) continue;
            cols_s.push_back(j);
            if (j < r) rows_s.push_back(j);
            const double s = j < diag.size() ? std::max(diag(j) - epsilon, 0.0) : 0.0;
            bound *= s * s;
          }
          const auto n = static_cast<Eigen::Index>(cols_s.size());
          ComplexMatrix gram_s(n, n);
          for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = 0; b < n; ++b) gram_s(a, b) = gram(cols_s[a], cols_s[b]);
          const double det_gram_s = gram_s.determinant().real();

          double det_cut = 0.0;
          double cut_norm = 0.0;
          if (!rows_s.empty()) {
            const auto nr = static_cast<Eigen::Index>(rows_s.size());
            ComplexMatrix cut(nr, n);
            ComplexMatrix delta_cut(nr, n);
            for (Eigen::Index a = 0; a < nr; ++a) {
              for (Eigen::Index b = 0; b < n; ++b) {
                cut(a, b) = m(rows_s[a], cols_s[b]);
                delta_cut(a, b) = delta(rows_s[a], cols_s[b]);
              }
            }
            det_cut = (cut.adjoint() * cut).determinant().real();
            cut_norm = matrix_norm(delta_cut, NormKind::Spectral);
          }
          row[0] = std::min(row[0], relative_margin(det_gram_s, bound));
          row[1] = std::min(row[1], relative_margin(det_cut, bound));
          row[2] = std::min(row[2], relative_margin(det_gram_s, det_cut));
          row[3] = std::min(row[3], delta_norm - cut_norm);
        }
      },
      cfg.threads);

  VerificationReport rep;
  rep.add(make_check("submatrix.principal_gram_det_margin", scan.minimum[0], 0.0,
                     CheckSense::AtLeast, cfg.tolerance));
  rep.add(make_check("submatrix.cut_gram_det_margin", scan.minimum[1], 0.0, CheckSense::AtLeast,
                     cfg.tolerance));
  rep.add(make_check("submatrix.principal_vs_cut_margin", scan.minimum[2], 0.0,
                     CheckSense::AtLeast, cfg.tolerance));
  rep.add(make_check("submatrix.submatrix_norm_contraction", scan.minimum[3], 0.0,
                     CheckSense::AtLeast, cfg.tolerance));
  return rep;
}

namespace {

template <bool Parallel>
GridOracle grid_impl(const RealVector& sigma0, double epsilon, double gamma,
                     const PowerConstraint& constraint, double grid_step, int threads) {
  const Eigen::Index n = sigma0.size();
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "grid_oracle: no modes");
  if (n > 3) {
    throw Error(ErrorCode::DimensionTooLarge, "grid_oracle: at most 3 modes, got " +
                                                  std::to_string(n));
  }
  if (!(grid_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid_step: must be > 0");
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon: must be >= 0");
  if (!(gamma > 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma: must be positive");
  validate(constraint);

  const bool sum = std::holds_alternative<SumPower>(constraint);
  const double total = sum ? std::get<SumPower>(constraint).budget
                           : std::get<MaxPower>(constraint).cap;
  GridOracle out;
  out.lambda_steps = static_cast<std::size_t>(std::ceil(total / grid_step));
  std::vector<double> lambdas(out.lambda_steps + 1);
  for (std::size_t k = 0; k <= out.lambda_steps; ++k) {
    lambdas[k] = total * static_cast<double>(k) / static_cast<double>(out.lambda_steps);
  }

  std::vector<std::vector<double>> tables;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lo = std::max(sigma0(i) - epsilon, 0.0);
    const double hi = sigma0(i) + epsilon;
    const auto points = static_cast<std::size_t>(std::ceil((hi - lo) / grid_step)) + 1;
    out.sigma_points = std::max(out.sigma_points, points);
    out.lipschitz = std::max(out.lipschitz, gamma * lo * lo);
    tables.push_back(Parallel ? grid_inner_table(lo, hi, points, lambdas, gamma, threads)
                              : serial::grid_inner_table(lo, hi, points, lambdas, gamma));
  }

  if (sum) {
    out.value = Parallel ? simplex_max(tables, out.lambda_steps, threads)
                         : serial::simplex_max(tables, out.lambda_steps);
  } else {
    // A box feasible set with a separable objective splits per mode.
    out.value = 0.0;
    for (const auto& table : tables) out.value += *std::max_element(table.begin(), table.end());
  }
  out.tolerance = 3.0 * grid_step * out.lipschitz;
  return out;
}

}  // namespace

GridOracle grid_oracle_maxmin(const RealVector& sigma0, double epsilon, double gamma,
                              const PowerConstraint& constraint, double grid_step,
                              int threads) {
  return grid_impl<true>(sigma0, epsilon, gamma, constraint, grid_step, threads);
}

GridOracle grid_oracle_maxmin_serial(const RealVector& sigma0, double epsilon, double gamma,
                                     const PowerConstraint& constraint, double grid_step) {
  return grid_impl<false>(sigma0, epsilon, gamma, constraint, grid_step, 1);
}

InstanceVerification verify_instance(const ChannelMatrix& h0, double epsilon, double gamma,
                                     const PowerConstraint& constraint,
                                     const VerificationConfig& cfg) {
  validate(cfg);
  InstanceVerification out;
  out.capacity = compound_capacity(h0, {NormKind::Spectral, epsilon}, gamma, constraint);
  const CapacityReport& cap = out.capacity;
  VerificationReport& rep = out.report;
  const Eigen::Index r = h0.rows();
  const Eigen::Index t = h0.cols();

  rep.add(make_check("duality.abs_gap", std::abs(cap.duality_gap), kSaddleTolerance,
                     CheckSense::AtMost, 0.0));
  rep.add(make_check("saddle.max_side_gap", cap.saddle.max_side, kSaddleTolerance,
                     CheckSense::AtMost, 0.0));
  rep.add(make_check("saddle.min_side_gap", cap.saddle.min_side, kSaddleTolerance,
                     CheckSense::AtMost, 0.0));

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(cap.q_star, Eigen::EigenvaluesOnly);
  rep.add(make_check("q_star.min_eigenvalue", eig.eigenvalues().minCoeff(), 0.0,
                     CheckSense::AtLeast, kDefaultPsdTolerance));
  if (const auto* p = std::get_if<SumPower>(&constraint)) {
    rep.add(make_check("q_star.trace", cap.q_star.trace().real(), p->budget,
                       CheckSense::AtMost, 1e-9 * std::max(1.0, p->budget)));
  } else {
    rep.add(make_check("q_star.max_eigenvalue", eig.eigenvalues().maxCoeff(),
                       std::get<MaxPower>(constraint).cap, CheckSense::AtMost,
                       1e-9 * std::max(1.0, std::get<MaxPower>(constraint).cap)));
  }
  rep.add(make_check("h_star.distance", matrix_norm(cap.h_star - h0, NormKind::Spectral),
                     epsilon, CheckSense::AtMost, 1e-9));

  out.floor = adversarial_mi_floor(h0, cap.q_star, epsilon, gamma, cfg);
  rep.add(make_check("floor.sampled_mi_above_capacity", out.floor.min_sampled_mi,
                     cap.c_maxmin, CheckSense::AtLeast, cfg.tolerance));
  rep.add(make_check("floor.analytic_mi_gap", std::abs(out.floor.analytic_mi - cap.c_maxmin),
                     cfg.tolerance, CheckSense::AtMost, 0.0));
  rep.min_observed_mi = out.floor.min_mi;
  rep.worst_delta = out.floor.worst_delta;

  const ComplexMatrix sigma_diag = diag_embed(cap.sigma0, r, t);
  RealVector lambda_full = RealVector::Zero(t);
  lambda_full.head(cap.star.lambda.size()) = cap.star.lambda;
  const ComplexMatrix lambda_diag = lambda_full.cast<Complex>().asDiagonal();
  for (Check& c : lemma1_inequality_check(sigma_diag, lambda_diag, epsilon, cfg).report.checks)
    rep.add(std::move(c));
  for (Check& c : singular_perturbation_check(sigma_diag, epsilon, cfg).checks)
    rep.add(std::move(c));
  if (t <= 4) {
    for (Check& c : submatrix_inequality_check(sigma_diag, epsilon, cfg).checks)
      rep.add(std::move(c));
  }

  if (cap.sigma0.size() <= 3) {
    // Keep the brute force affordable on wide regions by coarsening the grid.
    const double total = std::visit([](const auto& p) {
      if constexpr (std::is_same_v<std::decay_t<decltype(p)>, SumPower>) return p.budget;
      else return p.cap;
    }, constraint);
    double step = cfg.grid_step;
    auto cost = [&](double h) {
      const double lam = std::ceil(total / h) + 1;
      const double sig = std::ceil(2.0 * epsilon / h) + 1;
      const double outer = std::holds_alternative<SumPower>(constraint) && cap.sigma0.size() == 3
                               ? lam * lam / 2.0 : lam;
      return 3.0 * lam * sig + outer;
    };
    while (cost(step) > 1e8) step *= 2.0;
    const GridOracle grid =
        grid_oracle_maxmin(cap.sigma0, epsilon, gamma, constraint, step, cfg.threads);
    rep.add(make_check("grid_oracle.abs_diff", std::abs(grid.value - cap.c_maxmin),
                       grid.tolerance, CheckSense::AtMost, 1e-12));
  }
  return out;
}

}  // namespace cmimo
