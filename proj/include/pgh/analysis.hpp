#pragma once

// Diagnostics around the convergence theory: Monte-Carlo restricted
// isometry estimates, the assumption check with all derived constants,
// the iteration/gap bound arithmetic, and a high-accuracy reference
// optimum for objective-gap measurements.
//
// The RIP estimates are inner approximations: the minimum (maximum) ratio
// ||Ax||^2 / ||x||_u^2 over random restricted directions can only be larger
// (smaller) than the true lower (upper) constant. Every verdict computed
// from them is therefore optimistic and is a diagnostic, not a certificate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "pgh/errors.hpp"
#include "pgh/model_space.hpp"
#include "pgh/norms.hpp"
#include "pgh/random.hpp"
#include "pgh/solver.hpp"

namespace pgh {

struct RipEstimate {
  double k = 0.0;
  Index level = 0;  // floor(k), the K-level actually sampled
  double rho_minus_hat = 0.0;
  double rho_plus_hat = 0.0;
  int n_samples = 0;
  std::uint64_t seed = 0;
};

inline constexpr int kDefaultRipSamples = 2000;

/// Random direction with K(x) <= level: Gaussian entries on a random
/// support (l1), on random columns (l1,2), or a product of Gaussian factors
/// of inner dimension level (nuclear).
inline Vector sample_restricted_direction(const NormFamily& fam, Index level, Rng& rng) {
  detail::require(level >= 1 && level <= max_k(fam),
                  "sample_restricted_direction: level outside [1, max K]");
  return std::visit(
      overloaded{
          [&](const WeightedL1& f) -> Vector {
            Vector x = Vector::Zero(f.weights.size());
            for (Index i : random_subset(f.weights.size(), level, rng)) {
              x[i] = gaussian_matrix(1, 1, rng)(0, 0);
            }
            return x;
          },
          [&](const L12& f) -> Vector {
            Matrix x = Matrix::Zero(f.rows, f.cols);
            for (Index j : random_subset(f.cols, level, rng)) {
              x.col(j) = gaussian_matrix(f.rows, 1, rng);
            }
            return detail::flatten(x);
          },
          [&](const Nuclear& f) -> Vector {
            Matrix g1 = gaussian_matrix(f.rows, level, rng);
            Matrix g2 = gaussian_matrix(f.cols, level, rng);
            return detail::flatten(g1 * g2.transpose());
          },
      },
      fam);
}

namespace detail {

inline Index rip_level(const NormFamily& fam, double k) {
  require(std::isfinite(k) && k >= 1.0, "estimate_rip: k must be >= 1");
  const auto level = static_cast<Index>(std::floor(k));
  require(level <= max_k(fam), "estimate_rip: floor(k) exceeds the largest feasible K");
  return level;
}

}  // namespace detail

/// ||A x||^2 / ||x||_u^2 for each of n_samples random directions at the given
/// level; sample i uses a generator derived from (seed, level, i).
inline std::vector<double> sample_rip_ratios(const MeasurementOperator& op, const Metric& metric,
                                             const NormFamily& fam, double k, int n_samples,
                                             std::uint64_t seed) {
  detail::require(n_samples >= 1, "estimate_rip: n_samples must be >= 1");
  detail::require(op.cols() == ambient_dim(fam) && metric.dim() == op.cols(),
                  "estimate_rip: dimension mismatch");
  const Index level = detail::rip_level(fam, k);
  std::vector<double> ratios(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(level), static_cast<std::uint64_t>(i)));
    Vector x = sample_restricted_direction(fam, level, rng);
    double denom = inner(x, x, metric);
    while (!(denom > 0.0)) {  // measure-zero event; redraw from the same stream
      x = sample_restricted_direction(fam, level, rng);
      denom = inner(x, x, metric);
    }
    ratios[static_cast<std::size_t>(i)] = apply(op, x).squaredNorm() / denom;
  }
  return ratios;
}

inline RipEstimate estimate_rip(const MeasurementOperator& op, const Metric& metric,
                                const NormFamily& fam, double k,
                                int n_samples = kDefaultRipSamples, std::uint64_t seed = 0) {
  auto ratios = sample_rip_ratios(op, metric, fam, k, n_samples, seed);
  auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  return {k, detail::rip_level(fam, k), *lo, *hi, n_samples, seed};
}

/// Estimates at increasing levels where each level also reuses every sample
/// drawn for the lower levels, so rho_minus_hat is non-increasing and
/// rho_plus_hat non-decreasing along the profile.
inline std::vector<RipEstimate> estimate_rip_profile(const MeasurementOperator& op,
                                                     const Metric& metric,
                                                     const NormFamily& fam,
                                                     std::vector<double> levels,
                                                     int n_samples = kDefaultRipSamples,
                                                     std::uint64_t seed = 0) {
  std::sort(levels.begin(), levels.end());
  std::vector<RipEstimate> out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double k : levels) {
    RipEstimate e = estimate_rip(op, metric, fam, k, n_samples, seed);
    lo = std::min(lo, e.rho_minus_hat);
    hi = std::max(hi, e.rho_plus_hat);
    e.rho_minus_hat = lo;
    e.rho_plus_hat = hi;
    out.push_back(e);
  }
  return out;
}

struct AssumptionVerdicts {
  bool noise_bound_ok = false;   // ||A* z||_* <= lambda_tgt / 4
  bool rho_ratio_ok = false;     // rho-(c k0 (1+g)^2) / rho+(2 k~) > c / r
  bool rho_positive_ok = false;  // rho-(2 k~) > 0

  bool all() const { return noise_bound_ok && rho_ratio_ok && rho_positive_ok; }
};

struct AssumptionReport {
  // inputs
  double lambda_tgt = 0.0;
  double delta = 0.0;
  double r = 0.0;
  double gamma_inc = 0.0;
  // derived constants
  Index k0 = 0;
  double c = 0.0;
  double dual_noise = 0.0;
  double gamma = 0.0;
  double k_tilde = 0.0;
  double level_small = 0.0;  // c k0 (1+gamma)^2
  double level_large = 0.0;  // 2 k~ = 72 r c k0 (1+gamma) gamma_inc
  Index sampled_small = 0;   // levels actually sampled after clamping to [1, max K]
  Index sampled_large = 0;
  double rho_minus_small = 0.0;
  double rho_minus_large = 0.0;
  double rho_plus_large = 0.0;
  double rho_plus_one = 0.0;
  double kappa = 0.0;
  double rate = 0.0;
  double C = 0.0;
  AssumptionVerdicts verdicts;
  bool optimistic = true;  // estimates are Monte-Carlo inner approximations
};

inline double norm_constant_c(const NormFamily& fam) {
  return std::holds_alternative<Nuclear>(fam) ? 2.0 : 1.0;
}

/// gamma = (lambda (1 + delta) + d) / (lambda (1 - delta) - d), +inf when the
/// denominator is not positive.
inline double gamma_constant(double lambda_tgt, double delta, double dual_noise) {
  const double den = lambda_tgt * (1.0 - delta) - dual_noise;
  if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
  return (lambda_tgt * (1.0 + delta) + dual_noise) / den;
}

inline double k_tilde_constant(double r, double c, Index k0, double gamma, double gamma_inc) {
  return 36.0 * r * c * static_cast<double>(k0) * (1.0 + gamma) * gamma_inc;
}

inline double linear_rate(double gamma_inc, double kappa) {
  return 1.0 - 1.0 / (4.0 * gamma_inc * kappa);
}

/// C = 6 g_inc kappa delta c k0 (1+gamma) (sqrt(rho-(2k~)) + sqrt(rho+(1) kappa))^2
///     / rho-(c (1+gamma)^2 k0)
inline double iteration_constant(double gamma_inc, double kappa, double delta, double c,
                                 Index k0, double gamma, double rho_minus_large,
                                 double rho_plus_one, double rho_minus_small) {
  const double s = std::sqrt(rho_minus_large) + std::sqrt(rho_plus_one * kappa);
  return 6.0 * gamma_inc * kappa * delta * c * static_cast<double>(k0) * (1.0 + gamma) * s * s /
         rho_minus_small;
}

/// delta = min(1/4, (1 + delta') / eta - 1): the largest admissible delta
/// making (1 + delta') / (1 + delta) <= eta tight when possible.
inline double select_delta(double delta_prime, double eta) {
  return std::min(0.25, (1.0 + delta_prime) / eta - 1.0);
}

inline Index clamp_level(const NormFamily& fam, double level) {
  const double top = static_cast<double>(max_k(fam));
  if (!(level < top)) return max_k(fam);  // also catches +inf
  return std::max<Index>(1, static_cast<Index>(std::floor(level)));
}

/// Evaluates every quantity of the noise/RIP assumption for signal x0 and
/// noise z. Levels above the largest feasible K are clamped to it (the
/// restricted set is then the whole space).
inline AssumptionReport check_assumption(const MeasurementOperator& op, const Metric& metric,
                                         const NormFamily& fam, const Vector& x0, const Vector& z,
                                         double lambda_tgt, double delta, double r,
                                         double gamma_inc, std::uint64_t seed,
                                         int n_samples = kDefaultRipSamples) {
  detail::require(std::isfinite(r) && r > 1.0, "check_assumption: r must be > 1");
  detail::require(std::isfinite(delta) && delta > 0.0 && delta <= 0.25,
                  "check_assumption: delta must be in (0, 1/4]");
  detail::require(std::isfinite(lambda_tgt) && lambda_tgt > 0.0,
                  "check_assumption: lambda_tgt must be > 0");
  detail::require(std::isfinite(gamma_inc) && gamma_inc > 1.0,
                  "check_assumption: gamma_inc must be > 1");
  detail::check_family(fam, x0, "check_assumption");

  AssumptionReport rep;
  rep.lambda_tgt = lambda_tgt;
  rep.delta = delta;
  rep.r = r;
  rep.gamma_inc = gamma_inc;
  rep.k0 = k_of(fam, x0);
  rep.c = norm_constant_c(fam);
  rep.dual_noise = dual_norm_value(fam, adjoint_apply(op, z, metric));
  rep.gamma = gamma_constant(lambda_tgt, delta, rep.dual_noise);
  rep.k_tilde = k_tilde_constant(r, rep.c, rep.k0, rep.gamma, gamma_inc);
  rep.level_small = rep.c * static_cast<double>(rep.k0) * (1.0 + rep.gamma) * (1.0 + rep.gamma);
  rep.level_large = 2.0 * rep.k_tilde;
  rep.sampled_small = clamp_level(fam, rep.level_small);
  rep.sampled_large = clamp_level(fam, rep.level_large);

  const auto small = estimate_rip(op, metric, fam, static_cast<double>(rep.sampled_small),
                                  n_samples, seed);
  const auto large = estimate_rip(op, metric, fam, static_cast<double>(rep.sampled_large),
                                  n_samples, seed);
  const auto one = estimate_rip(op, metric, fam, 1.0, n_samples, seed);
  rep.rho_minus_small = small.rho_minus_hat;
  rep.rho_minus_large = large.rho_minus_hat;
  rep.rho_plus_large = large.rho_plus_hat;
  rep.rho_plus_one = one.rho_plus_hat;

  rep.kappa = rep.rho_minus_large > 0.0 ? rep.rho_plus_large / rep.rho_minus_large
                                        : std::numeric_limits<double>::infinity();
  rep.rate = linear_rate(gamma_inc, rep.kappa);
  rep.C = iteration_constant(gamma_inc, rep.kappa, delta, rep.c, rep.k0, rep.gamma,
                             rep.rho_minus_large, rep.rho_plus_one, rep.rho_minus_small);

  rep.verdicts.noise_bound_ok = rep.dual_noise <= lambda_tgt / 4.0;
  rep.verdicts.rho_ratio_ok = std::isfinite(rep.gamma) &&
                              rep.rho_minus_small / rep.rho_plus_large > rep.c / r;
  rep.verdicts.rho_positive_ok = rep.rho_minus_large > 0.0;
  return rep;
}

struct Theorem5Bounds {
  double kappa = 0.0;  // after the safety factor
  double rate = 0.0;
  double C = 0.0;
  int n_stages = 0;
  double per_stage_iterations = 0.0;
  double final_stage_iterations = 0.0;
  double total_iterations = 0.0;
  double gap_bound = 0.0;
  double eta_condition_lhs = 0.0;  // (1 + delta') / (1 + delta)
  bool eta_condition_ok = false;   // lhs <= eta
};

/// Iteration and gap bounds for the homotopy method from an assumption
/// report. kappa_safety multiplies kappa before use, compensating for the
/// optimistic RIP estimates.
inline Theorem5Bounds theorem5_bounds(const AssumptionReport& rep, double delta_prime, double eta,
                                      double epsilon, double lambda0, double lambda_tgt,
                                      double kappa_safety = 1.0) {
  detail::require(std::isfinite(kappa_safety) && kappa_safety >= 1.0,
                  "theorem5_bounds: kappa_safety must be >= 1");
  detail::require(epsilon > 0.0 && lambda0 > 0.0 && lambda_tgt > 0.0,
                  "theorem5_bounds: epsilon and lambdas must be > 0");
  Theorem5Bounds out;
  out.kappa = rep.kappa * kappa_safety;
  out.rate = linear_rate(rep.gamma_inc, out.kappa);
  if (!(out.rate > 0.0)) throw numerical_error("theorem5_bounds: rate <= 0, bound undefined");
  out.C = iteration_constant(rep.gamma_inc, out.kappa, rep.delta, rep.c, rep.k0, rep.gamma,
                             rep.rho_minus_large, rep.rho_plus_one, rep.rho_minus_small);
  const double log_inv_rate = -std::log(out.rate);
  const double inf = std::numeric_limits<double>::infinity();
  const double delta = rep.delta;
  out.n_stages = stage_count(lambda0, lambda_tgt, eta);
  out.per_stage_iterations =
      log_inv_rate > 0.0 ? std::log(out.C / (delta * delta)) / log_inv_rate : inf;
  out.final_stage_iterations =
      log_inv_rate > 0.0 ? std::log(out.C * lambda_tgt / (epsilon * epsilon)) / log_inv_rate : inf;
  out.total_iterations =
      log_inv_rate > 0.0
          ? (std::log(out.C * lambda_tgt / (epsilon * epsilon)) +
             (std::log(lambda_tgt / lambda0) / std::log(eta)) * std::log(out.C / (delta * delta))) /
                log_inv_rate
          : inf;
  out.gap_bound = 9.0 * rep.c * static_cast<double>(rep.k0) * lambda_tgt * (1.0 + rep.gamma) *
                  epsilon / rep.rho_minus_small;
  out.eta_condition_lhs = (1.0 + delta_prime) / (1.0 + delta);
  out.eta_condition_ok = out.eta_condition_lhs <= eta * (1.0 + 1e-12);
  return out;
}

struct ReferenceOptimum {
  double value;
  Vector x;
};

/// Best objective value reached by restarted accelerated proximal gradient
/// run until its stopping quantity is <= tol. tol = 0 selects 1e-12 lambda.
inline ReferenceOptimum reference_optimum(const LeastSquaresProblem& problem,
                                          const NormFamily& fam, double lambda,
                                          double tol = 0.0, int max_iters = 200000) {
  detail::require(std::isfinite(lambda) && lambda > 0.0, "reference_optimum: lambda must be > 0");
  detail::require(std::isfinite(tol) && tol >= 0.0, "reference_optimum: tol must be > 0");
  if (tol == 0.0) tol = 1e-12 * lambda;
  HomotopyParams params;
  params.max_stage_iters = max_iters;
  params.max_total_iters = max_iters;
  double best = std::numeric_limits<double>::infinity();
  Vector best_x;
  IterateObserver keep_best = [&](const TraceRecord& rec, const Vector& x) {
    if (rec.objective < best) {
      best = rec.objective;
      best_x = x;
    }
  };
  baseline_apg(problem, fam, lambda, tol, params, keep_best, AcceleratedOptions{true});
  return {best, std::move(best_x)};
}

}  // namespace pgh
