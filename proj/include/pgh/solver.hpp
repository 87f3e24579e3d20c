#pragma once

// Proximal-gradient machinery for
//     minimize  phi_lambda(x) = 1/2 ||Ax - b||^2 + lambda ||x||
// with a decomposable norm: the doubling line search, the proximal-gradient
// stage with its residual-based stopping rule, the homotopy continuation
// over lambda, and the fixed-lambda PG / accelerated PG / SVP baselines.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pgh/errors.hpp"
#include "pgh/model_space.hpp"
#include "pgh/norms.hpp"

namespace pgh {

struct HomotopyParams {
  double lambda_tgt = 0.0;
  double epsilon = 1e-6;
  double eta = 0.6;
  double delta_prime = 0.2;
  double l_min = 1e-6;
  double gamma_inc = 2.0;
  double gamma_dec = 2.0;
  int max_stage_iters = 10000;
  int max_total_iters = 100000;
  int max_backtracks = 200;

  bool operator==(const HomotopyParams&) const = default;

  /// Throws contract_error when a field is out of range. lambda_tgt is
  /// only checked when require_lambda is set, so baselines can reuse the
  /// remaining fields.
  void validate(bool require_lambda = true) const {
    auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (require_lambda) detail::require(finite_pos(lambda_tgt), "params: lambda_tgt must be > 0");
    detail::require(finite_pos(epsilon), "params: epsilon must be > 0");
    detail::require(std::isfinite(eta) && eta > 0.0 && eta < 1.0, "params: eta must be in (0,1)");
    detail::require(std::isfinite(delta_prime) && delta_prime > 0.0 && delta_prime < 1.0,
                    "params: delta_prime must be in (0,1)");
    detail::require(finite_pos(l_min), "params: l_min must be > 0");
    detail::require(std::isfinite(gamma_inc) && gamma_inc > 1.0, "params: gamma_inc must be > 1");
    detail::require(std::isfinite(gamma_dec) && gamma_dec >= 1.0, "params: gamma_dec must be >= 1");
    detail::require(max_stage_iters > 0 && max_total_iters > 0 && max_backtracks > 0,
                    "params: iteration caps must be positive");
  }
};

struct TraceRecord {
  int stage = 0;
  double lambda = 0.0;
  int iter_stage = 0;
  int iter_global = 0;
  double objective = 0.0;      // phi at the record's lambda
  double stop_quantity = 0.0;  // residual bound on omega at the iterate
  Index k = 0;
  double step_constant = 0.0;  // accepted line-search constant M
  double elapsed_ms = 0.0;
};

struct IterateTrace {
  std::vector<TraceRecord> records;

  int total_iterations() const { return records.empty() ? 0 : records.back().iter_global; }
};

/// Called once per logged iterate (including the initial point).
using IterateObserver = std::function<void(const TraceRecord&, const Vector&)>;

class iteration_limit_error : public std::runtime_error {
 public:
  iteration_limit_error(const std::string& what, IterateTrace trace, Vector last)
      : std::runtime_error(what), trace_(std::move(trace)), last_(std::move(last)) {}

  const IterateTrace& trace() const { return trace_; }
  const Vector& last_iterate() const { return last_; }

 private:
  IterateTrace trace_;
  Vector last_;
};

struct SolveResult {
  Vector x;
  double step_constant = 0.0;
  IterateTrace trace;
};

struct HomotopyResult {
  Vector x;
  double step_constant = 0.0;
  double lambda0 = 0.0;
  int intermediate_stages = 0;
  IterateTrace trace;
};

struct BacktrackResult {
  Vector x;
  double step_constant;
};

/// phi_lambda(x) = f(x) + lambda ||x||
inline double objective(const LeastSquaresProblem& problem, const NormFamily& fam, double lambda,
                        const Vector& x) {
  return loss(problem, x).value + lambda * norm_value(fam, x);
}

/// m_{lambda,L}(y, x) = f(y) + <grad f(y), x - y> + L/2 ||x - y||^2 + lambda ||x||
inline double model_value(const LeastSquaresProblem& problem, const NormFamily& fam,
                          double lambda, double L, const Vector& y, const Vector& x) {
  detail::require(std::isfinite(L) && L > 0.0, "model_value: L must be > 0");
  detail::require(std::isfinite(lambda) && lambda >= 0.0, "model_value: lambda must be >= 0");
  const auto fy = value_and_gradient(problem, y);
  const Vector d = x - y;
  const Metric& B = problem.metric();
  return fy.value + inner(fy.gradient, d, B) + 0.5 * L * inner(d, d, B) +
         lambda * norm_value(fam, x);
}

/// Prox_{lambda,L}(y) = prox(y - grad f(y) / L, lambda / L)
inline Vector prox_step(const LeastSquaresProblem& problem, const NormFamily& fam,
                        double lambda, double L, const Vector& y) {
  detail::require(std::isfinite(L) && L > 0.0, "prox_step: L must be > 0");
  detail::require(std::isfinite(lambda) && lambda >= 0.0, "prox_step: lambda must be >= 0");
  const auto fy = value_and_gradient(problem, y);
  return prox(fam, y - fy.gradient / L, lambda / L);
}

/// Index of the last homotopy stage before the final one:
/// floor(log(lambda_tgt / lambda0) / log(eta)), clamped at zero.
inline int stage_count(double lambda0, double lambda_tgt, double eta) {
  detail::require(lambda0 > 0.0 && lambda_tgt > 0.0, "stage_count: lambdas must be > 0");
  detail::require(eta > 0.0 && eta < 1.0, "stage_count: eta must be in (0,1)");
  const double n = std::floor(std::log(lambda_tgt / lambda0) / std::log(eta));
  return n > 0.0 ? static_cast<int>(n) : 0;
}

namespace detail {

inline void check_compatible(const LeastSquaresProblem& problem, const NormFamily& fam) {
  require(ambient_dim(fam) == problem.dim(), "solver: norm family dimension != problem dimension");
  require(metric_for(fam) == problem.metric(),
          "solver: problem metric is not the norm family's compatible metric");
}

/// Iterate state with the cached residual Ax - b and gradient.
struct Point {
  Vector x;
  Vector residual;
  Vector gradient;
  double f = 0.0;
};

inline Point make_point(const LeastSquaresProblem& problem, Vector x) {
  auto [f, r] = loss(problem, x);
  Vector g = gradient_from_residual(problem, r);
  return {std::move(x), std::move(r), std::move(g), f};
}

struct StepResult {
  Vector x;
  Vector residual;
  double step_constant;
};

/// Doubling search for L until
///   f(x+) <= f(y) + <grad f(y), x+ - y> + L/2 ||x+ - y||^2,
/// which for the quadratic loss is ||A(x+ - y)||^2 <= L ||x+ - y||_u^2.
inline StepResult backtrack_from(const LeastSquaresProblem& problem, const NormFamily& fam,
                                 double lambda, const Point& y, double L,
                                 const HomotopyParams& params) {
  const Metric& B = problem.metric();
  for (int d = 0; d <= params.max_backtracks; ++d) {
    Vector x_next = prox(fam, y.x - y.gradient / L, lambda / L);
    const Vector step = x_next - y.x;
    Vector r_next = problem.op().matrix() * x_next - problem.b();
    if (!r_next.allFinite()) throw numerical_error("backtrack: non-finite residual");
    const double curvature = (r_next - y.residual).squaredNorm();
    if (curvature <= L * inner(step, step, B)) {
      return {std::move(x_next), std::move(r_next), L};
    }
    L *= params.gamma_inc;
  }
  throw numerical_error("backtrack: exceeded " + std::to_string(params.max_backtracks) +
                        " increases of L");
}

/// Shared bookkeeping for a run: trace, observer, clock and global counter.
class RunLog {
 public:
  RunLog(const NormFamily& fam, const HomotopyParams& params, const IterateObserver* observer)
      : fam_(fam), params_(params), observer_(observer),
        start_(std::chrono::steady_clock::now()) {}

  void log(int stage, double lambda, int iter_stage, double objective, double stop,
           double step_constant, const Vector& x) {
    TraceRecord rec;
    rec.stage = stage;
    rec.lambda = lambda;
    rec.iter_stage = iter_stage;
    rec.iter_global = global_;
    rec.objective = objective;
    rec.stop_quantity = stop;
    rec.k = k_of(fam_, x);
    rec.step_constant = step_constant;
    rec.elapsed_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start_)
                         .count();
    trace_.records.push_back(rec);
    if (observer_ != nullptr && *observer_) (*observer_)(rec, x);
  }

  /// Advances the global counter; throws when the total cap is reached.
  void tick(const Vector& current) {
    if (global_ >= params_.max_total_iters) {
      throw iteration_limit_error("total iteration limit of " +
                                      std::to_string(params_.max_total_iters) + " reached",
                                  trace_, current);
    }
    ++global_;
  }

  void check_stage(int iter_stage, const Vector& current) const {
    if (iter_stage > params_.max_stage_iters) {
      throw iteration_limit_error("stage iteration limit of " +
                                      std::to_string(params_.max_stage_iters) + " reached",
                                  trace_, current);
    }
  }

  IterateTrace take() { return std::move(trace_); }

 private:
  const NormFamily& fam_;
  const HomotopyParams& params_;
  const IterateObserver* observer_;
  std::chrono::steady_clock::time_point start_;
  IterateTrace trace_;
  int global_ = 0;
};

struct StageOutcome {
  Point point;
  double step_constant;
};

inline StageOutcome run_stage(const LeastSquaresProblem& problem, const NormFamily& fam,
                              double lambda, Point start, double L0, double tol,
                              const HomotopyParams& params, int stage, RunLog& log) {
  Point current = std::move(start);
  double L = L0;
  double M = L0;
  for (int t = 1;; ++t) {
    log.check_stage(t, current.x);
    log.tick(current.x);
    StepResult step = backtrack_from(problem, fam, lambda, current, L, params);
    M = step.step_constant;
    Vector g_next = gradient_from_residual(problem, step.residual);
    const double stop =
        dual_norm_value(fam, M * (current.x - step.x) + g_next - current.gradient);
    L = std::max(params.l_min, M / params.gamma_dec);
    current.f = 0.5 * step.residual.squaredNorm();
    current.x = std::move(step.x);
    current.residual = std::move(step.residual);
    current.gradient = std::move(g_next);
    log.log(stage, lambda, t, current.f + lambda * norm_value(fam, current.x), stop, M,
            current.x);
    if (stop <= tol) break;
  }
  return {std::move(current), M};
}

}  // namespace detail

/// Subroutine-2 style line search from x with starting constant L. Returns
/// x+ = Prox_{lambda,M}(x) and the accepted constant M.
inline BacktrackResult backtrack(const LeastSquaresProblem& problem, const NormFamily& fam,
                                 double lambda, const Vector& x, double L,
                                 const HomotopyParams& params = {}) {
  detail::check_compatible(problem, fam);
  detail::require(std::isfinite(L) && L > 0.0, "backtrack: L must be > 0");
  detail::require(params.gamma_inc > 1.0, "backtrack: gamma_inc must be > 1");
  const detail::Point p = detail::make_point(problem, x);
  auto step = detail::backtrack_from(problem, fam, lambda, p, L, params);
  return {std::move(step.x), step.step_constant};
}

/// Proximal-gradient iterations at fixed lambda from x0 until
///   ||M_t (x_{t-1} - x_t) + grad f(x_t) - grad f(x_{t-1})||_* <= tol.
/// The trace starts with a record of x0 (stage 0) followed by one record
/// per iteration tagged stage 1.
inline SolveResult prox_grad_stage(const LeastSquaresProblem& problem, const NormFamily& fam,
                                   double lambda, const Vector& x0, double L0, double tol,
                                   const HomotopyParams& params,
                                   const IterateObserver& observer = {}) {
  detail::check_compatible(problem, fam);
  params.validate(false);
  detail::require(std::isfinite(lambda) && lambda > 0.0, "prox_grad_stage: lambda must be > 0");
  detail::require(std::isfinite(tol) && tol > 0.0, "prox_grad_stage: tolerance must be > 0");
  detail::require(std::isfinite(L0) && L0 >= params.l_min, "prox_grad_stage: need L0 >= l_min");
  detail::RunLog log(fam, params, &observer);
  detail::Point start = detail::make_point(problem, x0);
  log.log(0, lambda, 0, start.f + lambda * norm_value(fam, x0),
          omega_upper(fam, x0, start.gradient, lambda), L0, x0);
  auto out = detail::run_stage(problem, fam, lambda, std::move(start), L0, tol, params, 1, log);
  return {std::move(out.point.x), out.step_constant, log.take()};
}

/// Homotopy continuation: lambda_0 = ||A* b||_*, stages at lambda_0 eta^t
/// (t = 1..N) each solved to tolerance delta' lambda_t and warm-started from
/// the previous stage with the line-search constant carried over, then a
/// final stage at lambda_tgt with tolerance epsilon.
inline HomotopyResult homotopy(const LeastSquaresProblem& problem, const NormFamily& fam,
                               const HomotopyParams& params,
                               const IterateObserver& observer = {}) {
  detail::check_compatible(problem, fam);
  params.validate(true);
  detail::RunLog log(fam, params, &observer);
  HomotopyResult result;
  detail::Point point = detail::make_point(problem, Vector::Zero(problem.dim()));
  result.lambda0 = dual_norm_value(fam, point.gradient);
  const double lambda0 = result.lambda0;

  if (!(lambda0 > 0.0)) {
    // A* b = 0: x = 0 is optimal for every lambda > 0.
    log.log(0, params.lambda_tgt, 0, point.f, 0.0, params.l_min, point.x);
    result.x = std::move(point.x);
    result.step_constant = params.l_min;
    result.trace = log.take();
    return result;
  }

  log.log(0, lambda0, 0, point.f, omega_at_zero(fam, point.gradient, lambda0), params.l_min,
          point.x);
  const int n_stages = stage_count(lambda0, params.lambda_tgt, params.eta);
  result.intermediate_stages = n_stages;
  double M = params.l_min;
  double lambda = lambda0;
  for (int t = 0; t < n_stages; ++t) {
    lambda *= params.eta;
    const double tol = params.delta_prime * lambda;
    auto out = detail::run_stage(problem, fam, lambda, std::move(point), M, tol, params, t + 1,
                                 log);
    point = std::move(out.point);
    M = out.step_constant;
  }
  auto out = detail::run_stage(problem, fam, params.lambda_tgt, std::move(point), M,
                               params.epsilon, params, n_stages + 1, log);
  result.x = std::move(out.point.x);
  result.step_constant = out.step_constant;
  result.trace = log.take();
  return result;
}

/// Plain proximal gradient at fixed lambda from zero with L0 = l_min.
inline SolveResult baseline_pg(const LeastSquaresProblem& problem, const NormFamily& fam,
                               double lambda, double eps, const HomotopyParams& params,
                               const IterateObserver& observer = {}) {
  return prox_grad_stage(problem, fam, lambda, Vector::Zero(problem.dim()), params.l_min, eps,
                         params, observer);
}

struct AcceleratedOptions {
  /// Reset momentum whenever the objective increases.
  bool restart_on_increase = false;
};

/// Accelerated proximal gradient (FISTA momentum) with the same line search
/// and the same stopping quantity, evaluated at the proximal point
/// x_t = Prox_{lambda,M}(y_t):
///   ||M (y_t - x_t) + grad f(x_t) - grad f(y_t)||_*.
inline SolveResult baseline_apg(const LeastSquaresProblem& problem, const NormFamily& fam,
                                double lambda, double eps, const HomotopyParams& params,
                                const IterateObserver& observer = {},
                                AcceleratedOptions options = {}) {
  detail::check_compatible(problem, fam);
  params.validate(false);
  detail::require(std::isfinite(lambda) && lambda > 0.0, "baseline_apg: lambda must be > 0");
  detail::require(std::isfinite(eps) && eps > 0.0, "baseline_apg: tolerance must be > 0");
  detail::RunLog log(fam, params, &observer);

  detail::Point x = detail::make_point(problem, Vector::Zero(problem.dim()));
  double phi_x = x.f;
  log.log(0, lambda, 0, phi_x, omega_upper(fam, x.x, x.gradient, lambda), params.l_min, x.x);
  detail::Point y = x;
  double theta = 1.0;
  double L = params.l_min;
  double M = L;
  for (int t = 1;; ++t) {
    log.check_stage(t, x.x);
    log.tick(x.x);
    auto step = detail::backtrack_from(problem, fam, lambda, y, L, params);
    M = step.step_constant;
    Vector g_next = gradient_from_residual(problem, step.residual);
    const double stop = dual_norm_value(fam, M * (y.x - step.x) + g_next - y.gradient);
    const double f_next = 0.5 * step.residual.squaredNorm();
    const double phi_next = f_next + lambda * norm_value(fam, step.x);
    log.log(1, lambda, t, phi_next, stop, M, step.x);

    detail::Point next{std::move(step.x), std::move(step.residual), std::move(g_next), f_next};
    L = std::max(params.l_min, M / params.gamma_dec);
    if (stop <= eps) {
      x = std::move(next);
      break;
    }
    double beta = 0.0;
    if (options.restart_on_increase && phi_next > phi_x) {
      theta = 1.0;
    } else {
      const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      beta = (theta - 1.0) / theta_next;
      theta = theta_next;
    }
    // Extrapolated point; residual and gradient are affine in x.
    y.x = (1.0 + beta) * next.x - beta * x.x;
    y.residual = (1.0 + beta) * next.residual - beta * x.residual;
    y.gradient = (1.0 + beta) * next.gradient - beta * x.gradient;
    y.f = 0.5 * y.residual.squaredNorm();
    x = std::move(next);
    phi_x = phi_next;
  }
  return {std::move(x.x), M, log.take()};
}

/// Singular value projection: X <- best rank-k approximation of
/// X - step * grad f(X), starting from zero, for a fixed number of
/// iterations. Records carry f(X) as the objective and ||X_t - X_{t-1}||_u
/// as the stop quantity.
inline SolveResult baseline_svp(const LeastSquaresProblem& problem, const NormFamily& fam,
                                Index rank_k, double step, int iters,
                                const IterateObserver& observer = {}) {
  const auto* nuc = std::get_if<Nuclear>(&fam);
  detail::require(nuc != nullptr, "baseline_svp: requires the nuclear-norm (matrix) family");
  detail::check_compatible(problem, fam);
  detail::require(rank_k >= 1 && rank_k <= std::min(nuc->rows, nuc->cols),
                  "baseline_svp: rank_k out of range");
  detail::require(std::isfinite(step) && step > 0.0, "baseline_svp: step must be > 0");
  detail::require(iters >= 0, "baseline_svp: iters must be >= 0");
  HomotopyParams params;
  params.max_stage_iters = std::max(iters, 1);
  params.max_total_iters = std::max(iters, 1);
  detail::RunLog log(fam, params, &observer);
  detail::Point x = detail::make_point(problem, Vector::Zero(problem.dim()));
  log.log(0, 0.0, 0, x.f, 0.0, 1.0 / step, x.x);
  for (int t = 1; t <= iters; ++t) {
    log.tick(x.x);
    Vector target = x.x - step * x.gradient;
    detail::ThinSvd svd = detail::thin_svd(detail::as_matrix(target, nuc->rows, nuc->cols));
    Index r = std::min<Index>(rank_k, svd.s.size());
    while (r > 0 && !(svd.s[r - 1] > 0.0)) --r;
    Matrix projected = svd.u.leftCols(r) * svd.s.head(r).asDiagonal() *
                       svd.v.leftCols(r).transpose();
    Vector next = detail::flatten(projected);
    const double moved = induced_norm(next - x.x, problem.metric());
    x = detail::make_point(problem, std::move(next));
    log.log(1, 0.0, t, x.f, moved, 1.0 / step, x.x);
  }
  return {std::move(x.x), 1.0 / step, log.take()};
}

}  // namespace pgh
