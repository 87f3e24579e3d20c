#pragma once

// Model-space geometry: a diagonal metric B on R^n, a dense measurement
// operator A : R^n -> R^m with its B-adjoint A* = B^{-1} A^T, and the
// least-squares loss f(x) = 1/2 ||Ax - b||^2 (Euclidean on R^m).

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "pgh/errors.hpp"

namespace pgh {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class Metric {
 public:
  explicit Metric(Vector diag) : diag_(std::move(diag)) {
    detail::require(diag_.size() >= 1, "metric: dimension must be >= 1");
    for (Index i = 0; i < diag_.size(); ++i) {
      detail::require(std::isfinite(diag_[i]) && diag_[i] > 0.0,
                      "metric: diagonal entries must be finite and > 0");
    }
  }

  static Metric identity(Index n) { return Metric(Vector::Ones(n)); }

  Index dim() const { return diag_.size(); }
  const Vector& diag() const { return diag_; }
  bool is_identity() const { return (diag_.array() == 1.0).all(); }

  friend bool operator==(const Metric& a, const Metric& b) {
    return a.diag_.size() == b.diag_.size() && a.diag_ == b.diag_;
  }

 private:
  Vector diag_;
};

class MeasurementOperator {
 public:
  explicit MeasurementOperator(Matrix a) : a_(std::move(a)) {
    detail::require(a_.rows() >= 1 && a_.cols() >= 1,
                    "measurement operator: need m >= 1 and n >= 1");
    detail::require(a_.allFinite(), "measurement operator: non-finite entry");
  }

  Index rows() const { return a_.rows(); }
  Index cols() const { return a_.cols(); }
  const Matrix& matrix() const { return a_; }

 private:
  Matrix a_;
};

class LeastSquaresProblem {
 public:
  LeastSquaresProblem(MeasurementOperator op, Vector b, Metric metric)
      : op_(std::move(op)), b_(std::move(b)), metric_(std::move(metric)) {
    detail::require(op_.cols() == metric_.dim(),
                    "problem: operator columns must equal metric dimension");
    detail::require(op_.rows() == b_.size(),
                    "problem: operator rows must equal length of b");
    detail::require(b_.allFinite(), "problem: non-finite observation");
  }

  const MeasurementOperator& op() const { return op_; }
  const Vector& b() const { return b_; }
  const Metric& metric() const { return metric_; }
  Index dim() const { return op_.cols(); }

 private:
  MeasurementOperator op_;
  Vector b_;
  Metric metric_;
};

namespace detail {

inline void check_dim(const Vector& x, Index n, const char* what) {
  if (x.size() != n) {
    throw contract_error(std::string(what) + ": dimension mismatch (got " +
                         std::to_string(x.size()) + ", expected " +
                         std::to_string(n) + ")");
  }
}

}  // namespace detail

/// <x, y>_B = sum_i B_ii x_i y_i
inline double inner(const Vector& x, const Vector& y, const Metric& metric) {
  detail::check_dim(x, metric.dim(), "inner");
  detail::check_dim(y, metric.dim(), "inner");
  return (metric.diag().array() * x.array() * y.array()).sum();
}

inline double induced_norm(const Vector& x, const Metric& metric) {
  return std::sqrt(std::max(0.0, inner(x, x, metric)));
}

inline Vector apply(const MeasurementOperator& op, const Vector& x) {
  detail::check_dim(x, op.cols(), "apply");
  return op.matrix() * x;
}

/// A* u = B^{-1} A^T u, so that <Ax, u> = <x, A* u>_B.
inline Vector adjoint_apply(const MeasurementOperator& op, const Vector& u,
                            const Metric& metric) {
  detail::check_dim(u, op.rows(), "adjoint_apply");
  detail::require(metric.dim() == op.cols(),
                  "adjoint_apply: metric dimension must equal operator columns");
  Vector out = op.matrix().transpose() * u;
  if (!metric.is_identity()) out.array() /= metric.diag().array();
  return out;
}

struct ValueGradient {
  double value;
  Vector gradient;
};

/// Loss value together with the residual Ax - b, which callers reuse to
/// avoid a second product with A.
struct LossEval {
  double value;
  Vector residual;
};

inline LossEval loss(const LeastSquaresProblem& problem, const Vector& x) {
  detail::check_dim(x, problem.dim(), "loss");
  Vector r = problem.op().matrix() * x - problem.b();
  const double v = 0.5 * r.squaredNorm();
  if (!std::isfinite(v)) throw numerical_error("loss: non-finite value");
  return {v, std::move(r)};
}

inline Vector gradient_from_residual(const LeastSquaresProblem& problem,
                                     const Vector& residual) {
  Vector g = adjoint_apply(problem.op(), residual, problem.metric());
  if (!g.allFinite()) throw numerical_error("gradient: non-finite entry");
  return g;
}

/// f(x) = 1/2 ||Ax - b||^2 and its B-gradient A*(Ax - b).
inline ValueGradient value_and_gradient(const LeastSquaresProblem& problem,
                                        const Vector& x) {
  auto [value, residual] = loss(problem, x);
  return {value, gradient_from_residual(problem, residual)};
}

}  // namespace pgh
