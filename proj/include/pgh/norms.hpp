#pragma once

// Decomposable regularizing norms: weighted l1, l1,2 (column groups) and
// nuclear. Every family fixes its compatible metric on model space
// (weighted l1 -> B = diag(w^2), matrix families -> identity), and matrix
// variables are stored as column-major flattened vectors.
//
// For each family the subdifferential has the form
//     d||x|| = { e_x + v : v in T_x^perp, ||v||_* <= 1 }
// and the routines below expose ||.||, ||.||_*, the scaled prox, the
// generalized cardinality K(x) = ||e_x||_u^2, e_x, the projections onto
// T_x and T_x^perp, the orthogonal atomic decomposition, and the
// optimality residual omega.

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "pgh/errors.hpp"
#include "pgh/model_space.hpp"

namespace pgh {

struct WeightedL1 {
  Vector weights;
};

/// Sum of column Euclidean norms of a rows x cols matrix.
struct L12 {
  Index rows;
  Index cols;
};

struct Nuclear {
  Index rows;
  Index cols;
};

using NormFamily = std::variant<WeightedL1, L12, Nuclear>;

/// Singular values at or below rank_tol * sigma_max are treated as zero.
inline constexpr double kDefaultRankTol = 1e-10;

inline NormFamily weighted_l1(Vector weights) {
  detail::require(weights.size() >= 1, "weighted_l1: empty weight vector");
  for (Index i = 0; i < weights.size(); ++i) {
    detail::require(std::isfinite(weights[i]) && weights[i] > 0.0,
                    "weighted_l1: weights must be finite and > 0");
  }
  return WeightedL1{std::move(weights)};
}

inline NormFamily unit_l1(Index n) { return weighted_l1(Vector::Ones(n)); }

inline NormFamily l12(Index rows, Index cols) {
  detail::require(rows >= 1 && cols >= 1, "l12: dimensions must be >= 1");
  return L12{rows, cols};
}

inline NormFamily nuclear(Index rows, Index cols) {
  detail::require(rows >= 1 && cols >= 1, "nuclear: dimensions must be >= 1");
  return Nuclear{rows, cols};
}

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

inline Index ambient_dim(const NormFamily& fam) {
  return std::visit(overloaded{
                        [](const WeightedL1& f) { return f.weights.size(); },
                        [](const L12& f) { return f.rows * f.cols; },
                        [](const Nuclear& f) { return f.rows * f.cols; },
                    },
                    fam);
}

inline Metric metric_for(const NormFamily& fam) {
  if (const auto* f = std::get_if<WeightedL1>(&fam)) {
    return Metric(f->weights.array().square().matrix());
  }
  return Metric::identity(ambient_dim(fam));
}

inline bool is_matrix_family(const NormFamily& fam) {
  return !std::holds_alternative<WeightedL1>(fam);
}

inline std::string family_name(const NormFamily& fam) {
  return std::visit(overloaded{
                        [](const WeightedL1&) { return std::string("l1"); },
                        [](const L12&) { return std::string("l12"); },
                        [](const Nuclear&) { return std::string("nuclear"); },
                    },
                    fam);
}

/// Largest K the family can take: n, the column count, or min(d1, d2).
inline Index max_k(const NormFamily& fam) {
  return std::visit(overloaded{
                        [](const WeightedL1& f) { return f.weights.size(); },
                        [](const L12& f) { return f.cols; },
                        [](const Nuclear& f) { return std::min(f.rows, f.cols); },
                    },
                    fam);
}

struct OrthogonalDecomposition {
  std::vector<double> coefficients;
  std::vector<Vector> atoms;

  std::size_t size() const { return atoms.size(); }
};

namespace detail {

inline void check_family(const NormFamily& fam, const Vector& x, const char* what) {
  check_dim(x, ambient_dim(fam), what);
}

inline Eigen::Map<const Matrix> as_matrix(const Vector& x, Index rows, Index cols) {
  return Eigen::Map<const Matrix>(x.data(), rows, cols);
}

inline Vector flatten(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// Thin SVD with singular values in descending order.
struct ThinSvd {
  Matrix u;
  Vector s;
  Matrix v;
};

inline ThinSvd thin_svd(const Matrix& m) {
  if (!m.allFinite()) throw numerical_error("svd: non-finite input");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw numerical_error("svd: failed to converge");
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

inline Vector singular_values(const Matrix& m) {
  if (!m.allFinite()) throw numerical_error("svd: non-finite input");
  Eigen::BDCSVD<Matrix> svd(m);
  if (svd.info() != Eigen::Success) throw numerical_error("svd: failed to converge");
  return svd.singularValues();
}

inline Index numerical_rank(const Vector& s, double rank_tol) {
  if (s.size() == 0 || !(s[0] > 0.0)) return 0;
  const double cut = rank_tol * s[0];
  Index r = 0;
  while (r < s.size() && s[r] > cut) ++r;
  return r;
}

/// Leading singular pairs of a matrix, truncated at its numerical rank.
struct SingularBasis {
  Matrix u;  // d1 x r
  Vector s;  // r
  Matrix v;  // d2 x r
};

inline SingularBasis singular_basis(const Matrix& m, double rank_tol) {
  ThinSvd svd = thin_svd(m);
  const Index r = numerical_rank(svd.s, rank_tol);
  return {svd.u.leftCols(r), svd.s.head(r), svd.v.leftCols(r)};
}

/// (I - U U^T) Y (I - V V^T)
inline Matrix project_off_basis(const SingularBasis& basis, const Matrix& y) {
  Matrix left = y - basis.u * (basis.u.transpose() * y);
  return left - (left * basis.v) * basis.v.transpose();
}

inline double column_norm(const Eigen::Map<const Matrix>& m, Index j) {
  return m.col(j).norm();
}

}  // namespace detail

inline double norm_value(const NormFamily& fam, const Vector& x) {
  detail::check_family(fam, x, "norm_value");
  return std::visit(
      overloaded{
          [&](const WeightedL1& f) { return (f.weights.array() * x.array().abs()).sum(); },
          [&](const L12& f) { return detail::as_matrix(x, f.rows, f.cols).colwise().norm().sum(); },
          [&](const Nuclear& f) {
            return detail::singular_values(detail::as_matrix(x, f.rows, f.cols)).sum();
          },
      },
      fam);
}

/// sup { <y, x>_B : ||x|| <= 1 } in the family's compatible metric.
inline double dual_norm_value(const NormFamily& fam, const Vector& y) {
  detail::check_family(fam, y, "dual_norm_value");
  return std::visit(
      overloaded{
          [&](const WeightedL1& f) { return (f.weights.array() * y.array().abs()).maxCoeff(); },
          [&](const L12& f) {
            return detail::as_matrix(y, f.rows, f.cols).colwise().norm().maxCoeff();
          },
          [&](const Nuclear& f) {
            return detail::singular_values(detail::as_matrix(y, f.rows, f.cols))[0];
          },
      },
      fam);
}

/// argmin_x tau ||x|| + 1/2 ||x - v||_u^2. Thresholded components are
/// exactly zero.
inline Vector prox(const NormFamily& fam, const Vector& v, double tau) {
  detail::check_family(fam, v, "prox");
  detail::require(std::isfinite(tau) && tau >= 0.0, "prox: tau must be finite and >= 0");
  if (tau == 0.0) return v;
  return std::visit(
      overloaded{
          [&](const WeightedL1& f) -> Vector {
            Vector out(v.size());
            for (Index i = 0; i < v.size(); ++i) {
              const double shrunk = std::abs(v[i]) - tau / f.weights[i];
              out[i] = shrunk > 0.0 ? detail::sign(v[i]) * shrunk : 0.0;
            }
            return out;
          },
          [&](const L12& f) -> Vector {
            auto vm = detail::as_matrix(v, f.rows, f.cols);
            Matrix out = Matrix::Zero(f.rows, f.cols);
            for (Index j = 0; j < f.cols; ++j) {
              const double nrm = vm.col(j).norm();
              if (nrm > tau) out.col(j) = (1.0 - tau / nrm) * vm.col(j);
            }
            return detail::flatten(out);
          },
          [&](const Nuclear& f) -> Vector {
            detail::ThinSvd svd = detail::thin_svd(detail::as_matrix(v, f.rows, f.cols));
            Index r = 0;
            while (r < svd.s.size() && svd.s[r] > tau) ++r;
            if (r == 0) return Vector::Zero(v.size());
            Vector shrunk = svd.s.head(r).array() - tau;
            Matrix out = svd.u.leftCols(r) * shrunk.asDiagonal() * svd.v.leftCols(r).transpose();
            return detail::flatten(out);
          },
      },
      fam);
}

/// Generalized cardinality: nonzero entries, nonzero columns, or rank.
inline Index k_of(const NormFamily& fam, const Vector& x, double rank_tol = kDefaultRankTol) {
  detail::check_family(fam, x, "k_of");
  return std::visit(
      overloaded{
          [&](const WeightedL1&) { return static_cast<Index>((x.array() != 0.0).count()); },
          [&](const L12& f) {
            auto xm = detail::as_matrix(x, f.rows, f.cols);
            Index k = 0;
            for (Index j = 0; j < f.cols; ++j) k += (xm.col(j).array() != 0.0).any() ? 1 : 0;
            return k;
          },
          [&](const Nuclear& f) {
            return detail::numerical_rank(
                detail::singular_values(detail::as_matrix(x, f.rows, f.cols)), rank_tol);
          },
      },
      fam);
}

/// The vector e_x of the subdifferential; e_of(0) = 0.
inline Vector e_of(const NormFamily& fam, const Vector& x, double rank_tol = kDefaultRankTol) {
  detail::check_family(fam, x, "e_of");
  return std::visit(
      overloaded{
          [&](const WeightedL1& f) -> Vector {
            Vector e(x.size());
            for (Index i = 0; i < x.size(); ++i) e[i] = detail::sign(x[i]) / f.weights[i];
            return e;
          },
          [&](const L12& f) -> Vector {
            auto xm = detail::as_matrix(x, f.rows, f.cols);
            Matrix e = Matrix::Zero(f.rows, f.cols);
            for (Index j = 0; j < f.cols; ++j) {
              const double nrm = xm.col(j).norm();
              if (nrm > 0.0) e.col(j) = xm.col(j) / nrm;
            }
            return detail::flatten(e);
          },
          [&](const Nuclear& f) -> Vector {
            auto basis = detail::singular_basis(detail::as_matrix(x, f.rows, f.cols), rank_tol);
            return detail::flatten(basis.u * basis.v.transpose());
          },
      },
      fam);
}

/// B-orthogonal projection of y onto T_x.
inline Vector project_T(const NormFamily& fam, const Vector& x, const Vector& y,
                        double rank_tol = kDefaultRankTol) {
  detail::check_family(fam, x, "project_T");
  detail::check_family(fam, y, "project_T");
  return std::visit(
      overloaded{
          [&](const WeightedL1&) -> Vector {
            return (x.array() != 0.0).select(y, Vector::Zero(y.size()));
          },
          [&](const L12& f) -> Vector {
            auto xm = detail::as_matrix(x, f.rows, f.cols);
            auto ym = detail::as_matrix(y, f.rows, f.cols);
            Matrix out = Matrix::Zero(f.rows, f.cols);
            for (Index j = 0; j < f.cols; ++j) {
              if ((xm.col(j).array() != 0.0).any()) out.col(j) = ym.col(j);
            }
            return detail::flatten(out);
          },
          [&](const Nuclear& f) -> Vector {
            auto basis = detail::singular_basis(detail::as_matrix(x, f.rows, f.cols), rank_tol);
            Matrix ym = detail::as_matrix(y, f.rows, f.cols);
            return detail::flatten(ym - detail::project_off_basis(basis, ym));
          },
      },
      fam);
}

/// B-orthogonal projection of y onto the complement of T_x.
inline Vector project_Tperp(const NormFamily& fam, const Vector& x, const Vector& y,
                            double rank_tol = kDefaultRankTol) {
  detail::check_family(fam, x, "project_Tperp");
  detail::check_family(fam, y, "project_Tperp");
  if (const auto* f = std::get_if<Nuclear>(&fam)) {
    auto basis = detail::singular_basis(detail::as_matrix(x, f->rows, f->cols), rank_tol);
    return detail::flatten(
        detail::project_off_basis(basis, detail::as_matrix(y, f->rows, f->cols)));
  }
  return y - project_T(fam, x, y, rank_tol);
}

/// Orthogonal representation x = sum_i gamma_i a_i by extreme points a_i of
/// the unit ball with sum_i gamma_i = ||x||. Empty for x = 0.
inline OrthogonalDecomposition orthogonal_decompose(const NormFamily& fam, const Vector& x,
                                                    double rank_tol = kDefaultRankTol) {
  detail::check_family(fam, x, "orthogonal_decompose");
  OrthogonalDecomposition out;
  std::visit(
      overloaded{
          [&](const WeightedL1& f) {
            for (Index i = 0; i < x.size(); ++i) {
              if (x[i] == 0.0) continue;
              Vector a = Vector::Zero(x.size());
              a[i] = detail::sign(x[i]) / f.weights[i];
              out.coefficients.push_back(f.weights[i] * std::abs(x[i]));
              out.atoms.push_back(std::move(a));
            }
          },
          [&](const L12& f) {
            auto xm = detail::as_matrix(x, f.rows, f.cols);
            for (Index j = 0; j < f.cols; ++j) {
              const double nrm = xm.col(j).norm();
              if (nrm == 0.0) continue;
              Matrix a = Matrix::Zero(f.rows, f.cols);
              a.col(j) = xm.col(j) / nrm;
              out.coefficients.push_back(nrm);
              out.atoms.push_back(detail::flatten(a));
            }
          },
          [&](const Nuclear& f) {
            auto basis = detail::singular_basis(detail::as_matrix(x, f.rows, f.cols), rank_tol);
            for (Index i = 0; i < basis.s.size(); ++i) {
              out.coefficients.push_back(basis.s[i]);
              out.atoms.push_back(detail::flatten(basis.u.col(i) * basis.v.col(i).transpose()));
            }
          },
      },
      fam);
  return out;
}

/// max(||g||_* - lambda, 0): the subdifferential at 0 is the whole dual ball.
inline double omega_at_zero(const NormFamily& fam, const Vector& g, double lambda) {
  detail::require(std::isfinite(lambda) && lambda > 0.0, "omega_at_zero: lambda must be > 0");
  return std::max(dual_norm_value(fam, g) - lambda, 0.0);
}

/// True when omega_upper returns the exact minimum rather than a bound.
inline bool omega_is_exact(const NormFamily& fam) {
  return !std::holds_alternative<Nuclear>(fam);
}

/// Upper bound on omega_lambda(x) = min_{xi in d||x||} ||lambda xi + g||_*,
/// exact for the separable families. For the nuclear norm the bound is
/// evaluated at v = -P_perp(g) / max(lambda, ||P_perp(g)||_*).
inline double omega_upper(const NormFamily& fam, const Vector& x, const Vector& g,
                          double lambda, double rank_tol = kDefaultRankTol) {
  detail::require(std::isfinite(lambda) && lambda > 0.0, "omega_upper: lambda must be > 0");
  detail::check_family(fam, x, "omega_upper");
  detail::check_family(fam, g, "omega_upper");
  return std::visit(
      overloaded{
          [&](const WeightedL1& f) {
            double worst = 0.0;
            for (Index i = 0; i < x.size(); ++i) {
              const double wg = f.weights[i] * g[i];
              const double r = x[i] != 0.0 ? std::abs(lambda * detail::sign(x[i]) + wg)
                                           : std::max(std::abs(wg) - lambda, 0.0);
              worst = std::max(worst, r);
            }
            return worst;
          },
          [&](const L12& f) {
            auto xm = detail::as_matrix(x, f.rows, f.cols);
            auto gm = detail::as_matrix(g, f.rows, f.cols);
            double worst = 0.0;
            for (Index j = 0; j < f.cols; ++j) {
              const double xn = xm.col(j).norm();
              const double r = xn > 0.0 ? (lambda / xn * xm.col(j) + gm.col(j)).norm()
                                        : std::max(gm.col(j).norm() - lambda, 0.0);
              worst = std::max(worst, r);
            }
            return worst;
          },
          [&](const Nuclear& f) {
            auto basis = detail::singular_basis(detail::as_matrix(x, f.rows, f.cols), rank_tol);
            Matrix gm = detail::as_matrix(g, f.rows, f.cols);
            Matrix off = detail::project_off_basis(basis, gm);
            const double off_dual = detail::singular_values(off)[0];
            Matrix residual = lambda * (basis.u * basis.v.transpose()) + gm -
                              (lambda / std::max(lambda, off_dual)) * off;
            return detail::singular_values(residual)[0];
          },
      },
      fam);
}

}  // namespace pgh
