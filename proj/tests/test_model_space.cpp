#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pgh/model_space.hpp"
#include "pgh/random.hpp"

using namespace pgh;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Metric random_metric(Index n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.2, 3.0);
  Vector d(n);
  for (Index i = 0; i < n; ++i) d[i] = u(rng);
  return Metric(d);
}

}  // namespace

TEST(Inner, OrthogonalUnderIdentityIsZero) {
  EXPECT_EQ(inner(vec({1, 0}), vec({0, 1}), Metric::identity(2)), 0.0);
}

TEST(Inner, DiagonalWeights) {
  EXPECT_DOUBLE_EQ(inner(vec({1, 1}), vec({1, 1}), Metric(vec({4, 9}))), 13.0);
}

TEST(Inner, SelfInnerIsSquaredNorm) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    Metric m = random_metric(7, rng);
    Vector x = gaussian_matrix(7, 1, rng).col(0);
    const double nrm = induced_norm(x, m);
    EXPECT_NEAR(inner(x, x, m), nrm * nrm, 1e-12 * (1 + nrm * nrm));
  }
}

TEST(Inner, DimensionMismatchThrows) {
  EXPECT_THROW(inner(vec({1, 2}), vec({1, 2, 3}), Metric::identity(2)), contract_error);
}

TEST(InducedNorm, HandValues) {
  EXPECT_EQ(induced_norm(Vector::Zero(3), Metric::identity(3)), 0.0);
  EXPECT_DOUBLE_EQ(induced_norm(vec({3, 4}), Metric::identity(2)), 5.0);
  EXPECT_DOUBLE_EQ(induced_norm(vec({1, 0}), Metric(vec({4, 1}))), 2.0);
}

TEST(Metric, RejectsNonPositiveDiagonal) {
  EXPECT_THROW(Metric(vec({1, 0})), contract_error);
  EXPECT_THROW(Metric(vec({1, -2})), contract_error);
  EXPECT_THROW(Metric(vec({1, std::nan("")})), contract_error);
}

TEST(MeasurementOperator, RejectsNonFinite) {
  Matrix a = Matrix::Ones(2, 2);
  a(1, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(MeasurementOperator{a}, contract_error);
}

TEST(Adjoint, IdentityMetricIsTranspose) {
  Rng rng(11);
  Matrix a = gaussian_matrix(4, 6, rng);
  Vector u = gaussian_matrix(4, 1, rng).col(0);
  Vector got = adjoint_apply(MeasurementOperator(a), u, Metric::identity(6));
  EXPECT_LT((got - a.transpose() * u).norm(), 1e-14 * (1 + got.norm()));
}

TEST(Adjoint, OneDimensionalWeighted) {
  Matrix a(1, 1);
  a << 2.0;
  Vector got = adjoint_apply(MeasurementOperator(a), vec({1.0}), Metric(vec({4.0})));
  EXPECT_DOUBLE_EQ(got[0], 0.5);
}

TEST(Adjoint, DefiningIdentityOnRandomTriples) {
  Rng rng(12);
  for (int t = 0; t < 200; ++t) {
    const Index m = 1 + static_cast<Index>(rng() % 8), n = 1 + static_cast<Index>(rng() % 8);
    Metric metric = random_metric(n, rng);
    MeasurementOperator op(gaussian_matrix(m, n, rng));
    Vector x = gaussian_matrix(n, 1, rng).col(0);
    Vector u = gaussian_matrix(m, 1, rng).col(0);
    const double lhs = apply(op, x).dot(u);
    const double rhs = inner(x, adjoint_apply(op, u, metric), metric);
    const double scale = op.matrix().norm() * x.norm() * u.norm();
    EXPECT_NEAR(lhs, rhs, 1e-10 * scale);
  }
}

TEST(Adjoint, DimensionMismatchThrows) {
  MeasurementOperator op(Matrix::Ones(3, 2));
  EXPECT_THROW(adjoint_apply(op, Vector::Ones(2), Metric::identity(2)), contract_error);
  EXPECT_THROW(adjoint_apply(op, Vector::Ones(3), Metric::identity(3)), contract_error);
}

TEST(Problem, RejectsInconsistentShapes) {
  MeasurementOperator op(Matrix::Ones(3, 2));
  EXPECT_THROW(LeastSquaresProblem(op, Vector::Ones(2), Metric::identity(2)), contract_error);
  EXPECT_THROW(LeastSquaresProblem(op, Vector::Ones(3), Metric::identity(3)), contract_error);
}

TEST(ValueAndGradient, ExactFitHasZeroLossAndGradient) {
  Rng rng(5);
  Matrix a = gaussian_matrix(5, 3, rng);
  Vector x = gaussian_matrix(3, 1, rng).col(0);
  LeastSquaresProblem p(MeasurementOperator(a), a * x, Metric::identity(3));
  auto vg = value_and_gradient(p, x);
  EXPECT_NEAR(vg.value, 0.0, 1e-28);
  EXPECT_LT(vg.gradient.norm(), 1e-13);
}

TEST(ValueAndGradient, IdentityOperatorZeroData) {
  Vector x = vec({1, -2, 3});
  LeastSquaresProblem p(MeasurementOperator(Matrix::Identity(3, 3)), Vector::Zero(3),
                        Metric::identity(3));
  auto vg = value_and_gradient(p, x);
  EXPECT_DOUBLE_EQ(vg.value, 7.0);
  EXPECT_EQ(vg.gradient, x);
}

TEST(ValueAndGradient, AgreesWithFiniteDifferences) {
  Rng rng(21);
  for (int t = 0; t < 50; ++t) {
    const Index m = 2 + static_cast<Index>(rng() % 6), n = 1 + static_cast<Index>(rng() % 6);
    Metric metric = random_metric(n, rng);
    Matrix a = gaussian_matrix(m, n, rng);
    Vector b = gaussian_matrix(m, 1, rng).col(0);
    LeastSquaresProblem p(MeasurementOperator(a), b, metric);
    Vector x = gaussian_matrix(n, 1, rng).col(0);
    // The B-gradient g satisfies df/dx_i = B_ii g_i.
    Vector euclid = metric.diag().cwiseProduct(value_and_gradient(p, x).gradient);
    Vector fd = oracle::fd_gradient([&](const Vector& y) { return loss(p, y).value; }, x);
    EXPECT_LE((euclid - fd).norm(), 1e-6 * std::max(1.0, fd.norm()));
  }
}

TEST(ValueAndGradient, QuadraticExpansionIsExact) {
  Rng rng(22);
  for (int t = 0; t < 100; ++t) {
    const Index m = 4, n = 5;
    Metric metric = random_metric(n, rng);
    Matrix a = gaussian_matrix(m, n, rng);
    LeastSquaresProblem p(MeasurementOperator(a), gaussian_matrix(m, 1, rng).col(0), metric);
    Vector x = gaussian_matrix(n, 1, rng).col(0);
    Vector y = gaussian_matrix(n, 1, rng).col(0);
    auto fx = value_and_gradient(p, x);
    const double lhs = loss(p, y).value - fx.value - inner(fx.gradient, y - x, metric);
    const double rhs = 0.5 * (a * (y - x)).squaredNorm();
    EXPECT_NEAR(lhs, rhs, 1e-10 * (1 + std::abs(rhs) + std::abs(fx.value)));
  }
}

TEST(ValueAndGradient, DimensionMismatchThrows) {
  LeastSquaresProblem p(MeasurementOperator(Matrix::Ones(2, 2)), Vector::Ones(2),
                        Metric::identity(2));
  EXPECT_THROW(value_and_gradient(p, Vector::Ones(3)), contract_error);
}
