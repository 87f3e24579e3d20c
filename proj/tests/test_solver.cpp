#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "pgh/analysis.hpp"
#include "pgh/solver.hpp"

using namespace pgh;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

LeastSquaresProblem make_problem(const Matrix& a, const Vector& b, const NormFamily& fam) {
  return LeastSquaresProblem(MeasurementOperator(a), b, metric_for(fam));
}

struct TinyLasso {
  Matrix a;
  Vector b;
};

TinyLasso tiny_lasso(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 77));
  return {gaussian_matrix(3, 4, rng), gaussian_matrix(3, 1, rng).col(0)};
}

/// Records every iterate passed to the observer.
struct Recorder {
  std::vector<TraceRecord> records;
  std::vector<Vector> iterates;
  IterateObserver observer() {
    return [this](const TraceRecord& r, const Vector& x) {
      records.push_back(r);
      iterates.push_back(x);
    };
  }
};

/// Gaussian design with unit-variance columns in expectation and a
/// Gaussian observation; lambda is set to a fraction of lambda0.
struct RandomLasso {
  Matrix a;
  Vector b;
  double lambda;
};

RandomLasso random_lasso(Index m, Index n, std::uint64_t seed, double fraction) {
  Rng rng(seed);
  RandomLasso out{gaussian_matrix(m, n, rng) / std::sqrt(static_cast<double>(m)),
                  gaussian_matrix(m, 1, rng).col(0), 0.0};
  out.lambda = fraction * (out.a.transpose() * out.b).cwiseAbs().maxCoeff();
  return out;
}

HomotopyParams tight(double eps = 1e-12) {
  HomotopyParams p;
  p.epsilon = eps;
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Objective, model and single steps

TEST(ModelValue, EqualsObjectiveAtTheAnchor) {
  Rng rng(1);
  Matrix a = gaussian_matrix(5, 4, rng);
  NormFamily fam = unit_l1(4);
  auto p = make_problem(a, gaussian_matrix(5, 1, rng).col(0), fam);
  Vector y = gaussian_matrix(4, 1, rng).col(0);
  EXPECT_NEAR(model_value(p, fam, 0.3, 2.0, y, y), objective(p, fam, 0.3, y), 1e-12);
}

TEST(ModelValue, MonotoneInL) {
  Rng rng(2);
  Matrix a = gaussian_matrix(5, 4, rng);
  NormFamily fam = unit_l1(4);
  auto p = make_problem(a, gaussian_matrix(5, 1, rng).col(0), fam);
  for (int t = 0; t < 50; ++t) {
    Vector y = gaussian_matrix(4, 1, rng).col(0), x = gaussian_matrix(4, 1, rng).col(0);
    EXPECT_LE(model_value(p, fam, 0.3, 1.0, y, x), model_value(p, fam, 0.3, 2.0, y, x));
  }
}

TEST(ModelValue, RejectsNonPositiveL) {
  NormFamily fam = unit_l1(1);
  auto p = make_problem(Matrix::Ones(1, 1), vec({1}), fam);
  EXPECT_THROW(model_value(p, fam, 0.1, 0.0, vec({0}), vec({0})), contract_error);
}

TEST(ProxStep, OneDimensionalHandValue) {
  // y = 0, A = 1, b = 2, L = 1, lambda = 1: prox(2, 1) = 1
  NormFamily fam = unit_l1(1);
  auto p = make_problem(Matrix::Ones(1, 1), vec({2}), fam);
  EXPECT_DOUBLE_EQ(prox_step(p, fam, 1.0, 1.0, vec({0}))[0], 1.0);
}

TEST(ProxStep, FixedPointAtCertifiedOptimum) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    TinyLasso t = tiny_lasso(s);
    auto x_star = oracle::lasso_by_sign_patterns(t.a, t.b, 0.5);
    ASSERT_TRUE(x_star.has_value());
    NormFamily fam = unit_l1(4);
    auto p = make_problem(t.a, t.b, fam);
    const double L = 2.0 * t.a.squaredNorm();
    EXPECT_LT((prox_step(p, fam, 0.5, L, *x_star) - *x_star).norm(), 1e-9);
  }
}

TEST(ProxStep, RejectsInvalidArguments) {
  NormFamily fam = unit_l1(1);
  auto p = make_problem(Matrix::Ones(1, 1), vec({1}), fam);
  EXPECT_THROW(prox_step(p, fam, 1.0, -1.0, vec({0})), contract_error);
  EXPECT_THROW(prox_step(p, fam, -1.0, 1.0, vec({0})), contract_error);
}

TEST(Backtrack, IdentityOperatorAcceptsOne) {
  NormFamily fam = unit_l1(3);
  auto p = make_problem(Matrix::Identity(3, 3), vec({1, 2, 3}), fam);
  EXPECT_EQ(backtrack(p, fam, 0.1, Vector::Zero(3), 0.5).step_constant, 1.0);
}

TEST(Backtrack, LargeStartIsAcceptedUnchanged) {
  Rng rng(3);
  Matrix a = gaussian_matrix(6, 5, rng);
  NormFamily fam = unit_l1(5);
  auto p = make_problem(a, gaussian_matrix(6, 1, rng).col(0), fam);
  const double lip = Eigen::JacobiSVD<Matrix>(a).singularValues()[0];
  const double L = 1.01 * lip * lip;
  EXPECT_EQ(backtrack(p, fam, 0.2, gaussian_matrix(5, 1, rng).col(0), L).step_constant, L);
}

TEST(Backtrack, SufficientDecrease) {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    Matrix a = gaussian_matrix(6, 8, rng);
    NormFamily fam = unit_l1(8);
    auto p = make_problem(a, gaussian_matrix(6, 1, rng).col(0), fam);
    Vector x = gaussian_matrix(8, 1, rng).col(0);
    const double lambda = 0.3;
    auto out = backtrack(p, fam, lambda, x, 1e-3);
    const double phi_x = objective(p, fam, lambda, x);
    const double phi_next = objective(p, fam, lambda, out.x);
    const double m = model_value(p, fam, lambda, out.step_constant, x, out.x);
    const double tol = 1e-10 * (1 + std::abs(phi_x));
    EXPECT_LE(phi_next, m + tol);
    EXPECT_LE(phi_next,
              phi_x - 0.5 * out.step_constant * (out.x - x).squaredNorm() + tol);
  }
}

TEST(Backtrack, RejectsIncompatibleMetric) {
  NormFamily fam = weighted_l1(vec({1, 2}));
  LeastSquaresProblem p(MeasurementOperator(Matrix::Identity(2, 2)), vec({1, 1}),
                        Metric::identity(2));
  EXPECT_THROW(backtrack(p, fam, 0.1, Vector::Zero(2), 1.0), contract_error);
}

// ---------------------------------------------------------------------------
// Fixed-lambda proximal gradient

TEST(ProxGradStage, MatchesSignPatternOracle) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    TinyLasso t = tiny_lasso(s);
    auto x_star = oracle::lasso_by_sign_patterns(t.a, t.b, 0.5);
    ASSERT_TRUE(x_star.has_value());
    NormFamily fam = unit_l1(4);
    auto p = make_problem(t.a, t.b, fam);
    auto out = prox_grad_stage(p, fam, 0.5, Vector::Zero(4), 1e-6, 1e-12, tight());
    EXPECT_LT((out.x - *x_star).norm(), 1e-6) << "seed " << s;
  }
}

TEST(ProxGradStage, ObjectiveNeverIncreases) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    RandomLasso l = random_lasso(30, 60, derive_seed(s, 5), 0.2);
    NormFamily fam = unit_l1(60);
    auto p = make_problem(l.a, l.b, fam);
    auto out = prox_grad_stage(p, fam, l.lambda, Vector::Zero(60), 1e-6, 1e-9, tight());
    const auto& recs = out.trace.records;
    for (std::size_t i = 1; i < recs.size(); ++i) {
      EXPECT_LE(recs[i].objective, recs[i - 1].objective * (1 + 1e-14) + 1e-15);
    }
  }
}

TEST(ProxGradStage, TraceLayout) {
  TinyLasso t = tiny_lasso(3);
  NormFamily fam = unit_l1(4);
  auto p = make_problem(t.a, t.b, fam);
  auto out = prox_grad_stage(p, fam, 0.5, Vector::Zero(4), 1e-6, 1e-10, tight());
  const auto& recs = out.trace.records;
  ASSERT_GE(recs.size(), 2u);
  EXPECT_EQ(recs.front().stage, 0);
  EXPECT_EQ(recs.front().iter_global, 0);
  for (std::size_t i = 1; i < recs.size(); ++i) {
    EXPECT_EQ(recs[i].stage, 1);
    EXPECT_EQ(recs[i].iter_stage, static_cast<int>(i));
    EXPECT_EQ(recs[i].iter_global, static_cast<int>(i));
  }
  EXPECT_LE(recs.back().stop_quantity, 1e-10);
  EXPECT_EQ(out.trace.total_iterations(), static_cast<int>(recs.size()) - 1);
}

TEST(ProxGradStage, StopsAfterOneIterationAtTheOptimum) {
  TinyLasso t = tiny_lasso(4);
  NormFamily fam = unit_l1(4);
  auto p = make_problem(t.a, t.b, fam);
  auto x_star = oracle::lasso_by_sign_patterns(t.a, t.b, 0.5);
  ASSERT_TRUE(x_star.has_value());
  auto out = prox_grad_stage(p, fam, 0.5, *x_star, 1e-6, 1e-6, tight());
  EXPECT_EQ(out.trace.total_iterations(), 1);
}

TEST(ProxGradStage, StopQuantityBoundsExactOmega) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    RandomLasso l = random_lasso(30, 60, derive_seed(s, 6), 0.2);
    NormFamily fam = unit_l1(60);
    auto p = make_problem(l.a, l.b, fam);
    Recorder rec;
    prox_grad_stage(p, fam, l.lambda, Vector::Zero(60), 1e-6, 1e-9, tight(), rec.observer());
    for (std::size_t i = 1; i < rec.records.size(); ++i) {
      const Vector g = value_and_gradient(p, rec.iterates[i]).gradient;
      const double omega = omega_upper(fam, rec.iterates[i], g, l.lambda);
      EXPECT_LE(omega, rec.records[i].stop_quantity * (1 + 1e-9) + 1e-13);
    }
  }
}

TEST(ProxGradStage, StageCapRaisesWithPartialTrace) {
  Rng rng(7);
  Matrix a = gaussian_matrix(20, 40, rng);
  NormFamily fam = unit_l1(40);
  auto p = make_problem(a, gaussian_matrix(20, 1, rng).col(0), fam);
  HomotopyParams params;
  params.max_stage_iters = 3;
  try {
    prox_grad_stage(p, fam, 0.01, Vector::Zero(40), 1e-6, 1e-14, params);
    FAIL() << "expected iteration_limit_error";
  } catch (const iteration_limit_error& e) {
    EXPECT_EQ(e.trace().total_iterations(), 3);
    EXPECT_EQ(e.last_iterate().size(), 40);
  }
}

TEST(ProxGradStage, RejectsInvalidArguments) {
  NormFamily fam = unit_l1(2);
  auto p = make_problem(Matrix::Identity(2, 2), vec({1, 1}), fam);
  HomotopyParams params;
  EXPECT_THROW(prox_grad_stage(p, fam, 0.0, Vector::Zero(2), 1.0, 1e-6, params), contract_error);
  EXPECT_THROW(prox_grad_stage(p, fam, 0.1, Vector::Zero(2), 1e-9, 1e-6, params), contract_error);
  EXPECT_THROW(prox_grad_stage(p, fam, 0.1, Vector::Zero(2), 1.0, 0.0, params), contract_error);
}

// ---------------------------------------------------------------------------
// Homotopy

TEST(StageCount, HandValue) { EXPECT_EQ(stage_count(2.0, 0.1, 0.6), 5); }

TEST(StageCount, ClampsWhenTargetExceedsStart) { EXPECT_EQ(stage_count(1.0, 2.0, 0.5), 0); }

TEST(Homotopy, ScheduleMatchesTheTrace) {
  // A = I and b = lambda0 e_1 give ||A* b||_inf = lambda0 exactly.
  Rng rng(8);
  std::uniform_real_distribution<double> l0(0.5, 10.0), ratio(1e-4, 0.9), et(0.2, 0.9);
  auto check = [](double lambda0, double lambda_tgt, double eta) {
    NormFamily fam = unit_l1(2);
    auto p = make_problem(Matrix::Identity(2, 2), vec({lambda0, 0.0}), fam);
    HomotopyParams params;
    params.lambda_tgt = lambda_tgt;
    params.eta = eta;
    auto out = homotopy(p, fam, params);
    const int n = static_cast<int>(std::floor(std::log(lambda_tgt / lambda0) / std::log(eta)));
    EXPECT_EQ(out.intermediate_stages, std::max(n, 0));
    std::set<int> stages;
    double lam = lambda0;
    for (const auto& r : out.trace.records) {
      if (r.iter_stage == 0) continue;
      if (stages.insert(r.stage).second && r.stage <= n) lam *= eta;
      if (r.stage <= n) EXPECT_DOUBLE_EQ(r.lambda, lam);
      if (r.stage == n + 1) EXPECT_EQ(r.lambda, lambda_tgt);
    }
    EXPECT_EQ(static_cast<int>(stages.size()), std::max(n, 0) + 1);
  };
  check(2.0, 0.1, 0.6);
  for (int t = 0; t < 50; ++t) {
    const double a = l0(rng);
    check(a, a * ratio(rng), et(rng));
  }
}

TEST(Homotopy, ZeroDataReturnsZeroImmediately) {
  NormFamily fam = unit_l1(3);
  auto p = make_problem(Matrix::Ones(2, 3), Vector::Zero(2), fam);
  HomotopyParams params;
  params.lambda_tgt = 0.1;
  auto out = homotopy(p, fam, params);
  EXPECT_EQ(out.x, Vector::Zero(3));
  EXPECT_EQ(out.trace.total_iterations(), 0);
}

TEST(Homotopy, TargetAboveStartIsASingleStage) {
  TinyLasso t = tiny_lasso(9);
  NormFamily fam = unit_l1(4);
  auto p = make_problem(t.a, t.b, fam);
  HomotopyParams params;
  params.lambda_tgt = 2.0 * dual_norm_value(fam, adjoint_apply(p.op(), p.b(), p.metric()));
  auto out = homotopy(p, fam, params);
  EXPECT_EQ(out.intermediate_stages, 0);
  for (const auto& r : out.trace.records) EXPECT_LE(r.stage, 1);
  EXPECT_EQ(out.x, Vector::Zero(4));
}

TEST(Homotopy, MatchesSignPatternOracle) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    TinyLasso t = tiny_lasso(s);
    auto x_star = oracle::lasso_by_sign_patterns(t.a, t.b, 0.5);
    ASSERT_TRUE(x_star.has_value());
    NormFamily fam = unit_l1(4);
    auto p = make_problem(t.a, t.b, fam);
    HomotopyParams params = tight();
    params.lambda_tgt = 0.5;
    EXPECT_LT((homotopy(p, fam, params).x - *x_star).norm(), 1e-6) << "seed " << s;
  }
}

TEST(Homotopy, StageInvariants) {
  // Warm-start admissibility, objective monotone inside each stage, and the
  // line-search constant threaded from one stage into the next.
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng(derive_seed(s, 9));
    Matrix a = gaussian_matrix(40, 100, rng) / std::sqrt(40.0);
    NormFamily fam = unit_l1(100);
    Vector x0 = Vector::Zero(100);
    for (Index i : random_subset(100, 5, rng)) x0[i] = 1.0;
    auto p = make_problem(a, a * x0 + 0.01 * gaussian_matrix(40, 1, rng).col(0), fam);
    HomotopyParams params = tight(1e-10);
    params.lambda_tgt = 0.02;
    auto out = homotopy(p, fam, params);
    const auto& recs = out.trace.records;
    for (std::size_t i = 1; i < recs.size(); ++i) {
      const auto& prev = recs[i - 1];
      const auto& cur = recs[i];
      if (cur.stage == prev.stage && prev.iter_stage > 0) {
        EXPECT_LE(cur.objective, prev.objective * (1 + 1e-14) + 1e-15);
      }
      if (cur.stage != prev.stage && prev.stage >= 1) {
        const double bound = params.delta_prime * cur.lambda / params.eta;
        EXPECT_LE(prev.stop_quantity, bound * (1 + 1e-12));
        EXPECT_GE(cur.stage, prev.stage);
      }
      EXPECT_GE(cur.step_constant, params.l_min);
    }
    EXPECT_LE(recs.back().stop_quantity, params.epsilon);
    EXPECT_EQ(recs.back().lambda, params.lambda_tgt);
  }
}

TEST(Homotopy, StopQuantityBoundsExactOmegaOnEveryIterate) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    RandomLasso l = random_lasso(30, 60, derive_seed(s, 10), 0.1);
    NormFamily fam = unit_l1(60);
    auto p = make_problem(l.a, l.b, fam);
    HomotopyParams params = tight(1e-9);
    params.lambda_tgt = l.lambda;
    Recorder rec;
    homotopy(p, fam, params, rec.observer());
    for (std::size_t i = 0; i < rec.records.size(); ++i) {
      if (rec.records[i].iter_stage == 0) continue;
      const Vector g = value_and_gradient(p, rec.iterates[i]).gradient;
      const double omega = omega_upper(fam, rec.iterates[i], g, rec.records[i].lambda);
      EXPECT_LE(omega, rec.records[i].stop_quantity * (1 + 1e-9) + 1e-13);
    }
  }
}

TEST(Homotopy, DeterministicTraces) {
  Rng rng(11);
  Matrix a = gaussian_matrix(30, 60, rng);
  NormFamily fam = unit_l1(60);
  auto p = make_problem(a, gaussian_matrix(30, 1, rng).col(0), fam);
  HomotopyParams params;
  params.lambda_tgt = 0.1;
  auto r1 = homotopy(p, fam, params), r2 = homotopy(p, fam, params);
  ASSERT_EQ(r1.trace.records.size(), r2.trace.records.size());
  EXPECT_EQ(r1.x, r2.x);
  for (std::size_t i = 0; i < r1.trace.records.size(); ++i) {
    EXPECT_EQ(r1.trace.records[i].objective, r2.trace.records[i].objective);
    EXPECT_EQ(r1.trace.records[i].stop_quantity, r2.trace.records[i].stop_quantity);
  }
}

TEST(Homotopy, WorksWithWeightedMetric) {
  RandomLasso l = random_lasso(8, 6, 12, 0.0);
  Vector w = vec({0.8, 1, 1.5, 1, 1.2, 0.7});
  NormFamily fam = weighted_l1(w);
  auto p = make_problem(l.a, l.b, fam);
  HomotopyParams params = tight(1e-11);
  params.lambda_tgt =
      0.2 * dual_norm_value(fam, adjoint_apply(p.op(), p.b(), p.metric()));
  auto out = homotopy(p, fam, params);
  const Vector g = value_and_gradient(p, out.x).gradient;
  EXPECT_LE(omega_upper(fam, out.x, g, params.lambda_tgt), 1e-10);
}

TEST(Homotopy, NuclearAndGroupFamiliesConverge) {
  Rng rng(13);
  for (const NormFamily& fam : {nuclear(6, 5), l12(6, 5)}) {
    Matrix a = gaussian_matrix(25, 30, rng) / 5.0;
    auto p = make_problem(a, gaussian_matrix(25, 1, rng).col(0), fam);
    HomotopyParams params = tight(1e-9);
    params.lambda_tgt =
        0.2 * dual_norm_value(fam, adjoint_apply(p.op(), p.b(), p.metric()));
    auto out = homotopy(p, fam, params);
    const Vector g = value_and_gradient(p, out.x).gradient;
    EXPECT_LE(omega_upper(fam, out.x, g, params.lambda_tgt), 1e-8) << family_name(fam);
  }
}

TEST(Homotopy, RejectsMissingTarget) {
  NormFamily fam = unit_l1(2);
  auto p = make_problem(Matrix::Identity(2, 2), vec({1, 1}), fam);
  EXPECT_THROW(homotopy(p, fam, HomotopyParams{}), contract_error);
}

// ---------------------------------------------------------------------------
// Baselines

TEST(BaselinePg, IsProxGradFromZero) {
  TinyLasso t = tiny_lasso(14);
  NormFamily fam = unit_l1(4);
  auto p = make_problem(t.a, t.b, fam);
  HomotopyParams params;
  auto a = baseline_pg(p, fam, 0.3, 1e-9, params);
  auto b = prox_grad_stage(p, fam, 0.3, Vector::Zero(4), params.l_min, 1e-9, params);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.trace.records.size(), b.trace.records.size());
}

TEST(BaselineApg, MatchesOracleAndPg) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    TinyLasso t = tiny_lasso(s);
    auto x_star = oracle::lasso_by_sign_patterns(t.a, t.b, 0.5);
    ASSERT_TRUE(x_star.has_value());
    NormFamily fam = unit_l1(4);
    auto p = make_problem(t.a, t.b, fam);
    auto apg = baseline_apg(p, fam, 0.5, 1e-12, tight());
    EXPECT_LT((apg.x - *x_star).norm(), 1e-6);
    auto restarted = baseline_apg(p, fam, 0.5, 1e-12, tight(), {}, {true});
    EXPECT_LT((restarted.x - *x_star).norm(), 1e-6);
  }
}

TEST(BaselineApg, FewerIterationsThanPgOnIllConditionedInstance) {
  // Overdetermined design with column scales spread over two decades, so
  // f is strongly convex but badly conditioned.
  Rng rng(15);
  Matrix a = gaussian_matrix(100, 50, rng) / 10.0;
  for (Index j = 0; j < 50; ++j) a.col(j) *= std::pow(10.0, -1.0 + j / 49.0);
  NormFamily fam = unit_l1(50);
  auto p = make_problem(a, gaussian_matrix(100, 1, rng).col(0), fam);
  const double phi_star = reference_optimum(p, fam, 0.01).value;
  auto hits = [&](const SolveResult& r) {
    for (const auto& rec : r.trace.records) {
      if (rec.objective - phi_star <= 1e-6 * (1 + std::abs(phi_star))) return rec.iter_global;
    }
    return std::numeric_limits<int>::max();
  };
  auto pg = baseline_pg(p, fam, 0.01, 1e-10, tight());
  auto apg = baseline_apg(p, fam, 0.01, 1e-10, tight());
  EXPECT_LT(hits(apg), hits(pg));
}

TEST(BaselineSvp, ExactRecoveryWithIdentityOperator) {
  Rng rng(16);
  Matrix x0 = gaussian_matrix(5, 2, rng) * gaussian_matrix(4, 2, rng).transpose();
  NormFamily fam = nuclear(5, 4);
  Vector b = Eigen::Map<Vector>(x0.data(), x0.size());
  auto p = make_problem(Matrix::Identity(20, 20), b, fam);
  auto out = baseline_svp(p, fam, 2, 1.0, 1);
  EXPECT_LT((out.x - b).norm(), 1e-10 * b.norm());
}

TEST(BaselineSvp, RankStaysWithinTarget) {
  Rng rng(17);
  NormFamily fam = nuclear(10, 10);
  Matrix x0 = gaussian_matrix(10, 2, rng) * gaussian_matrix(10, 2, rng).transpose();
  Matrix a = gaussian_matrix(200, 100, rng) / std::sqrt(200.0);
  Vector b = a * Eigen::Map<Vector>(x0.data(), x0.size());
  auto p = make_problem(a, b, fam);
  Recorder rec;
  auto out = baseline_svp(p, fam, 2, 0.6, 200, rec.observer());
  for (const auto& r : rec.records) EXPECT_LE(r.k, 2);
  EXPECT_EQ(out.trace.total_iterations(), 200);
  EXPECT_LT((out.x - Eigen::Map<Vector>(x0.data(), x0.size())).norm(), 1e-3 * x0.norm());
}

TEST(BaselineSvp, RequiresNuclearFamily) {
  NormFamily fam = unit_l1(4);
  auto p = make_problem(Matrix::Identity(4, 4), Vector::Ones(4), fam);
  EXPECT_THROW(baseline_svp(p, fam, 1, 1.0, 5), contract_error);
}
