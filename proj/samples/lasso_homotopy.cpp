// Sparse recovery with the homotopy solver: a 200 x 500 Gaussian design,
// a 10-sparse signal and small uniform noise.

#include <cmath>
#include <iostream>

#include "pgh/pgh.hpp"

int main() {
  using namespace pgh;
  const Index m = 200, n = 500, k = 10;
  Rng rng(42);
  Matrix a = gaussian_matrix(m, n, rng, 1.0 / std::sqrt(static_cast<double>(m)));
  Vector x0 = Vector::Zero(n);
  for (Index i : random_subset(n, k, rng)) x0[i] = gaussian_matrix(1, 1, rng)(0, 0);
  std::uniform_real_distribution<double> noise(-0.005, 0.005);
  Vector z(m);
  for (Index i = 0; i < m; ++i) z[i] = noise(rng);

  NormFamily fam = unit_l1(n);
  LeastSquaresProblem problem(MeasurementOperator(a), a * x0 + z, metric_for(fam));

  HomotopyParams params;
  params.lambda_tgt = default_lambda_tgt(problem, fam, z).lambda_tgt;
  params.epsilon = 1e-8;
  HomotopyResult result = homotopy(problem, fam, params);

  std::cout << "lambda0 = " << result.lambda0 << ", lambda_tgt = " << params.lambda_tgt
            << ", stages = " << result.intermediate_stages + 1
            << ", iterations = " << result.trace.total_iterations() << "\n";
  for (const auto& rec : result.trace.records) {
    if (rec.iter_stage == 0) continue;
    std::cout << "stage " << rec.stage << " iter " << rec.iter_global << "  phi = " << rec.objective
              << "  stop = " << rec.stop_quantity << "  K = " << rec.k << "\n";
  }
  std::cout << "nonzeros: " << k_of(fam, result.x) << " (true " << k << "), relative error "
            << (result.x - x0).norm() / x0.norm() << "\n";
  return 0;
}
