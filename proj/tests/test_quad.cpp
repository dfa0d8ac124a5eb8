#include <doctest.h>

#include <cmath>

#include "fastpca/quad.hpp"

using namespace fastpca;

namespace {

CovarianceOperator zero_operator(std::size_t d) {
  // One all-zero row: X = 0.
  return CovarianceOperator(make_data_matrix({SparseVector(d, {})}));
}

CovarianceOperator diag_ensemble(const Vec& diag) {
  std::size_t d = diag.size();
  Vec dense(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) dense[i * d + i] = diag[i];
  return CovarianceOperator(
      make_dense_ensemble({1.0}, {SparseSymMatrix::from_dense(d, dense)}));
}

}  // namespace

TEST_CASE("exact solve on the identity system") {
  auto x = zero_operator(2);
  QuadraticProblem prob{ShiftedOperator(x, 1.0), {3.0, 4.0}, 1.0, 2.0};
  Vec z = exact_solve(prob, 1e-10);
  CHECK(z[0] == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(z[1] == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("exact solve on diag(1,2) and the objective value at the minimizer") {
  auto x = diag_ensemble({1.0, 0.0});  // M = 2I - X = diag(1, 2)
  QuadraticProblem prob{ShiftedOperator(x, 2.0), {1.0, 2.0}, 1.0, 3.0};
  Vec z = exact_solve(prob, 1e-12);
  CHECK(z[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(z[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(prob.objective(z) == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("zero right-hand side gives the zero minimizer") {
  auto x = diag_ensemble({0.5, 0.2});
  QuadraticProblem prob{ShiftedOperator(x, 1.0), {0.0, 0.0}, 0.5, 2.0};
  Vec z = exact_solve(prob, 1e-12);
  CHECK(norm(z) == 0.0);
}

TEST_CASE("exact solve residual certificate across random instances") {
  SeededRng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t d = 2 + rng.uniform_index(12);
    Vec diag(d);
    for (auto& v : diag) v = 0.9 * rng.uniform();
    auto x = diag_ensemble(diag);
    double lambda1 = *std::max_element(diag.begin(), diag.end());
    double sigma = 1e-4 + rng.uniform() * 0.5;
    double lambda = lambda1 + sigma;
    Vec w(d);
    for (auto& v : w) v = rng.gaussian();
    QuadraticProblem prob{ShiftedOperator(x, lambda), w, sigma, lambda + 1.0};
    double tol = 1e-9 * norm(w) / sigma;
    Vec z = exact_solve(prob, tol);
    Vec r = prob.gradient(z);
    CHECK(norm(r) / norm(w) <= 1e-9);
  }
}

TEST_CASE("exact solve reports conditioning failures") {
  auto x = diag_ensemble({0.9, 0.5});
  // Shift below lambda_1: the operator is indefinite.
  QuadraticProblem prob{ShiftedOperator(x, 0.7), {1.0, 1.0}, 0.1, 2.0};
  CHECK_THROWS_AS(exact_solve(prob, 1e-10), ToleranceError);
  QuadraticProblem bad_sigma{ShiftedOperator(x, 1.1), {1.0, 1.0}, 0.0, 2.0};
  CHECK_THROWS_AS(exact_solve(bad_sigma, 1e-10), InputError);
}

TEST_CASE("suboptimality to distance") {
  auto x = zero_operator(2);
  QuadraticProblem prob{ShiftedOperator(x, 1.0), {1.0, 0.0}, 0.1, 2.0};
  CHECK(suboptimality_to_distance(prob, 0.0) == 0.0);
  CHECK(suboptimality_to_distance(prob, 0.02) == doctest::Approx(std::sqrt(0.4)));
  CHECK(suboptimality_to_distance(prob, prob.sigma / 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(suboptimality_to_distance(prob, -1.0), InputError);
  QuadraticProblem bad{ShiftedOperator(x, 1.0), {1.0, 0.0}, 0.0, 2.0};
  CHECK_THROWS_AS(suboptimality_to_distance(bad, 0.1), InputError);
}

TEST_CASE("component smoothness bounds") {
  CHECK(component_smoothness(0.8, BetaMode::conservative) == doctest::Approx(1.8));
  CHECK(component_smoothness(0.8, BetaMode::tight) == doctest::Approx(0.8));
  CHECK(component_smoothness(0.3, BetaMode::tight) == doctest::Approx(0.7));
}
