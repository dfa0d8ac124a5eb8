#include <doctest.h>

#include "fastpca/oracle.hpp"
#include "fastpca/sparse.hpp"

using namespace fastpca;

namespace {

SparseVector sv(std::initializer_list<double> dense) {
  Vec v(dense);
  return SparseVector::from_dense(v);
}

}  // namespace

TEST_CASE("SparseVector invariants") {
  CHECK_THROWS_AS(SparseVector(3, {{1, 2.0}, {1, 3.0}}), InputError);  // not increasing
  CHECK_THROWS_AS(SparseVector(3, {{2, 1.0}, {1, 1.0}}), InputError);  // decreasing
  CHECK_THROWS_AS(SparseVector(3, {{3, 1.0}}), InputError);            // out of range
  CHECK_THROWS_AS(SparseVector(3, {{0, 0.0}}), InputError);            // explicit zero

  SparseVector x = sv({0.0, 3.0, 0.0, 4.0});
  CHECK(x.nnz() == 2);
  CHECK(x.norm() == doctest::Approx(5.0));
  Vec dense = {1.0, 1.0, 1.0, 1.0};
  CHECK(x.dot(dense) == doctest::Approx(7.0));
}

TEST_CASE("normalize_dataset single row") {
  DataMatrix m = normalize_dataset({sv({3.0, 4.0})});
  CHECK(m.scale == doctest::Approx(5.0));
  Vec row = m.rows[0].to_dense();
  CHECK(row[0] == doctest::Approx(0.6));
  CHECK(row[1] == doctest::Approx(0.8));
}

TEST_CASE("normalize_dataset identity case") {
  DataMatrix m = normalize_dataset({sv({0.6, 0.8}), sv({0.1, 0.0})});
  CHECK(m.scale == doctest::Approx(1.0));
  CHECK(m.rows[0].to_dense()[0] == doctest::Approx(0.6));
}

TEST_CASE("normalize_dataset records scale so eigenvalues map back") {
  DataMatrix m = normalize_dataset({sv({2.0, 0.0}), sv({0.0, 1.0})});
  CHECK(m.scale == doctest::Approx(2.0));
  CovarianceOperator op{std::move(m)};
  SpectrumOracle oracle = dense_eigendecompose(op);
  CHECK(oracle.lambda1() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("normalize_dataset is idempotent") {
  SeededRng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<SparseVector> rows;
    for (int i = 0; i < 8; ++i) {
      Vec r(6);
      for (auto& v : r) v = 3.0 * rng.gaussian();
      rows.push_back(SparseVector::from_dense(r));
    }
    DataMatrix once = normalize_dataset(rows);
    DataMatrix twice = normalize_dataset(once.rows);
    CHECK(twice.scale == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("normalize_dataset rejects degenerate input") {
  CHECK_THROWS_AS(normalize_dataset(std::vector<SparseVector>{}), InputError);
  CHECK_THROWS_AS(normalize_dataset({SparseVector(3, {})}), InputError);
}

TEST_CASE("dense ensemble validation") {
  auto a = SparseSymMatrix::from_dense(2, std::vector<double>{0.5, 0.0, 0.0, 0.25});
  CHECK_THROWS_AS(make_dense_ensemble({0.5, 0.4}, {a, a}), InputError);  // weights != 1
  CHECK_THROWS_AS(make_dense_ensemble({1.5, -0.5}, {a, a}), InputError);  // negative

  // Asymmetric dense input is rejected.
  CHECK_THROWS_AS(SparseSymMatrix::from_dense(2, std::vector<double>{0.0, 1.0, 0.5, 0.0}),
                  InputError);

  // A single triangle is mirrored on construction.
  auto b = SparseSymMatrix::from_triplets(2, {{0, 1, 0.3}});
  Vec y(2, 0.0);
  Vec v = {1.0, 2.0};
  b.matvec_add(v, y, 1.0);
  CHECK(y[0] == doctest::Approx(0.6));
  CHECK(y[1] == doctest::Approx(0.3));
}

TEST_CASE("ensemble nnz bookkeeping") {
  auto a = SparseSymMatrix::from_dense(3, std::vector<double>{0.5, 0, 0, 0, 0.25, 0, 0, 0, 0});
  auto b = SparseSymMatrix::from_triplets(3, {{0, 1, 0.1}});
  DenseEnsemble e = make_dense_ensemble({0.25, 0.75}, {a, b});
  CHECK(e.S == 2);
  CHECK(e.N == 4);  // diag(2) + mirrored off-diagonal pair
}
