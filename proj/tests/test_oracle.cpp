#include <doctest.h>

#include <cmath>
#include <limits>

#include "fastpca/oracle.hpp"
#include "fastpca/power.hpp"

using namespace fastpca;

namespace {

double reconstruction_error(const SpectrumOracle& o) {
  // || U L U^T - A ||_F
  std::size_t d = o.d;
  double err2 = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double rec = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        rec += o.eigenvalues[k] * o.eigenvectors[k][i] * o.eigenvectors[k][j];
      }
      double diff = rec - o.source[i * d + j];
      err2 += diff * diff;
    }
  }
  return std::sqrt(err2);
}

}  // namespace

TEST_CASE("eigendecomposition of a diagonal matrix") {
  SpectrumOracle o = dense_eigendecompose(2, std::vector<double>{0.9, 0, 0, 0.5});
  CHECK(o.eigenvalues[0] == doctest::Approx(0.9));
  CHECK(o.eigenvalues[1] == doctest::Approx(0.5));
  CHECK(std::fabs(o.eigenvectors[0][0]) == doctest::Approx(1.0));
  CHECK(std::fabs(o.eigenvectors[1][1]) == doctest::Approx(1.0));
}

TEST_CASE("eigendecomposition of the rank-one averaging matrix") {
  SpectrumOracle o = dense_eigendecompose(2, std::vector<double>{0.5, 0.5, 0.5, 0.5});
  CHECK(o.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(o.eigenvalues[1]) <= 1e-12);
  double s = 1.0 / std::sqrt(2.0);
  CHECK(std::fabs(std::fabs(o.eigenvectors[0][0]) - s) <= 1e-12);
  CHECK(std::fabs(std::fabs(o.eigenvectors[0][1]) - s) <= 1e-12);
}

TEST_CASE("random symmetric matrices reconstruct, with residuals and orthonormality") {
  SeededRng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    std::size_t d = 50;
    Vec a(d * d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double v = rng.gaussian();
        a[i * d + j] = a[j * d + i] = v;
      }
    }
    SpectrumOracle o = dense_eigendecompose(d, a);
    CHECK(reconstruction_error(o) <= 1e-9);
    for (std::size_t k = 0; k + 1 < d; ++k) CHECK(o.eigenvalues[k] >= o.eigenvalues[k + 1]);
    for (std::size_t k = 0; k < d; ++k) {
      // residual || A u - lambda u ||
      Vec au(d, 0.0);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) au[i] += a[i * d + j] * o.eigenvectors[k][j];
      }
      axpy(-o.eigenvalues[k], o.eigenvectors[k], au);
      CHECK(norm(au) <= 1e-9);
      for (std::size_t l = 0; l <= k; ++l) {
        double want = l == k ? 1.0 : 0.0;
        CHECK(std::fabs(dot(o.eigenvectors[k], o.eigenvectors[l]) - want) <= 1e-9);
      }
    }
  }
}

TEST_CASE("asymmetric input is rejected") {
  CHECK_THROWS_AS(dense_eigendecompose(2, std::vector<double>{0, 1e-3, 0, 0}), InputError);
  CHECK_THROWS_AS(dense_eigendecompose(0, std::vector<double>{}), InputError);
}

TEST_CASE("rank-one plant duplicates the top eigenvector") {
  SeededRng rng(2);
  PlantResult plant = plant_spectrum(2, 2, {1.0, 0.0}, rng);
  CHECK(plant.data.scale == doctest::Approx(1.0));
  Vec r0 = plant.data.rows[0].to_dense();
  Vec r1 = plant.data.rows[1].to_dense();
  CHECK(dist(r0, r1) <= 1e-15);
  CHECK(std::fabs(norm(r0) - 1.0) <= 1e-12);
  CovarianceOperator op{plant.data};
  SpectrumOracle o = dense_eigendecompose(op);
  CHECK(o.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(o.eigenvalues[1]) <= 1e-12);
}

TEST_CASE("plant recovers a feasible spectrum exactly") {
  SeededRng rng(3);
  Vec spectrum = {0.5, 0.3, 0.1};
  PlantResult plant = plant_spectrum(5, 80, spectrum, rng);
  CHECK(plant.data.scale == doctest::Approx(1.0));
  CHECK(plant.deviation_bound == 0.0);
  SpectrumOracle o = dense_eigendecompose(CovarianceOperator{plant.data});
  CHECK(std::fabs(o.eigenvalues[0] - 0.5) <= 1e-9);
  CHECK(std::fabs(o.eigenvalues[1] - 0.3) <= 1e-9);
  CHECK(std::fabs(o.eigenvalues[2] - 0.1) <= 1e-9);
  CHECK(std::fabs(o.eigenvalues[3]) <= 1e-9);
}

TEST_CASE("infeasible trace falls back to a scaled plant with recorded scale") {
  SeededRng rng(4);
  Vec spectrum = {0.9, 0.7, 0.2};  // trace 1.8 cannot fit in unit-norm rows
  PlantResult plant = plant_spectrum(3, 300, spectrum, rng);
  CHECK(plant.data.scale > 1.0);
  double c = plant.data.scale * plant.data.scale;
  SpectrumOracle o = dense_eigendecompose(CovarianceOperator{plant.data});
  // Stored spectrum matches the request after the scale^2 mapping.
  for (int k = 0; k < 3; ++k) {
    CHECK(std::fabs(o.eigenvalues[k] * c - spectrum[k]) <= 1e-9 * c);
    CHECK(std::fabs(o.eigenvalues[k] - plant.planted_stored[k]) <= 1e-9);
  }
}

TEST_CASE("plant input validation") {
  SeededRng rng(5);
  CHECK_THROWS_AS(plant_spectrum(2, 10, {1.2, 0.1}, rng), InputError);   // above 1
  CHECK_THROWS_AS(plant_spectrum(2, 10, {0.1, 0.5}, rng), InputError);   // ascending
  CHECK_THROWS_AS(plant_spectrum(2, 1, {0.5, 0.1}, rng), InputError);    // n < d
  CHECK_THROWS_AS(plant_spectrum(2, 10, {-0.1, -0.2}, rng), InputError); // negative
}

TEST_CASE("plant round trip over random feasible spectra") {
  SeededRng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t d = 3 + rng.uniform_index(6);
    std::size_t n = 12 * d;
    Vec spectrum(d);
    double mass = 0.85;
    for (std::size_t i = 0; i < d; ++i) {
      spectrum[i] = mass * (0.4 + 0.2 * rng.uniform());
      mass -= spectrum[i];
    }
    PlantResult plant = plant_spectrum(d, n, spectrum, rng);
    REQUIRE(plant.data.scale == doctest::Approx(1.0));
    SpectrumOracle o = dense_eigendecompose(CovarianceOperator{plant.data});
    for (std::size_t i = 0; i < d; ++i) {
      CHECK(std::fabs(o.eigenvalues[i] - spectrum[i]) <= 1e-9);
    }
  }
}

TEST_CASE("tail mass") {
  SpectrumOracle o =
      dense_eigendecompose(3, std::vector<double>{0.9, 0, 0, 0, 0.5, 0, 0, 0, 0.1});
  Vec u1 = o.eigenvectors[0];
  CHECK(tail_mass(u1, o, 0.8) == doctest::Approx(0.0));
  double s = 1.0 / std::sqrt(2.0);
  Vec mix(3, 0.0);
  axpy(s, o.eigenvectors[0], mix);
  axpy(s, o.eigenvectors[2], mix);
  CHECK(tail_mass(mix, o, 0.3) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(tail_mass(mix, o, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("power method reaches the oracle eigenvector on random PD matrices") {
  int ok = 0;
  const int trials = 50;
  for (int trial = 0; trial < trials; ++trial) {
    SeededRng rng(900 + trial);
    std::size_t d = 5 + rng.uniform_index(26);
    Vec spectrum(d);
    spectrum[0] = 0.9;
    spectrum[1] = spectrum[0] - (0.05 + 0.3 * rng.uniform());
    for (std::size_t i = 2; i < d; ++i) {
      spectrum[i] = spectrum[i - 1] * (0.3 + 0.6 * rng.uniform());
    }
    auto basis = random_orthonormal_basis(rng, d);
    Vec dense(d * d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          dense[i * d + j] += spectrum[k] * basis[k][i] * basis[k][j];
        }
      }
    }
    SpectrumOracle o = dense_eigendecompose(d, dense);
    double kappa = o.lambda1() / o.gap();
    int t = pm_iterations_accurate(std::max(1.0, kappa), 1e-6, 0.1, d);
    MatVec m = [&](std::span<const double> v) {
      Vec y(d, 0.0);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) y[i] += dense[i * d + j] * v[j];
      }
      return y;
    };
    Vec w = power_method(m, random_unit_vector(rng, d), t);
    if (o.alignment(w) >= 1.0 - 1e-6) ++ok;
  }
  CHECK(ok >= 45);
}
