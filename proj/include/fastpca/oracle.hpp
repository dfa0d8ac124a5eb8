#pragma once

#include "fastpca/operators.hpp"
#include "fastpca/rng.hpp"

namespace fastpca {

// Ground truth for small explicit matrices: full spectrum in descending order
// with orthonormal eigenvectors. Desk scale only (d <= 512).
struct SpectrumOracle {
  std::size_t d = 0;
  Vec eigenvalues;              // descending
  std::vector<Vec> eigenvectors;  // eigenvectors[i] matches eigenvalues[i]
  Vec source;                   // the decomposed matrix, row-major

  double lambda1() const { return eigenvalues.at(0); }
  double gap() const { return d >= 2 ? eigenvalues[0] - eigenvalues[1] : eigenvalues.at(0); }

  // Squared projection of w onto the top eigenvector.
  double alignment(std::span<const double> w) const;
};

// Cyclic Jacobi rotations, iterated until the off-diagonal Frobenius norm is
// <= 1e-12. Input must be symmetric within 1e-10 and have d <= 512.
SpectrumOracle dense_eigendecompose(std::size_t d, std::span<const double> dense_row_major);

inline SpectrumOracle dense_eigendecompose(const CovarianceOperator& op) {
  return dense_eigendecompose(op.dim(), assemble_dense(op));
}

// Synthetic dataset whose empirical covariance has exactly the prescribed
// spectrum: rows are replicated scaled eigenvectors of a random orthonormal
// basis, with counts ceil(n * lambda_j) so row norms stay <= 1. When the
// counts do not fit in n rows the spectrum is planted scaled down by c and the
// DataMatrix records scale = sqrt(c), so original-unit eigenvalues still match
// the request; `planted_stored` reports the stored spectrum either way.
struct PlantResult {
  DataMatrix data;
  Vec planted_stored;      // spectrum of the stored (normalized) covariance
  double deviation_bound;  // 0 when planting is exact in stored units
};

PlantResult plant_spectrum(std::size_t d, std::size_t n, const Vec& eigenvalues,
                           SeededRng& rng);

// Sum of squared projections of w onto eigenvectors with eigenvalue <= threshold.
double tail_mass(std::span<const double> w, const SpectrumOracle& oracle, double threshold);

// Random orthonormal basis via Householder QR of a gaussian matrix; columns
// returned as vectors.
std::vector<Vec> random_orthonormal_basis(SeededRng& rng, std::size_t d);

}  // namespace fastpca
