#include "fastpca/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fastpca {

namespace {

double offdiag_norm(std::size_t d, const Vec& a) {
  double s = 0.0;
  for (std::size_t p = 0; p < d; ++p) {
    for (std::size_t q = p + 1; q < d; ++q) s += a[p * d + q] * a[p * d + q];
  }
  return std::sqrt(2.0 * s);
}

}  // namespace

double SpectrumOracle::alignment(std::span<const double> w) const {
  double c = dot(w, eigenvectors.at(0));
  return c * c;
}

SpectrumOracle dense_eigendecompose(std::size_t d, std::span<const double> dense) {
  if (d == 0 || d > 512) throw InputError("dense_eigendecompose: d must be in [1, 512]");
  if (dense.size() != d * d) throw InputError("dense_eigendecompose: bad matrix size");

  Vec a(dense.begin(), dense.end());
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (std::fabs(a[i * d + j] - a[j * d + i]) > 1e-10) {
        throw InputError("dense_eigendecompose: matrix is not symmetric within 1e-10");
      }
      double avg = 0.5 * (a[i * d + j] + a[j * d + i]);
      a[i * d + j] = a[j * d + i] = avg;
    }
  }

  // V accumulates rotations; columns end up as eigenvectors.
  Vec v(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;

  const int max_sweeps = 100;
  int sweep = 0;
  while (offdiag_norm(d, a) > 1e-12) {
    if (++sweep > max_sweeps) {
      throw ToleranceError("dense_eigendecompose: Jacobi did not reach 1e-12 off-diagonal norm");
    }
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        double apq = a[p * d + q];
        if (apq == 0.0) continue;
        double app = a[p * d + p];
        double aqq = a[q * d + q];
        double theta = (aqq - app) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        double tau = s / (1.0 + c);

        a[p * d + p] = app - t * apq;
        a[q * d + q] = aqq + t * apq;
        a[p * d + q] = a[q * d + p] = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
          if (r != p && r != q) {
            double arp = a[r * d + p];
            double arq = a[r * d + q];
            a[r * d + p] = a[p * d + r] = arp - s * (arq + tau * arp);
            a[r * d + q] = a[q * d + r] = arq + s * (arp - tau * arq);
          }
          double vrp = v[r * d + p];
          double vrq = v[r * d + q];
          v[r * d + p] = vrp - s * (vrq + tau * vrp);
          v[r * d + q] = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a[i * d + i] > a[j * d + j]; });

  SpectrumOracle out;
  out.d = d;
  out.source.assign(dense.begin(), dense.end());
  out.eigenvalues.resize(d);
  out.eigenvectors.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    std::size_t col = order[k];
    out.eigenvalues[k] = a[col * d + col];
    Vec u(d);
    for (std::size_t r = 0; r < d; ++r) u[r] = v[r * d + col];
    out.eigenvectors[k] = std::move(u);
  }
  return out;
}

std::vector<Vec> random_orthonormal_basis(SeededRng& rng, std::size_t d) {
  std::vector<Vec> cols(d, Vec(d));
  for (auto& c : cols) {
    for (auto& x : c) x = rng.gaussian();
  }
  // Modified Gram-Schmidt, run twice for orthogonality at working precision.
  for (std::size_t j = 0; j < d; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double proj = dot(cols[j], cols[k]);
        axpy(-proj, cols[k], cols[j]);
      }
    }
    double nj = norm(cols[j]);
    if (!(nj > 1e-12)) throw ToleranceError("random_orthonormal_basis: degenerate draw");
    scale(cols[j], 1.0 / nj);
  }
  return cols;
}

PlantResult plant_spectrum(std::size_t d, std::size_t n, const Vec& eigenvalues,
                           SeededRng& rng) {
  if (d == 0) throw InputError("plant_spectrum: d must be >= 1");
  if (n < d) throw InputError("plant_spectrum: need n >= d");
  if (eigenvalues.empty() || eigenvalues.size() > d) {
    throw InputError("plant_spectrum: need between 1 and d eigenvalues");
  }
  for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
    double lj = eigenvalues[j];
    if (lj < 0.0 || lj > 1.0) throw InputError("plant_spectrum: eigenvalues must lie in [0, 1]");
    if (j > 0 && lj > eigenvalues[j - 1] + 1e-15) {
      throw InputError("plant_spectrum: eigenvalues must be descending");
    }
  }

  Vec lambdas(d, 0.0);
  std::copy(eigenvalues.begin(), eigenvalues.end(), lambdas.begin());

  // Row budget: counts ceil(n * lambda_j / c) must fit in n rows. c = 1 is the
  // exact plant; otherwise the smallest feasible rescale is found by scanning.
  auto counts_for = [&](double c) {
    std::vector<std::size_t> counts(d, 0);
    std::size_t total = 0;
    for (std::size_t j = 0; j < d; ++j) {
      if (lambdas[j] > 0.0) {
        counts[j] = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * lambdas[j] / c));
        total += counts[j];
      }
    }
    return std::make_pair(counts, total);
  };

  double c = 1.0;
  auto [counts, total] = counts_for(c);
  while (total > n) {
    c *= 1.05;
    std::tie(counts, total) = counts_for(c);
  }

  auto basis = random_orthonormal_basis(rng, d);
  std::vector<SparseVector> rows;
  rows.reserve(n);
  Vec stored(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    if (counts[j] == 0) continue;
    double lam_stored = lambdas[j] / c;
    stored[j] = lam_stored;
    double coeff = std::sqrt(static_cast<double>(n) * lam_stored /
                             static_cast<double>(counts[j]));
    Vec row = scaled(basis[j], coeff);
    SparseVector srow = SparseVector::from_dense(row);
    for (std::size_t r = 0; r < counts[j]; ++r) rows.push_back(srow);
  }
  while (rows.size() < n) rows.emplace_back(d, std::vector<SparseVector::Entry>{});

  PlantResult out;
  out.data = make_data_matrix(std::move(rows), std::sqrt(c));
  out.planted_stored = std::move(stored);
  out.deviation_bound = 0.0;
  return out;
}

double tail_mass(std::span<const double> w, const SpectrumOracle& oracle, double threshold) {
  if (std::fabs(norm(w) - 1.0) > 1e-9) throw InputError("tail_mass: w must be a unit vector");
  double s = 0.0;
  for (std::size_t i = 0; i < oracle.d; ++i) {
    if (oracle.eigenvalues[i] <= threshold) {
      double c = dot(w, oracle.eigenvectors[i]);
      s += c * c;
    }
  }
  return s;
}

}  // namespace fastpca
