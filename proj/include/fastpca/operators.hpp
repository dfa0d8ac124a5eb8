#pragma once

#include <optional>
#include <variant>

#include "fastpca/sparse.hpp"

namespace fastpca {

// The implicit covariance operator X. Sparse backend: (1/n) sum x_i x_i^T over
// DataMatrix rows. Ensemble backend: sum p_i A_i (+ I when shifted).
// Immutable after construction; matvec is safe to call concurrently.
class CovarianceOperator {
 public:
  explicit CovarianceOperator(DataMatrix data) : backend_(std::move(data)) {}
  explicit CovarianceOperator(DenseEnsemble ensemble) : backend_(std::move(ensemble)) {}

  std::size_t dim() const;
  std::size_t components() const;  // n rows or n matrices
  std::size_t nnz_total() const;

  // Upper bound on lambda_1 implied by construction: 1 for normalized data and
  // unshifted ensembles, 2 for the PSD-shifted ensemble.
  double spectral_bound() const;

  const DataMatrix* data() const { return std::get_if<DataMatrix>(&backend_); }
  const DenseEnsemble* ensemble() const { return std::get_if<DenseEnsemble>(&backend_); }

  Vec matvec(std::span<const double> v) const;

  std::optional<double> lambda1_estimate;  // cached, purely advisory

 private:
  std::variant<DataMatrix, DenseEnsemble> backend_;
};

inline Vec cov_matvec(const CovarianceOperator& op, std::span<const double> v) {
  return op.matvec(v);
}

// M = lambda*I - X. matvec is evaluated as lambda*v[i] - (Xv)[i]; the
// expression order is fixed so tests can compare against it bit for bit.
class ShiftedOperator {
 public:
  ShiftedOperator(const CovarianceOperator& base, double lambda,
                  std::optional<double> known_gap_lower = std::nullopt)
      : base_(&base), lambda_(lambda), known_gap_lower_(known_gap_lower) {}

  const CovarianceOperator& base() const { return *base_; }
  double lambda() const noexcept { return lambda_; }
  std::optional<double> known_gap_lower() const noexcept { return known_gap_lower_; }
  std::size_t dim() const { return base_->dim(); }

  Vec matvec(std::span<const double> v) const {
    Vec xv = base_->matvec(v);
    for (std::size_t i = 0; i < xv.size(); ++i) xv[i] = lambda_ * v[i] - xv[i];
    return xv;
  }

 private:
  const CovarianceOperator* base_;  // non-owning; caller keeps it alive
  double lambda_;
  std::optional<double> known_gap_lower_;
};

// Dense d x d assembly of X (row-major), for the oracle cross-checks.
Vec assemble_dense(const CovarianceOperator& op);

}  // namespace fastpca
