#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fastpca/vec.hpp"

namespace fastpca {

// One data row x_i. Entries are (index, value) pairs with strictly increasing
// indices below dim and no stored zeros.
class SparseVector {
 public:
  using Entry = std::pair<std::uint32_t, double>;

  SparseVector() = default;
  SparseVector(std::size_t dim, std::vector<Entry> entries);

  static SparseVector from_dense(std::span<const double> v);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  double norm2() const;
  double norm() const;
  double dot(std::span<const double> v) const;

  // y += alpha * x
  void axpy_into(double alpha, std::span<double> y) const;

  SparseVector scaled(double alpha) const;
  Vec to_dense() const;

 private:
  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
};

// The row collection {x_i} backing the implicit covariance X = (1/n) sum x x^T.
// All rows share the ambient dimension and, after construction through
// normalize_dataset, satisfy ||x_i|| <= 1. `scale` records the normalization
// factor, so eigenvalues of the original data are stored-value * scale^2.
struct DataMatrix {
  std::size_t d = 0;
  std::size_t n = 0;
  std::vector<SparseVector> rows;
  std::size_t nnz_total = 0;
  double scale = 1.0;

  void validate() const;  // throws InputError on a broken invariant
};

DataMatrix make_data_matrix(std::vector<SparseVector> rows, double scale = 1.0);

// Realizes the ||x_i|| <= 1 normalization: scale = max row norm, every row is
// divided by it. Rejects an all-zero dataset. Idempotent.
DataMatrix normalize_dataset(std::vector<SparseVector> raw);
DataMatrix normalize_dataset(const std::vector<Vec>& raw_dense);

// Symmetric sparse d x d matrix for the ensemble backend. Both triangles are
// stored; construction mirror-checks every entry.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;

  struct Triplet {
    std::uint32_t row, col;
    double value;
  };

  // Accepts either both (i,j) and (j,i) or a single triangle, which is
  // mirrored. Conflicting duplicates i.e. |a_ij - a_ji| > 1e-12*max(1,|a_ij|)
  // are rejected.
  static SparseSymMatrix from_triplets(std::size_t d, const std::vector<Triplet>& triplets);
  static SparseSymMatrix from_dense(std::size_t d, std::span<const double> row_major);

  std::size_t dim() const noexcept { return d_; }
  std::size_t nnz() const noexcept { return nnz_; }
  const std::vector<std::vector<SparseVector::Entry>>& rows() const noexcept { return rows_; }

  // y += weight * A * v
  void matvec_add(std::span<const double> v, std::span<double> y, double weight) const;

 private:
  std::size_t d_ = 0;
  std::size_t nnz_ = 0;
  std::vector<std::vector<SparseVector::Entry>> rows_;
};

// Weighted ensemble X = sum_i p_i A_i of symmetric matrices with ||A_i|| <= 1
// (declared by the caller; spot-checked in tests). When `shifted` is set the
// operator is sum_i p_i A_i + I, the PSD shift used when raw ensembles may be
// indefinite; component i is then A_i + I.
struct DenseEnsemble {
  std::size_t d = 0;
  std::size_t n = 0;
  Vec weights;
  std::vector<SparseSymMatrix> matrices;
  std::size_t S = 0;  // max per-matrix nnz
  std::size_t N = 0;  // total nnz
  bool shifted = false;

  void validate() const;
};

DenseEnsemble make_dense_ensemble(Vec weights, std::vector<SparseSymMatrix> matrices,
                                  bool shifted = false);

}  // namespace fastpca
