#include "fastpca/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fastpca {

SparseVector::SparseVector(std::size_t dim, std::vector<Entry> entries)
    : dim_(dim), entries_(std::move(entries)) {
  std::uint32_t prev = 0;
  bool first = true;
  for (const auto& [idx, val] : entries_) {
    if (!first && idx <= prev) {
      throw InputError("SparseVector: indices must be strictly increasing");
    }
    if (idx >= dim_) {
      throw InputError("SparseVector: index " + std::to_string(idx) +
                       " out of range for dim " + std::to_string(dim_));
    }
    if (val == 0.0) {
      throw InputError("SparseVector: explicit zeros are not stored");
    }
    if (!std::isfinite(val)) {
      throw InputError("SparseVector: non-finite value");
    }
    prev = idx;
    first = false;
  }
}

SparseVector SparseVector::from_dense(std::span<const double> v) {
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) entries.emplace_back(static_cast<std::uint32_t>(i), v[i]);
  }
  return SparseVector(v.size(), std::move(entries));
}

double SparseVector::norm2() const {
  double s = 0.0;
  for (const auto& [idx, val] : entries_) s += val * val;
  return s;
}

double SparseVector::norm() const { return std::sqrt(norm2()); }

double SparseVector::dot(std::span<const double> v) const {
  check_dims(dim_, v.size(), "SparseVector::dot");
  double s = 0.0;
  for (const auto& [idx, val] : entries_) s += val * v[idx];
  return s;
}

void SparseVector::axpy_into(double alpha, std::span<double> y) const {
  check_dims(dim_, y.size(), "SparseVector::axpy_into");
  for (const auto& [idx, val] : entries_) y[idx] += alpha * val;
}

SparseVector SparseVector::scaled(double alpha) const {
  if (alpha == 0.0) return SparseVector(dim_, {});
  std::vector<Entry> out = entries_;
  for (auto& [idx, val] : out) val *= alpha;
  return SparseVector(dim_, std::move(out));
}

Vec SparseVector::to_dense() const {
  Vec out(dim_, 0.0);
  for (const auto& [idx, val] : entries_) out[idx] = val;
  return out;
}

void DataMatrix::validate() const {
  if (rows.size() != n) throw InputError("DataMatrix: row count mismatch");
  std::size_t nnz = 0;
  for (const auto& r : rows) {
    if (r.dim() != d) throw InputError("DataMatrix: row dimension mismatch");
    if (r.norm2() > 1.0 + 1e-12) {
      throw InputError("DataMatrix: row norm exceeds 1 after scaling");
    }
    nnz += r.nnz();
  }
  if (nnz != nnz_total) throw InputError("DataMatrix: nnz_total mismatch");
  if (!(scale > 0.0)) throw InputError("DataMatrix: scale must be positive");
}

DataMatrix make_data_matrix(std::vector<SparseVector> rows, double scale) {
  DataMatrix m;
  m.n = rows.size();
  m.d = rows.empty() ? 0 : rows.front().dim();
  m.rows = std::move(rows);
  m.scale = scale;
  for (const auto& r : m.rows) m.nnz_total += r.nnz();
  m.validate();
  return m;
}

DataMatrix normalize_dataset(std::vector<SparseVector> raw) {
  if (raw.empty()) throw InputError("normalize_dataset: empty dataset");
  double max_norm2 = 0.0;
  for (const auto& r : raw) max_norm2 = std::max(max_norm2, r.norm2());
  if (max_norm2 == 0.0) throw InputError("normalize_dataset: all rows are zero");
  double s = std::sqrt(max_norm2);
  std::vector<SparseVector> rows;
  rows.reserve(raw.size());
  for (auto& r : raw) rows.push_back(r.scaled(1.0 / s));
  return make_data_matrix(std::move(rows), s);
}

DataMatrix normalize_dataset(const std::vector<Vec>& raw_dense) {
  std::vector<SparseVector> rows;
  rows.reserve(raw_dense.size());
  for (const auto& r : raw_dense) rows.push_back(SparseVector::from_dense(r));
  return normalize_dataset(std::move(rows));
}

SparseSymMatrix SparseSymMatrix::from_triplets(std::size_t d,
                                               const std::vector<Triplet>& triplets) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> cells;
  for (const auto& t : triplets) {
    if (t.row >= d || t.col >= d) throw InputError("SparseSymMatrix: index out of range");
    if (!std::isfinite(t.value)) throw InputError("SparseSymMatrix: non-finite value");
    if (t.value == 0.0) continue;
    auto key = std::make_pair(t.row, t.col);
    auto [it, inserted] = cells.emplace(key, t.value);
    if (!inserted && it->second != t.value) {
      throw InputError("SparseSymMatrix: conflicting duplicate entry");
    }
  }
  // Mirror-check; a missing mirror entry is filled in.
  for (const auto& [key, val] : cells) {
    auto mirror = std::make_pair(key.second, key.first);
    auto it = cells.find(mirror);
    if (it == cells.end()) {
      cells.emplace(mirror, val);
    } else if (std::fabs(it->second - val) > 1e-12 * std::max(1.0, std::fabs(val))) {
      throw InputError("SparseSymMatrix: asymmetric entries at (" +
                       std::to_string(key.first) + "," + std::to_string(key.second) + ")");
    }
  }
  SparseSymMatrix m;
  m.d_ = d;
  m.rows_.resize(d);
  for (const auto& [key, val] : cells) {
    m.rows_[key.first].emplace_back(key.second, val);
    ++m.nnz_;
  }
  return m;
}

SparseSymMatrix SparseSymMatrix::from_dense(std::size_t d, std::span<const double> row_major) {
  if (row_major.size() != d * d) throw InputError("SparseSymMatrix: bad dense size");
  std::vector<Triplet> triplets;
  for (std::uint32_t i = 0; i < d; ++i) {
    for (std::uint32_t j = 0; j < d; ++j) {
      double v = row_major[i * d + j];
      if (v != 0.0) triplets.push_back({i, j, v});
    }
  }
  return from_triplets(d, triplets);
}

void SparseSymMatrix::matvec_add(std::span<const double> v, std::span<double> y,
                                 double weight) const {
  check_dims(v.size(), d_, "SparseSymMatrix::matvec_add");
  check_dims(y.size(), d_, "SparseSymMatrix::matvec_add");
  for (std::size_t i = 0; i < d_; ++i) {
    double s = 0.0;
    for (const auto& [j, val] : rows_[i]) s += val * v[j];
    y[i] += weight * s;
  }
}

void DenseEnsemble::validate() const {
  if (matrices.size() != n || weights.size() != n) {
    throw InputError("DenseEnsemble: component count mismatch");
  }
  if (n == 0) throw InputError("DenseEnsemble: empty ensemble");
  double total = 0.0;
  for (double p : weights) {
    if (p < 0.0) throw InputError("DenseEnsemble: negative weight");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    throw InputError("DenseEnsemble: weights must sum to 1 within 1e-12");
  }
  for (const auto& a : matrices) {
    if (a.dim() != d) throw InputError("DenseEnsemble: matrix dimension mismatch");
  }
}

DenseEnsemble make_dense_ensemble(Vec weights, std::vector<SparseSymMatrix> matrices,
                                  bool shifted) {
  DenseEnsemble e;
  e.n = matrices.size();
  e.d = matrices.empty() ? 0 : matrices.front().dim();
  e.weights = std::move(weights);
  e.matrices = std::move(matrices);
  e.shifted = shifted;
  for (const auto& a : e.matrices) {
    e.S = std::max(e.S, a.nnz());
    e.N += a.nnz();
  }
  e.validate();
  return e;
}

}  // namespace fastpca
