#include "fastpca/operators.hpp"

namespace fastpca {

std::size_t CovarianceOperator::dim() const {
  if (const auto* m = data()) return m->d;
  return ensemble()->d;
}

std::size_t CovarianceOperator::components() const {
  if (const auto* m = data()) return m->n;
  return ensemble()->n;
}

std::size_t CovarianceOperator::nnz_total() const {
  if (const auto* m = data()) return m->nnz_total;
  return ensemble()->N;
}

double CovarianceOperator::spectral_bound() const {
  if (const auto* e = ensemble()) return e->shifted ? 2.0 : 1.0;
  return 1.0;
}

Vec CovarianceOperator::matvec(std::span<const double> v) const {
  check_dims(v.size(), dim(), "cov_matvec");
  Vec y(dim(), 0.0);
  if (const auto* m = data()) {
    for (const auto& row : m->rows) {
      double c = row.dot(v);
      if (c != 0.0) row.axpy_into(c, y);
    }
    scale(y, 1.0 / static_cast<double>(m->n));
  } else {
    const auto* e = ensemble();
    for (std::size_t i = 0; i < e->n; ++i) {
      if (e->weights[i] != 0.0) e->matrices[i].matvec_add(v, y, e->weights[i]);
    }
    if (e->shifted) {
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = y[i] + v[i];
    }
  }
  return y;
}

Vec assemble_dense(const CovarianceOperator& op) {
  const std::size_t d = op.dim();
  Vec dense(d * d, 0.0);
  Vec basis(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    basis[j] = 1.0;
    Vec col = op.matvec(basis);
    basis[j] = 0.0;
    for (std::size_t i = 0; i < d; ++i) dense[i * d + j] = col[i];
  }
  return dense;
}

}  // namespace fastpca
