#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "fastpca/errors.hpp"

namespace fastpca {

using Vec = std::vector<double>;

inline void check_dims(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    throw InputError(std::string(where) + ": dimension mismatch (" +
                     std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  check_dims(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(norm2(a)); }

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_dims(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(std::span<double> x, double alpha) {
  for (double& v : x) v *= alpha;
}

inline Vec scaled(std::span<const double> x, double alpha) {
  Vec out(x.begin(), x.end());
  scale(out, alpha);
  return out;
}

inline Vec sub(std::span<const double> a, std::span<const double> b) {
  check_dims(a.size(), b.size(), "sub");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline double dist(std::span<const double> a, std::span<const double> b) {
  check_dims(a.size(), b.size(), "dist");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double diff = a[i] - b[i];
    s += diff * diff;
  }
  return std::sqrt(s);
}

// x /= ||x||; throws if the norm is numerically zero.
inline void normalize(std::span<double> x) {
  double nx = norm(x);
  if (!(nx > 0.0) || !std::isfinite(nx)) {
    throw ToleranceError("normalize: vector has zero or non-finite norm");
  }
  scale(x, 1.0 / nx);
}

}  // namespace fastpca
