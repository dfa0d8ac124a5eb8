#include "fastpca/power.hpp"

#include <cmath>

namespace fastpca {

namespace {

void check_schedule_args(double eps, double p, std::size_t d) {
  if (!(eps > 0.0) || eps > 1.0) throw InputError("pm_iterations: eps must be in (0, 1]");
  if (!(p > 0.0) || p >= 1.0) throw InputError("pm_iterations: p must be in (0, 1)");
  if (d < 1) throw InputError("pm_iterations: d must be >= 1");
}

int ceil_to_int(double x) {
  double c = std::ceil(x);
  if (c < 1.0) c = 1.0;
  return static_cast<int>(c);
}

}  // namespace

int pm_iterations_crude(double eps, double p, std::size_t d) {
  check_schedule_args(eps, p, d);
  double arg = 18.0 * static_cast<double>(d) / (p * p * eps);
  return ceil_to_int((1.0 / eps) * std::log(arg));
}

int pm_iterations_accurate(double kappa, double eps, double p, std::size_t d) {
  check_schedule_args(eps, p, d);
  if (!(kappa >= 1.0)) throw InputError("pm_iterations: kappa must be >= 1");
  double arg = 9.0 * static_cast<double>(d) / (p * p * eps);
  return ceil_to_int((kappa / 2.0) * std::log(arg));
}

int pm_iterations_span(double eps1, double eps2, double p, std::size_t d) {
  check_schedule_args(eps1, p, d);
  if (!(eps2 > 0.0) || eps2 > 1.0) throw InputError("pm_iterations: eps2 must be in (0, 1]");
  double arg = 9.0 * static_cast<double>(d) / (p * p * eps2);
  return ceil_to_int((1.0 / (2.0 * eps1)) * std::log(arg));
}

PmSchedule PmSchedule::crude(double eps, double p, std::size_t d) {
  return {PmMode::crude, eps, 0.0, p, 0.0, pm_iterations_crude(eps, p, d)};
}

PmSchedule PmSchedule::accurate(double kappa, double eps, double p, std::size_t d) {
  return {PmMode::accurate, eps, 0.0, p, kappa, pm_iterations_accurate(kappa, eps, p, d)};
}

PmSchedule PmSchedule::span(double eps1, double eps2, double p, std::size_t d) {
  return {PmMode::span, eps1, eps2, p, 0.0, pm_iterations_span(eps1, eps2, p, d)};
}

Vec power_method(const MatVec& M, Vec w0, int t) {
  if (t < 0) throw InputError("power_method: negative iteration count");
  double n0 = norm(w0);
  if (std::fabs(n0 - 1.0) > 1e-9) throw InputError("power_method: w0 must be a unit vector");
  Vec w = std::move(w0);
  for (int i = 0; i < t; ++i) {
    Vec next = M(w);
    double nn = norm(next);
    if (!(nn > 0.0) || !std::isfinite(nn)) {
      throw ToleranceError("power_method: operator returned a numerically zero vector");
    }
    scale(next, 1.0 / nn);
    w = std::move(next);
  }
  return w;
}

double rayleigh_quotient(const MatVec& M, std::span<const double> w) {
  if (std::fabs(norm(w) - 1.0) > 1e-9) {
    throw InputError("rayleigh_quotient: w must be a unit vector");
  }
  Vec mw = M(w);
  return dot(w, mw);
}

}  // namespace fastpca
