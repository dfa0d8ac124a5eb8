#pragma once

#include <functional>

#include "fastpca/vec.hpp"

namespace fastpca {

using MatVec = std::function<Vec(std::span<const double>)>;

enum class PmMode { crude, accurate, span };

// Iteration schedules for the power method. Natural log throughout.
//   crude:    ceil((1/eps)      * ln(18 d / (p^2 eps)))   -> w^T M w >= (1-eps) lambda_1
//   accurate: ceil((kappa/2)    * ln( 9 d / (p^2 eps)))   -> (w^T u_1)^2 >= 1-eps
//   span:     ceil((1/(2 eps1)) * ln( 9 d / (p^2 eps2)))  -> tail mass below (1-eps1) lambda_1 is <= eps2
struct PmSchedule {
  PmMode mode = PmMode::crude;
  double epsilon = 0.0;
  double epsilon2 = 0.0;  // span mode only
  double p = 0.0;
  double kappa = 0.0;  // accurate mode only
  int iterations = 0;

  static PmSchedule crude(double eps, double p, std::size_t d);
  static PmSchedule accurate(double kappa, double eps, double p, std::size_t d);
  static PmSchedule span(double eps1, double eps2, double p, std::size_t d);
};

int pm_iterations_crude(double eps, double p, std::size_t d);
int pm_iterations_accurate(double kappa, double eps, double p, std::size_t d);
int pm_iterations_span(double eps1, double eps2, double p, std::size_t d);

// w_t <- M w_{t-1} / ||M w_{t-1}||, renormalized every iteration. The operator
// must be positive definite (caller's responsibility); a numerically zero
// product reports a singular operator.
Vec power_method(const MatVec& M, Vec w0, int t);

// w^T (M w) for a unit vector w (checked to 1e-9).
double rayleigh_quotient(const MatVec& M, std::span<const double> w);

}  // namespace fastpca
