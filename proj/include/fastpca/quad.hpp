#pragma once

#include <cstdint>
#include <optional>

#include "fastpca/operators.hpp"
#include "fastpca/rng.hpp"

namespace fastpca {

// Work accounting shared by every solver. component_grads counts stochastic
// steps (one row touch each); full_grads counts whole-data gradient or anchor
// evaluations; matvecs counts operator applications (power method, CG).
struct SolveCounters {
  std::uint64_t inner_solves = 0;
  std::uint64_t cg_iterations = 0;
  std::uint64_t svrg_epochs = 0;
  std::uint64_t component_grads = 0;
  std::uint64_t full_grads = 0;
  std::uint64_t matvecs = 0;

  SolveCounters& operator+=(const SolveCounters& o) {
    inner_solves += o.inner_solves;
    cg_iterations += o.cg_iterations;
    svrg_epochs += o.svrg_epochs;
    component_grads += o.component_grads;
    full_grads += o.full_grads;
    matvecs += o.matvecs;
    return *this;
  }

  // Data passes in the Table-1 sense: one per full-data touch, 1/n per row touch.
  double equivalent_passes(std::size_t n_components) const {
    return static_cast<double>(full_grads) + static_cast<double>(matvecs) +
           static_cast<double>(component_grads) / static_cast<double>(n_components);
  }
};

// Instance of min_z F(z) = 1/2 z^T M z - w^T z with M = lambda*I - X.
// sigma is a lower bound on lambda - lambda_1(X) (the strong convexity of F);
// beta bounds the smoothness of every component f_i.
struct QuadraticProblem {
  ShiftedOperator op;
  Vec w;
  double sigma = 0.0;
  double beta = 0.0;

  std::size_t dim() const { return op.dim(); }
  double objective(std::span<const double> z) const;       // F(z)
  Vec gradient(std::span<const double> z) const;           // M z - w
};

// Component smoothness bounds for f_i(z) = 1/2 z^T(lambda I - x_i x_i^T)z - w^T z.
// The conservative bound lambda + 1 always holds; the tight per-instance bound
// max(lambda, 1 - lambda) uses ||x_i|| <= 1.
enum class BetaMode { conservative, tight };
double component_smoothness(double lambda, BetaMode mode);

// ||z - z*|| <= sqrt(2 (F(z) - F(z*)) / sigma) by strong convexity.
double suboptimality_to_distance(const QuadraticProblem& prob, double f_gap);

// Conjugate gradient with a residual certificate: returns z with
// ||M z - w|| <= sigma * tol, hence ||z - z*|| <= tol. Iteration cap 10*d.
Vec exact_solve(const QuadraticProblem& prob, double tol, const Vec* z0 = nullptr,
                SolveCounters* counters = nullptr);

struct SvrgConfig {
  enum class Mode { automatic, manual };
  Mode mode = Mode::automatic;
  double eta = 0.0;      // step size; automatic: sigma / (7 beta^2)
  std::uint64_t m = 0;   // inner-loop length; automatic: ceil(1 / (2 eta^2 beta^2))
  int epochs = 1;        // epoch cap T
  double tol = 0.0;      // >0: stop once ||grad F|| <= sigma*tol (distance certificate)
  bool cold_start = false;  // start from the zero vector instead of z0
  SeededRng rng{0};

  static SvrgConfig automatic(const QuadraticProblem& prob, int epochs, SeededRng rng,
                              double tol = 0.0);
};

// Inner-loop length cap; the automatic m explodes for tiny sigma.
inline constexpr std::uint64_t kSvrgMaxInnerSteps = 100'000'000;

// Epochs needed to contract a distance bound r0 down to tol under per-epoch
// halving of the squared distance, with slack for the certificate to trigger.
int suggested_epochs(double r0, double tol);

// Algorithm: per epoch, anchor gradient mu = M z~ - w, then m stochastic steps
//   z <- z - eta * ((lambda I - x_i x_i^T)(z - z~) + mu),  i uniform,
// and z~ <- average of the m iterates z_0..z_{m-1}.
Vec svrg_solve(const QuadraticProblem& prob, SvrgConfig& cfg, const Vec& z0,
               SolveCounters* counters = nullptr);

// Same contract over a DenseEnsemble backend, sampling components by weight.
Vec svrg_dense_solve(const QuadraticProblem& prob, SvrgConfig& cfg, const Vec& z0,
                     SolveCounters* counters = nullptr);

struct CatalystConfig {
  double kappa_cat = -1.0;  // <0: use beta / sqrt(n)
  int outer_iterations = 20;
  SvrgConfig inner;
  double tol = 0.0;  // >0: stop once the original problem meets the certificate
};

// Accelerated proximal point: each outer step minimizes
// F(z) + kappa/2 ||z - y||^2 (again a shifted quadratic, at shift
// lambda + kappa) via SVRG, then extrapolates the anchor y.
Vec catalyst_solve(const QuadraticProblem& prob, CatalystConfig& cfg, const Vec& z0,
                   SolveCounters* counters = nullptr);

}  // namespace fastpca
