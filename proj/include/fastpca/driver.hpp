#pragma once

#include <optional>

#include "fastpca/oracle.hpp"
#include "fastpca/power.hpp"
#include "fastpca/quad.hpp"

namespace fastpca {

// Eigengap estimate delta_hat with its declared bracket: c1*delta <= delta_hat <= c2*delta.
struct GapEstimate {
  double delta_hat = 0.0;
  double c1 = 0.5;
  double c2 = 0.75;
  enum class Source { user, search } source = Source::user;
};

// Phase lengths and the per-product numerical tolerance eps_tilde.
// theoretical mode evaluates
//   eps_tilde = min{ (1/16)(delta_hat/8)^(m1+1), (eps/4)(delta_hat/8)^(m2+1) },
// which underflows for realistic m1; practical mode substitutes a user
// tolerance and is the default.
struct ScheduleParams {
  enum class Mode { theoretical, practical };
  Mode mode = Mode::practical;
  int m1 = 0;
  int m2 = 0;
  double eps_tilde = 1e-10;

  static ScheduleParams theoretical(std::size_t d, double delta_hat, double eps, double p);
  // Toy phase lengths so the theoretical tolerance stays representable.
  static ScheduleParams theoretical_toy(int m1, int m2, double delta_hat, double eps);
  static ScheduleParams practical(std::size_t d, double delta_hat, double eps, double p,
                                  double tol = 1e-10);
};

double theoretical_eps_tilde(double delta_hat, double eps, int m1, int m2);

struct ShrinkStep {
  double lambda_prev = 0.0;
  double delta = 0.0;
  double lambda_next = 0.0;
  int pm_steps = 0;
};

struct ShrinkTrace {
  std::vector<ShrinkStep> history;
  double lambda0 = 0.0;
  double lambda_f = 0.0;
  int loop_iterations = 0;
  int final_pm_steps = 0;
  std::uint64_t oracle_calls = 0;  // inner-solve invocations across all phases
};

enum class InnerSolver { exact, svrg, catalyst };

struct EigResult {
  enum class Mode { gap, gapfree };
  Vec w_f;
  double rayleigh = 0.0;  // w_f^T X w_f
  double lambda_f = 0.0;
  Mode mode = Mode::gap;
  ShrinkTrace trace;
  int m1 = 0;
  int m2 = 0;
  double eps_tilde = 0.0;
  double p_target = 0.0;
  SolveCounters counters;
  std::size_t subsample_formula = 0;  // ceil(8 ln(2d/p) / eps^2)
  std::size_t subsample_n = 0;        // rows actually used, 0 when not subsampled
};

struct DriverOptions {
  BetaMode beta_mode = BetaMode::conservative;
  // Stop a crude phase once ||v_t|| plateaus (within 2%, t >= 3). Off by
  // default: the scheduled lengths carry the formal guarantee; the bench
  // harness turns this on for pass-count comparisons.
  bool adaptive_phases = false;
  // With an oracle attached: end the final phase once (w^T u_1)^2 reaches the
  // target. Bench-only, for matched-accuracy comparisons.
  std::optional<double> stop_at_alignment;
  const SpectrumOracle* oracle = nullptr;
  int svrg_epoch_cap = 400;       // per inner solve
  std::uint64_t svrg_manual_m = 0;  // 0: theoretical automatic inner-loop length
  int catalyst_outer_cap = 300;
};

// Delta = (1 - eps) / (w^T M^{-1} w); brackets the overshoot:
// (1-eps)(lambda - lambda_1) <= Delta <= lambda - lambda_1.
double gap_estimate_delta(double m_inv_quadform, double eps);

// Exact condition number (lambda - lambda_1 + delta) / delta of M^{-1}
// restricted to its top two eigenvalues.
double inverse_condition_bound(double lambda, double lambda1, double delta);

// Error amplification of the power method with per-step product error eps:
// after t steps the unnormalized iterate drifts by <= eps * unnormalized and
// the normalized one by <= eps * normalized.
struct GammaFactors {
  double normalized = 0.0;    // Gamma(M, t)
  double unnormalized = 0.0;  // Gamma_hat(M, t)
};
GammaFactors gamma_factors(double lambda1_m, double lambdad_m, int t);

// The shrinking inverse power loop with exact M^{-1} products (CG to
// exact_tol). Crude phases at accuracy 1/2; final phase sized for
// kappa(M_f^{-1}) <= 4.
EigResult shrink_exact(const CovarianceOperator& X, double delta_hat, double eps, double p,
                       SeededRng& rng, double exact_tol = 1e-12,
                       const DriverOptions& opts = {});

// The convex-optimization realization: every M^{-1} product is an inner solve
// to distance eps_tilde, Delta_s = 1/2 / (w^T v - eps_tilde), one shared
// random start seeds every phase.
EigResult shrink_inexact(const CovarianceOperator& X, double delta_hat, double eps, double p,
                         InnerSolver inner, const ScheduleParams& schedule, SeededRng& rng,
                         const DriverOptions& opts = {});

// Gap-free variant: the exit threshold is the accuracy target itself and the
// final phase uses the span schedule (eps1 = 1/4, eps2 = eps/2). When
// subsample is set, X is first replaced by an empirical average of
// ceil(8 ln(2d/p)/eps^2) uniformly sampled rows.
EigResult gapfree_eigenvalue(const CovarianceOperator& X, double eps, double p,
                             InnerSolver inner, SeededRng& rng, bool subsample = false,
                             const ScheduleParams* schedule = nullptr,
                             const DriverOptions& opts = {});

// Geometric halving search for delta_hat. Each candidate 2^-k is validated by
// two independently seeded runs: loop guard intact, the extra Delta evaluation
// at lambda_f consistent with the final-shift sandwich, and the two returned
// vectors aligned with each other. Degenerate spectra (no usable gap) fail the
// agreement check all the way to the floor.
struct SearchOptions {
  int max_halvings = 40;
  double agreement = 0.9;
};
GapEstimate search_delta_hat(const CovarianceOperator& X, double eps, double p, SeededRng& rng,
                             const SearchOptions& opts = {});

// Plain power iteration on X itself, the comparison baseline. Stops at the
// schedule cap, or earlier at the alignment target when an oracle is given.
struct BaselineResult {
  Vec w;
  double rayleigh = 0.0;
  int iterations = 0;
  SolveCounters counters;
};
BaselineResult power_baseline(const CovarianceOperator& X, double eps, double p,
                              SeededRng& rng, const SpectrumOracle* oracle = nullptr,
                              std::optional<double> delta_hat = std::nullopt,
                              std::optional<double> stop_at_alignment = std::nullopt);

}  // namespace fastpca
