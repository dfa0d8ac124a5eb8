#include "fastpca/driver.hpp"

#include <algorithm>
#include <cmath>

namespace fastpca {

double theoretical_eps_tilde(double delta_hat, double eps, int m1, int m2) {
  double base = delta_hat / 8.0;
  double a = (1.0 / 16.0) * std::pow(base, m1 + 1);
  double b = (eps / 4.0) * std::pow(base, m2 + 1);
  return std::min(a, b);
}

ScheduleParams ScheduleParams::theoretical(std::size_t d, double delta_hat, double eps,
                                           double p) {
  ScheduleParams s;
  s.mode = Mode::theoretical;
  s.m1 = pm_iterations_crude(1.0 / 8.0, p, d);
  s.m2 = pm_iterations_accurate(3.0, eps / 2.0, p, d);
  s.eps_tilde = theoretical_eps_tilde(delta_hat, eps, s.m1, s.m2);
  if (!(s.eps_tilde > 0.0)) {
    throw InputError(
        "ScheduleParams: theoretical eps_tilde underflows at these phase lengths; "
        "use practical mode");
  }
  return s;
}

ScheduleParams ScheduleParams::theoretical_toy(int m1, int m2, double delta_hat, double eps) {
  if (m1 < 1 || m2 < 1) throw InputError("ScheduleParams: phase lengths must be >= 1");
  ScheduleParams s;
  s.mode = Mode::theoretical;
  s.m1 = m1;
  s.m2 = m2;
  s.eps_tilde = theoretical_eps_tilde(delta_hat, eps, m1, m2);
  if (!(s.eps_tilde > 0.0)) {
    throw InputError("ScheduleParams: theoretical eps_tilde underflows");
  }
  return s;
}

ScheduleParams ScheduleParams::practical(std::size_t d, double delta_hat, double eps, double p,
                                         double tol) {
  if (!(tol > 0.0)) throw InputError("ScheduleParams: tolerance must be positive");
  (void)delta_hat;
  ScheduleParams s;
  s.mode = Mode::practical;
  s.m1 = pm_iterations_crude(1.0 / 8.0, p, d);
  s.m2 = pm_iterations_accurate(3.0, eps / 2.0, p, d);
  s.eps_tilde = tol;
  return s;
}

double gap_estimate_delta(double m_inv_quadform, double eps) {
  if (eps < 0.0 || eps > 1.0) throw InputError("gap_estimate_delta: eps must be in [0, 1]");
  if (!(m_inv_quadform > 0.0)) {
    throw ToleranceError("gap_estimate_delta: non-positive quadratic form; the shift is not "
                         "above lambda_1");
  }
  return (1.0 - eps) / m_inv_quadform;
}

double inverse_condition_bound(double lambda, double lambda1, double delta) {
  if (!(lambda > lambda1)) throw InputError("inverse_condition_bound: need lambda > lambda_1");
  if (!(delta > 0.0)) throw InputError("inverse_condition_bound: need delta > 0");
  return (lambda - lambda1 + delta) / delta;
}

GammaFactors gamma_factors(double lambda1_m, double lambdad_m, int t) {
  if (!(lambdad_m > 0.0)) throw InputError("gamma_factors: need lambda_d > 0");
  if (lambda1_m < lambdad_m) throw InputError("gamma_factors: need lambda_1 >= lambda_d");
  if (t < 0) throw InputError("gamma_factors: need t >= 0");
  double hat;
  if (std::fabs(lambda1_m - 1.0) < 1e-12) {
    hat = static_cast<double>(t);
  } else {
    hat = (std::pow(lambda1_m, t) - 1.0) / (lambda1_m - 1.0);
  }
  GammaFactors g;
  g.unnormalized = hat;
  g.normalized = 2.0 / std::pow(lambdad_m, t) * hat;
  return g;
}

namespace {

int loop_guard_limit(double bound, double threshold) {
  double t = std::ceil(std::log((bound + threshold) / threshold) / std::log(4.0 / 3.0));
  return static_cast<int>(t) + 2;
}

// Applies M_s^{-1} to a fixed distance tolerance through the selected solver.
// One rng stream and one counter block persist across every apply in a run.
class InverseApplier {
 public:
  InverseApplier(const CovarianceOperator& X, InnerSolver kind, const DriverOptions& opts,
                 double eps_tilde, SeededRng rng, SolveCounters& counters)
      : x_(X),
        kind_(kind),
        opts_(opts),
        eps_tilde_(eps_tilde),
        rng_(rng),
        counters_(counters) {}

  void set_shift(double lambda, double sigma_hat) {
    lambda_ = lambda;
    sigma_hat_ = sigma_hat;
  }

  double lambda() const { return lambda_; }
  double sigma_hat() const { return sigma_hat_; }

  Vec apply(const Vec& rhs, const Vec* warm) {
    QuadraticProblem prob{ShiftedOperator(x_, lambda_), rhs, sigma_hat_,
                          component_smoothness(lambda_, opts_.beta_mode)};
    switch (kind_) {
      case InnerSolver::exact:
        return exact_solve(prob, eps_tilde_, warm, &counters_);
      case InnerSolver::svrg: {
        double r0 = warm_distance_bound(rhs, warm);
        SvrgConfig cfg = SvrgConfig::automatic(
            prob, std::min(opts_.svrg_epoch_cap, suggested_epochs(r0, eps_tilde_)), rng_,
            eps_tilde_);
        if (opts_.svrg_manual_m > 0) {
          cfg.mode = SvrgConfig::Mode::manual;
          cfg.m = opts_.svrg_manual_m;
          cfg.epochs = opts_.svrg_epoch_cap;
        }
        Vec out = x_.data() != nullptr ? svrg_solve(prob, cfg, warm ? *warm : Vec{}, &counters_)
                                       : svrg_dense_solve(prob, cfg, warm ? *warm : Vec{},
                                                          &counters_);
        rng_ = cfg.rng;
        return out;
      }
      case InnerSolver::catalyst: {
        CatalystConfig cfg;
        cfg.outer_iterations = opts_.catalyst_outer_cap;
        cfg.tol = eps_tilde_;
        cfg.inner.rng = rng_;
        cfg.inner.epochs = opts_.svrg_epoch_cap;
        Vec out = catalyst_solve(prob, cfg, warm ? *warm : Vec{}, &counters_);
        rng_ = cfg.inner.rng;
        return out;
      }
    }
    throw InputError("unknown inner solver");
  }

 private:
  double warm_distance_bound(const Vec& rhs, const Vec* warm) const {
    double r0 = norm(rhs) / sigma_hat_;
    if (warm != nullptr && !warm->empty()) r0 += norm(*warm);
    return std::max(1.0, r0);
  }

  const CovarianceOperator& x_;
  InnerSolver kind_;
  const DriverOptions& opts_;
  double eps_tilde_;
  SeededRng rng_;
  SolveCounters& counters_;
  double lambda_ = 0.0;
  double sigma_hat_ = 0.0;
};

struct PhaseResult {
  Vec w;        // unit vector
  Vec first_v;  // product of the shared start w0; warm start for the next shift
  Vec last_v;   // final product; warm start for the quadform solve
  int steps = 0;
};

PhaseResult inverse_pm_phase(InverseApplier& inv, const Vec& w0, int max_steps,
                             bool adaptive, const Vec* warm0,
                             const DriverOptions& opts, bool final_phase) {
  PhaseResult res;
  res.w = w0;
  const Vec* warm = warm0;
  double prev_norm = -1.0;
  for (int t = 0; t < max_steps; ++t) {
    Vec v = inv.apply(res.w, warm);
    double nv = norm(v);
    if (!(nv > 0.0) || !std::isfinite(nv)) {
      throw ToleranceError("shrink driver: inner solve returned a numerically zero vector");
    }
    res.w = scaled(v, 1.0 / nv);
    if (t == 0) res.first_v = v;
    res.last_v = std::move(v);
    warm = &res.last_v;
    res.steps = t + 1;
    if (final_phase && opts.oracle != nullptr && opts.stop_at_alignment.has_value() &&
        opts.oracle->alignment(res.w) >= *opts.stop_at_alignment) {
      break;
    }
    if (!final_phase && adaptive && t >= 2 && prev_norm > 0.0 &&
        std::fabs(nv - prev_norm) <= 0.02 * nv) {
      break;
    }
    prev_norm = nv;
  }
  return res;
}

struct LoopSpec {
  double lambda0 = 0.0;
  double exit_threshold = 0.0;  // delta_hat, or eps in gap-free mode
  int m1 = 0;
  int m2 = 0;
  double eps_tilde = 0.0;
  bool subtract_eps_tilde = true;  // Delta = 1/2 / (w^T v - eps_tilde)
  double sigma0 = 0.0;             // strong-convexity lower bound at lambda0
};

EigResult run_shrink_driver(const CovarianceOperator& X, const LoopSpec& spec,
                            InnerSolver inner, double p, SeededRng& rng,
                            const DriverOptions& opts, EigResult::Mode mode,
                            bool run_final_phase = true) {
  EigResult res;
  res.mode = mode;
  res.m1 = spec.m1;
  res.m2 = spec.m2;
  res.eps_tilde = spec.eps_tilde;
  res.p_target = p;
  res.trace.lambda0 = spec.lambda0;

  const std::size_t d = X.dim();
  Vec w0 = random_unit_vector(rng, d);
  InverseApplier inv(X, inner, opts, spec.eps_tilde, rng.split(0x1A5), res.counters);

  const int guard = loop_guard_limit(X.spectral_bound(), spec.exit_threshold);
  double lambda = spec.lambda0;
  double sigma_hat = spec.sigma0;
  double delta = 0.0;
  Vec shift_warm;  // first solve of a phase reuses the previous shift's product of w0

  int s = 0;
  while (true) {
    ++s;
    if (s > guard) {
      throw GuardError("shrink driver: loop exceeded " + std::to_string(guard) +
                       " iterations; the gap estimate or the inner solver is broken");
    }
    inv.set_shift(lambda, sigma_hat);
    PhaseResult phase = inverse_pm_phase(inv, w0, spec.m1, opts.adaptive_phases,
                                         shift_warm.empty() ? nullptr : &shift_warm, opts,
                                         /*final_phase=*/false);
    Vec v = inv.apply(phase.w, &phase.last_v);
    double q = dot(phase.w, v);
    double q_eff = spec.subtract_eps_tilde ? q - spec.eps_tilde : q;
    if (!(q_eff > 0.0)) {
      throw ToleranceError("shrink driver: non-positive corrected quadratic form; shift is "
                           "not above lambda_1");
    }
    delta = 0.5 / q_eff;
    double lambda_next = lambda - delta / 2.0;
    res.trace.history.push_back({lambda, delta, lambda_next, phase.steps});
    shift_warm = std::move(phase.first_v);
    lambda = lambda_next;
    sigma_hat = delta / 2.0;
    if (delta <= spec.exit_threshold) break;
  }
  res.trace.loop_iterations = s;
  res.trace.lambda_f = lambda;
  res.lambda_f = lambda;

  if (run_final_phase) {
    inv.set_shift(lambda, sigma_hat);
    PhaseResult fin = inverse_pm_phase(inv, w0, spec.m2, /*adaptive=*/false,
                                       shift_warm.empty() ? nullptr : &shift_warm, opts,
                                       /*final_phase=*/true);
    res.trace.final_pm_steps = fin.steps;
    res.w_f = std::move(fin.w);
  } else {
    res.w_f = w0;
  }

  Vec xw = X.matvec(res.w_f);
  ++res.counters.matvecs;
  res.rayleigh = dot(res.w_f, xw);
  res.trace.oracle_calls = res.counters.inner_solves;
  return res;
}

void check_driver_inputs(const CovarianceOperator& X, double threshold, double eps, double p) {
  if (!(threshold > 0.0) || threshold > 1.0) {
    throw InputError("shrink driver: gap estimate / accuracy must be in (0, 1]");
  }
  if (!(eps > 0.0) || eps >= 1.0) throw InputError("shrink driver: eps must be in (0, 1)");
  if (!(p > 0.0) || p >= 1.0) throw InputError("shrink driver: p must be in (0, 1)");
  if (X.dim() == 0) throw InputError("shrink driver: empty operator");
}

}  // namespace

EigResult shrink_exact(const CovarianceOperator& X, double delta_hat, double eps, double p,
                       SeededRng& rng, double exact_tol, const DriverOptions& opts) {
  check_driver_inputs(X, delta_hat, eps, p);
  LoopSpec spec;
  spec.lambda0 = X.spectral_bound() + delta_hat;
  spec.exit_threshold = delta_hat;
  spec.m1 = pm_iterations_crude(0.5, p, X.dim());
  spec.m2 = pm_iterations_accurate(4.0, eps, p, X.dim());
  spec.eps_tilde = exact_tol;
  spec.subtract_eps_tilde = false;
  spec.sigma0 = delta_hat;
  return run_shrink_driver(X, spec, InnerSolver::exact, p, rng, opts, EigResult::Mode::gap);
}

EigResult shrink_inexact(const CovarianceOperator& X, double delta_hat, double eps, double p,
                         InnerSolver inner, const ScheduleParams& schedule, SeededRng& rng,
                         const DriverOptions& opts) {
  check_driver_inputs(X, delta_hat, eps, p);
  LoopSpec spec;
  spec.lambda0 = X.spectral_bound() + delta_hat;
  spec.exit_threshold = delta_hat;
  spec.m1 = schedule.m1;
  spec.m2 = schedule.m2;
  spec.eps_tilde = schedule.eps_tilde;
  spec.subtract_eps_tilde = true;
  spec.sigma0 = delta_hat;
  return run_shrink_driver(X, spec, inner, p, rng, opts, EigResult::Mode::gap);
}

EigResult gapfree_eigenvalue(const CovarianceOperator& X, double eps, double p,
                             InnerSolver inner, SeededRng& rng, bool subsample,
                             const ScheduleParams* schedule, const DriverOptions& opts) {
  check_driver_inputs(X, std::min(eps, 1.0), eps, p);

  const std::size_t d = X.dim();
  std::size_t n_prime = static_cast<std::size_t>(
      std::ceil(8.0 * std::log(2.0 * static_cast<double>(d) / p) / (eps * eps)));

  const CovarianceOperator* target = &X;
  std::optional<CovarianceOperator> sub;
  std::size_t used = 0;
  if (subsample) {
    const DataMatrix* data = X.data();
    if (data == nullptr) {
      throw InputError("gapfree_eigenvalue: subsampling needs a DataMatrix backend");
    }
    if (n_prime < data->n) {
      SeededRng sub_rng = rng.split(0x5AB);
      std::vector<SparseVector> rows;
      rows.reserve(n_prime);
      for (std::size_t i = 0; i < n_prime; ++i) {
        rows.push_back(data->rows[sub_rng.uniform_index(data->n)]);
      }
      sub.emplace(make_data_matrix(std::move(rows), data->scale));
      target = &*sub;
      used = n_prime;
    }
  }

  LoopSpec spec;
  spec.lambda0 = target->spectral_bound() + eps;
  spec.exit_threshold = eps;
  spec.m1 = schedule ? schedule->m1 : pm_iterations_crude(1.0 / 8.0, p, d);
  spec.m2 = schedule ? schedule->m2 : pm_iterations_span(0.25, eps / 2.0, p, d);
  spec.eps_tilde = schedule ? schedule->eps_tilde : 1e-10;
  spec.subtract_eps_tilde = true;
  spec.sigma0 = eps;
  EigResult res = run_shrink_driver(*target, spec, inner, p, rng, opts,
                                    EigResult::Mode::gapfree);
  res.subsample_formula = n_prime;
  res.subsample_n = used;
  if (used > 0) {
    // Report the Rayleigh quotient on the full operator, not the subsample.
    Vec xw = X.matvec(res.w_f);
    ++res.counters.matvecs;
    res.rayleigh = dot(res.w_f, xw);
  }
  return res;
}

GapEstimate search_delta_hat(const CovarianceOperator& X, double eps, double p, SeededRng& rng,
                             const SearchOptions& opts) {
  if (X.dim() == 0) throw InputError("search_delta_hat: empty operator");
  const double eps_val = std::min(eps, 1e-2);
  const double tol = 1e-10;

  for (int k = 1; k <= opts.max_halvings; ++k) {
    double candidate = std::pow(2.0, -k);
    ScheduleParams sched = ScheduleParams::practical(X.dim(), candidate, eps_val, p, tol);
    Vec w_a, w_b;
    bool ok = true;
    for (int trial = 0; trial < 2 && ok; ++trial) {
      SeededRng trial_rng = rng.split(2 * static_cast<std::uint64_t>(k) + trial);
      try {
        EigResult r = shrink_inexact(X, candidate, eps_val, p, InnerSolver::exact, sched,
                                     trial_rng);
        // One extra Delta evaluation at lambda_f, cross-checked against the
        // final-shift sandwich lambda_f - lambda_1 in [candidate/4, 3c/2].
        SolveCounters scratch;
        QuadraticProblem prob{ShiftedOperator(X, r.lambda_f), r.w_f, candidate / 8.0,
                              component_smoothness(r.lambda_f, BetaMode::conservative)};
        Vec v = exact_solve(prob, tol, nullptr, &scratch);
        double q = dot(r.w_f, v) - tol;
        double delta_f = gap_estimate_delta(q, 0.5);
        if (delta_f > 1.5 * candidate || delta_f < candidate / 8.0) {
          ok = false;
        } else {
          (trial == 0 ? w_a : w_b) = std::move(r.w_f);
        }
      } catch (const Error&) {
        ok = false;
      }
    }
    if (ok) {
      double agree = dot(w_a, w_b);
      if (agree * agree >= opts.agreement) {
        GapEstimate est;
        est.delta_hat = candidate;
        est.source = GapEstimate::Source::search;
        return est;
      }
    }
  }
  throw NoGapError("search_delta_hat: no candidate validated down to 2^-" +
                   std::to_string(opts.max_halvings) +
                   "; the spectrum may have no usable gap, try gap-free mode");
}

BaselineResult power_baseline(const CovarianceOperator& X, double eps, double p,
                              SeededRng& rng, const SpectrumOracle* oracle,
                              std::optional<double> delta_hat,
                              std::optional<double> stop_at_alignment) {
  if (!(eps > 0.0) || eps >= 1.0) throw InputError("power_baseline: eps must be in (0, 1)");
  double kappa;
  if (oracle != nullptr) {
    double gap = oracle->gap();
    if (!(gap > 0.0)) {
      throw InputError("power_baseline: zero oracle eigengap; use gap-free mode");
    }
    kappa = std::max(1.0, oracle->lambda1() / gap);
  } else if (delta_hat.has_value()) {
    kappa = std::max(1.0, X.spectral_bound() / *delta_hat);
  } else {
    throw InputError("power_baseline: needs an oracle (d <= 512) or --delta-hat");
  }

  BaselineResult res;
  int cap = pm_iterations_accurate(kappa, eps, p, X.dim());
  Vec w = random_unit_vector(rng, X.dim());
  for (int t = 0; t < cap; ++t) {
    Vec xw = X.matvec(w);
    ++res.counters.matvecs;
    double n = norm(xw);
    if (!(n > 0.0)) throw ToleranceError("power_baseline: zero matvec");
    w = scaled(xw, 1.0 / n);
    res.iterations = t + 1;
    if (oracle != nullptr && stop_at_alignment.has_value() &&
        oracle->alignment(w) >= *stop_at_alignment) {
      break;
    }
  }
  Vec xw = X.matvec(w);
  ++res.counters.matvecs;
  res.rayleigh = dot(w, xw);
  res.w = std::move(w);
  return res;
}

}  // namespace fastpca
