#include "fastpca/quad.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace fastpca {

double QuadraticProblem::objective(std::span<const double> z) const {
  Vec mz = op.matvec(z);
  return 0.5 * dot(z, mz) - dot(w, z);
}

Vec QuadraticProblem::gradient(std::span<const double> z) const {
  Vec g = op.matvec(z);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] -= w[i];
  return g;
}

double component_smoothness(double lambda, BetaMode mode) {
  if (mode == BetaMode::conservative) return lambda + 1.0;
  return std::max(lambda, 1.0 - lambda);
}

double suboptimality_to_distance(const QuadraticProblem& prob, double f_gap) {
  if (f_gap < 0.0) throw InputError("suboptimality_to_distance: negative objective gap");
  if (!(prob.sigma > 0.0)) throw InputError("suboptimality_to_distance: sigma must be positive");
  return std::sqrt(2.0 * f_gap / prob.sigma);
}

Vec exact_solve(const QuadraticProblem& prob, double tol, const Vec* z0,
                SolveCounters* counters) {
  if (!(prob.sigma > 0.0)) throw InputError("exact_solve: sigma must be positive");
  if (!(tol > 0.0)) throw InputError("exact_solve: tol must be positive");
  const std::size_t d = prob.dim();
  check_dims(prob.w.size(), d, "exact_solve");

  SolveCounters local;
  SolveCounters& c = counters ? *counters : local;
  ++c.inner_solves;

  Vec z(d, 0.0);
  Vec r = prob.w;
  if (z0 != nullptr && !z0->empty()) {
    check_dims(z0->size(), d, "exact_solve warm start");
    z = *z0;
    Vec mz = prob.op.matvec(z);
    ++c.matvecs;
    for (std::size_t i = 0; i < d; ++i) r[i] = prob.w[i] - mz[i];
  }

  const double target = prob.sigma * tol;
  double rr = norm2(r);
  if (std::sqrt(rr) <= target) return z;

  Vec p = r;
  Vec mp(d);
  const std::size_t max_iter = 10 * d;
  for (std::size_t it = 0; it < max_iter; ++it) {
    mp = prob.op.matvec(p);
    ++c.matvecs;
    ++c.cg_iterations;
    double pmp = dot(p, mp);
    if (!(pmp > 0.0)) {
      throw ToleranceError("exact_solve: operator is not positive definite along the search "
                           "direction; shift is not above lambda_1");
    }
    double alpha = rr / pmp;
    axpy(alpha, p, z);
    axpy(-alpha, mp, r);
    double rr_next = norm2(r);
    if (std::sqrt(rr_next) <= target) return z;
    double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < d; ++i) p[i] = r[i] + beta * p[i];
  }
  throw ToleranceError("exact_solve: no convergence within " + std::to_string(max_iter) +
                       " iterations, residual " + std::to_string(std::sqrt(rr)));
}

SvrgConfig SvrgConfig::automatic(const QuadraticProblem& prob, int epochs, SeededRng rng,
                                 double tol) {
  if (!(prob.sigma > 0.0)) throw InputError("SvrgConfig: sigma must be positive");
  if (!(prob.beta >= prob.sigma)) throw InputError("SvrgConfig: beta must be >= sigma");
  SvrgConfig cfg;
  cfg.mode = Mode::automatic;
  cfg.eta = prob.sigma / (7.0 * prob.beta * prob.beta);
  double m_real = std::ceil(1.0 / (2.0 * cfg.eta * cfg.eta * prob.beta * prob.beta));
  if (m_real > static_cast<double>(kSvrgMaxInnerSteps)) {
    std::cerr << "fastpca: svrg inner-loop length " << m_real << " capped at "
              << kSvrgMaxInnerSteps << "; sigma/beta is tiny, expect slow epochs\n";
    cfg.m = kSvrgMaxInnerSteps;
  } else {
    cfg.m = static_cast<std::uint64_t>(m_real);
  }
  cfg.epochs = epochs;
  cfg.tol = tol;
  cfg.rng = rng;
  return cfg;
}

int suggested_epochs(double r0, double tol) {
  if (!(tol > 0.0)) return 1;
  double ratio = std::max(2.0, r0 / tol);
  return 2 * static_cast<int>(std::ceil(std::log2(ratio))) + 8;
}

namespace {

// Component sampler shared by the uniform and weighted paths: one uniform draw
// per step, so trajectories couple across backends given the same seed.
class WeightedSampler {
 public:
  WeightedSampler(std::size_t n, const Vec* weights) : n_(n) {
    uniform_ = true;
    if (weights != nullptr) {
      double u = 1.0 / static_cast<double>(n);
      for (double p : *weights) {
        if (std::fabs(p - u) > 1e-15) {
          uniform_ = false;
          break;
        }
      }
      if (!uniform_) {
        cumulative_.resize(n);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          acc += (*weights)[i];
          cumulative_[i] = acc;
        }
        cumulative_.back() = 1.0;
      }
    }
  }

  std::size_t draw(SeededRng& rng) const {
    double u = rng.uniform();
    if (uniform_) {
      std::size_t i = static_cast<std::size_t>(u * static_cast<double>(n_));
      return i < n_ ? i : n_ - 1;
    }
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(it - cumulative_.begin(), n_ - 1);
  }

 private:
  std::size_t n_;
  bool uniform_;
  Vec cumulative_;
};

// One variance-reduced epoch loop shared by both backends. `component_apply`
// computes (lambda I - C_i) u into `out` for component i.
template <typename ComponentApply>
Vec svrg_run(const QuadraticProblem& prob, SvrgConfig& cfg, const Vec& z0,
             SolveCounters& c, const WeightedSampler& sampler,
             ComponentApply&& component_apply) {
  if (!(prob.sigma > 0.0)) throw InputError("svrg_solve: sigma must be positive");
  if (!(prob.beta >= prob.sigma)) throw InputError("svrg_solve: beta must be >= sigma");
  if (cfg.mode == SvrgConfig::Mode::manual && (!(cfg.eta > 0.0) || cfg.m == 0)) {
    throw InputError("svrg_solve: manual config needs eta > 0 and m >= 1");
  }
  const std::size_t d = prob.dim();
  check_dims(prob.w.size(), d, "svrg_solve");
  ++c.inner_solves;

  Vec anchor = (cfg.cold_start || z0.empty()) ? Vec(d, 0.0) : z0;
  check_dims(anchor.size(), d, "svrg_solve warm start");

  const double certificate = prob.sigma * cfg.tol;
  const double blow_up =
      1e6 * std::max(1.0, norm(anchor) + norm(prob.w) / prob.sigma);
  const double blow_up2 = blow_up * blow_up;
  const double eta = cfg.eta;

  Vec z(d), diff(d), comp(d), sum(d);
  for (int s = 0; s < cfg.epochs; ++s) {
    Vec mu = prob.op.matvec(anchor);  // anchor gradient, also the certificate probe
    ++c.full_grads;
    for (std::size_t i = 0; i < d; ++i) mu[i] -= prob.w[i];
    if (cfg.tol > 0.0 && norm(mu) <= certificate) return anchor;

    z = anchor;
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::uint64_t t = 0; t < cfg.m; ++t) {
      std::size_t idx = sampler.draw(cfg.rng);
      for (std::size_t i = 0; i < d; ++i) diff[i] = z[i] - anchor[i];
      component_apply(idx, diff, comp);  // comp = (lambda I - C_idx) diff
      for (std::size_t i = 0; i < d; ++i) {
        z[i] -= eta * (comp[i] + mu[i]);
        sum[i] += z[i];
      }
      ++c.component_grads;
      if ((t & 63) == 0 && norm2(z) > blow_up2) {
        throw ToleranceError("svrg_solve: iterate diverged; reduce eta (manual mode)");
      }
    }
    double inv_m = 1.0 / static_cast<double>(cfg.m);
    for (std::size_t i = 0; i < d; ++i) anchor[i] = sum[i] * inv_m;
    ++c.svrg_epochs;
  }
  if (cfg.tol > 0.0) {
    Vec g = prob.gradient(anchor);
    ++c.full_grads;
    if (norm(g) > certificate) {
      throw ToleranceError("svrg_solve: certificate not met after " +
                           std::to_string(cfg.epochs) + " epochs");
    }
  }
  return anchor;
}

}  // namespace

Vec svrg_solve(const QuadraticProblem& prob, SvrgConfig& cfg, const Vec& z0,
               SolveCounters* counters) {
  const DataMatrix* data = prob.op.base().data();
  if (data == nullptr) {
    throw InputError("svrg_solve: needs a DataMatrix backend (see svrg_dense_solve)");
  }
  SolveCounters local;
  SolveCounters& c = counters ? *counters : local;
  const double lambda = prob.op.lambda();
  WeightedSampler sampler(data->n, nullptr);
  return svrg_run(prob, cfg, z0, c, sampler,
                  [&](std::size_t idx, const Vec& u, Vec& out) {
                    const SparseVector& x = data->rows[idx];
                    double xu = x.dot(u);
                    for (std::size_t i = 0; i < u.size(); ++i) out[i] = lambda * u[i];
                    if (xu != 0.0) x.axpy_into(-xu, out);
                  });
}

Vec svrg_dense_solve(const QuadraticProblem& prob, SvrgConfig& cfg, const Vec& z0,
                     SolveCounters* counters) {
  const DenseEnsemble* ens = prob.op.base().ensemble();
  if (ens == nullptr) {
    throw InputError("svrg_dense_solve: needs a DenseEnsemble backend");
  }
  SolveCounters local;
  SolveCounters& c = counters ? *counters : local;
  const double lambda = prob.op.lambda();
  const bool shifted = ens->shifted;
  WeightedSampler sampler(ens->n, &ens->weights);
  return svrg_run(prob, cfg, z0, c, sampler,
                  [&](std::size_t idx, const Vec& u, Vec& out) {
                    for (std::size_t i = 0; i < u.size(); ++i) out[i] = lambda * u[i];
                    ens->matrices[idx].matvec_add(u, out, -1.0);
                    if (shifted) {
                      for (std::size_t i = 0; i < u.size(); ++i) out[i] -= u[i];
                    }
                  });
}

Vec catalyst_solve(const QuadraticProblem& prob, CatalystConfig& cfg, const Vec& z0,
                   SolveCounters* counters) {
  if (!(prob.sigma > 0.0)) throw InputError("catalyst_solve: sigma must be positive");
  if (cfg.outer_iterations < 1) throw InputError("catalyst_solve: need >= 1 outer iteration");
  SolveCounters local;
  SolveCounters& c = counters ? *counters : local;

  const std::size_t d = prob.dim();
  const std::size_t n = prob.op.base().components();
  const double kappa =
      cfg.kappa_cat >= 0.0 ? cfg.kappa_cat : prob.beta / std::sqrt(static_cast<double>(n));
  const double q = prob.sigma / (prob.sigma + kappa);

  Vec x = z0.empty() ? Vec(d, 0.0) : z0;
  Vec y = x;
  double alpha = std::sqrt(q);
  const double rho = 0.9 * std::sqrt(q);
  const double r0 = std::max(1.0, norm(x) + norm(prob.w) / prob.sigma);
  const bool sparse_backend = prob.op.base().data() != nullptr;

  for (int k = 0; k < cfg.outer_iterations; ++k) {
    QuadraticProblem aug{ShiftedOperator(prob.op.base(), prob.op.lambda() + kappa,
                                         prob.op.known_gap_lower()),
                         prob.w, prob.sigma + kappa, prob.beta + kappa};
    axpy(kappa, y, aug.w);

    SvrgConfig inner = cfg.inner;
    inner.rng = cfg.inner.rng;  // continue the shared stream
    if (cfg.tol > 0.0) {
      // Ladder of inner tolerances; the floor sits a factor q below the outer
      // target so the proximal fixed point can actually satisfy the original
      // certificate.
      inner.tol = std::max(0.25 * q * cfg.tol, r0 * std::pow(1.0 - rho, k + 1));
      inner.epochs = suggested_epochs(r0, inner.tol);
    }
    if (inner.mode == SvrgConfig::Mode::automatic) {
      SvrgConfig autocfg = SvrgConfig::automatic(aug, inner.epochs, inner.rng, inner.tol);
      autocfg.cold_start = inner.cold_start;
      inner = autocfg;
    }
    Vec x_next = sparse_backend ? svrg_solve(aug, inner, x, &c)
                                : svrg_dense_solve(aug, inner, x, &c);
    cfg.inner.rng = inner.rng;  // persist stream position across outer steps

    if (cfg.tol > 0.0) {
      Vec g = prob.gradient(x_next);
      ++c.full_grads;
      if (norm(g) <= prob.sigma * cfg.tol) return x_next;
    }

    double alpha_prev = alpha;
    double tmp = q - alpha_prev * alpha_prev;
    alpha = 0.5 * (tmp + std::sqrt(tmp * tmp + 4.0 * alpha_prev * alpha_prev));
    double beta_mom = alpha_prev * (1.0 - alpha_prev) / (alpha_prev * alpha_prev + alpha);
    for (std::size_t i = 0; i < d; ++i) {
      y[i] = x_next[i] + beta_mom * (x_next[i] - x[i]);
    }
    x = std::move(x_next);
  }
  if (cfg.tol > 0.0) {
    Vec g = prob.gradient(x);
    ++c.full_grads;
    if (norm(g) > prob.sigma * cfg.tol) {
      throw ToleranceError("catalyst_solve: certificate not met within outer budget");
    }
  }
  return x;
}

}  // namespace fastpca
