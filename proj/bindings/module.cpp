#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fastpca/driver.hpp"
#include "fastpca/io.hpp"
#include "fastpca/report.hpp"

namespace py = pybind11;
using namespace fastpca;

namespace {

CovarianceOperator operator_from_rows(const std::vector<Vec>& rows) {
  return CovarianceOperator(normalize_dataset(rows));
}

CovarianceOperator operator_from_plant(std::size_t d, std::size_t n, const Vec& spectrum,
                                       std::uint64_t seed) {
  SeededRng rng(seed);
  return CovarianceOperator(plant_spectrum(d, n, spectrum, rng).data);
}

py::dict trace_to_dict(const ShrinkTrace& t) {
  py::list hist;
  for (const auto& h : t.history) {
    py::dict e;
    e["lambda_prev"] = h.lambda_prev;
    e["delta"] = h.delta;
    e["lambda_next"] = h.lambda_next;
    e["pm_steps"] = h.pm_steps;
    hist.append(e);
  }
  py::dict d;
  d["history"] = hist;
  d["lambda0"] = t.lambda0;
  d["lambda_f"] = t.lambda_f;
  d["loop_iterations"] = t.loop_iterations;
  d["final_pm_steps"] = t.final_pm_steps;
  d["oracle_calls"] = t.oracle_calls;
  return d;
}

py::dict counters_to_dict(const SolveCounters& c) {
  py::dict d;
  d["inner_solves"] = c.inner_solves;
  d["cg_iterations"] = c.cg_iterations;
  d["svrg_epochs"] = c.svrg_epochs;
  d["component_grads"] = c.component_grads;
  d["full_grads"] = c.full_grads;
  d["matvecs"] = c.matvecs;
  return d;
}

py::dict eig_to_dict(const EigResult& r) {
  py::dict d;
  d["w"] = r.w_f;
  d["rayleigh"] = r.rayleigh;
  d["lambda_f"] = r.lambda_f;
  d["mode"] = r.mode == EigResult::Mode::gap ? "gap" : "gapfree";
  d["trace"] = trace_to_dict(r.trace);
  d["m1"] = r.m1;
  d["m2"] = r.m2;
  d["eps_tilde"] = r.eps_tilde;
  d["counters"] = counters_to_dict(r.counters);
  d["subsample_formula"] = r.subsample_formula;
  d["subsample_n"] = r.subsample_n;
  return d;
}

InnerSolver inner_from_name(const std::string& name) {
  if (name == "exact") return InnerSolver::exact;
  if (name == "svrg") return InnerSolver::svrg;
  if (name == "catalyst") return InnerSolver::catalyst;
  throw InputError("inner must be exact|svrg|catalyst");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Shift-and-invert PCA: leading eigenvector and eigenvalue solvers built on "
            "convex quadratic minimization";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NoGapError>(m, "NoGapError", PyExc_RuntimeError);
  py::register_exception<ToleranceError>(m, "ToleranceError", PyExc_RuntimeError);
  py::register_exception<GuardError>(m, "GuardError", PyExc_RuntimeError);

  py::class_<CovarianceOperator>(m, "CovarianceOperator")
      .def_static("from_rows", &operator_from_rows, py::arg("rows"),
                  "Normalize dense rows and wrap them as the implicit covariance")
      .def_static("plant", &operator_from_plant, py::arg("d"), py::arg("n"),
                  py::arg("spectrum"), py::arg("seed") = 0,
                  "Synthetic operator with the prescribed spectrum")
      .def_property_readonly("d", &CovarianceOperator::dim)
      .def_property_readonly("n", &CovarianceOperator::components)
      .def_property_readonly("nnz", &CovarianceOperator::nnz_total)
      .def("matvec", [](const CovarianceOperator& op, const Vec& v) { return op.matvec(v); })
      .def("dense", [](const CovarianceOperator& op) { return assemble_dense(op); });

  m.def("ingest", [](const std::string& path, const std::string& format) {
          return CovarianceOperator(ingest(path, format));
        },
        py::arg("path"), py::arg("format") = "libsvm");

  m.def("pm_iterations_crude", &pm_iterations_crude, py::arg("eps"), py::arg("p"),
        py::arg("d"));
  m.def("pm_iterations_accurate", &pm_iterations_accurate, py::arg("kappa"), py::arg("eps"),
        py::arg("p"), py::arg("d"));
  m.def("pm_iterations_span", &pm_iterations_span, py::arg("eps1"), py::arg("eps2"),
        py::arg("p"), py::arg("d"));

  m.def("dense_eigenvalues", [](const CovarianceOperator& op) {
          return dense_eigendecompose(op).eigenvalues;
        },
        "Full spectrum of the explicitly assembled operator (d <= 512)");

  m.def("exact_solve",
        [](const CovarianceOperator& op, double lam, const Vec& w, double sigma, double tol) {
          QuadraticProblem prob{ShiftedOperator(op, lam), w, sigma,
                                component_smoothness(lam, BetaMode::conservative)};
          return exact_solve(prob, tol);
        },
        py::arg("op"), py::arg("lam"), py::arg("w"), py::arg("sigma"), py::arg("tol") = 1e-10,
        "Solve (lam I - X) z = w by conjugate gradients with a residual certificate");

  m.def("svrg_solve",
        [](const CovarianceOperator& op, double lam, const Vec& w, double sigma, double tol,
           int epochs, std::uint64_t seed) {
          QuadraticProblem prob{ShiftedOperator(op, lam), w, sigma,
                                component_smoothness(lam, BetaMode::conservative)};
          SvrgConfig cfg = SvrgConfig::automatic(prob, epochs, SeededRng(seed), tol);
          return svrg_solve(prob, cfg, Vec{});
        },
        py::arg("op"), py::arg("lam"), py::arg("w"), py::arg("sigma"), py::arg("tol") = 1e-9,
        py::arg("epochs") = 100, py::arg("seed") = 0);

  m.def("shrink_exact",
        [](const CovarianceOperator& op, double delta_hat, double eps, double p,
           std::uint64_t seed) {
          SeededRng rng(seed);
          return eig_to_dict(shrink_exact(op, delta_hat, eps, p, rng));
        },
        py::arg("op"), py::arg("delta_hat"), py::arg("eps") = 1e-3, py::arg("p") = 0.1,
        py::arg("seed") = 0);

  m.def("shrink_inexact",
        [](const CovarianceOperator& op, double delta_hat, double eps, double p,
           const std::string& inner, double tol, std::uint64_t seed) {
          SeededRng rng(seed);
          ScheduleParams sched = ScheduleParams::practical(op.dim(), delta_hat, eps, p, tol);
          return eig_to_dict(
              shrink_inexact(op, delta_hat, eps, p, inner_from_name(inner), sched, rng));
        },
        py::arg("op"), py::arg("delta_hat"), py::arg("eps") = 1e-3, py::arg("p") = 0.1,
        py::arg("inner") = "svrg", py::arg("tol") = 1e-10, py::arg("seed") = 0);

  m.def("gapfree_eigenvalue",
        [](const CovarianceOperator& op, double eps, double p, const std::string& inner,
           bool subsample, std::uint64_t seed) {
          SeededRng rng(seed);
          return eig_to_dict(
              gapfree_eigenvalue(op, eps, p, inner_from_name(inner), rng, subsample));
        },
        py::arg("op"), py::arg("eps"), py::arg("p") = 0.1, py::arg("inner") = "svrg",
        py::arg("subsample") = false, py::arg("seed") = 0);

  m.def("search_delta_hat",
        [](const CovarianceOperator& op, double eps, double p, std::uint64_t seed) {
          SeededRng rng(seed);
          GapEstimate est = search_delta_hat(op, eps, p, rng);
          py::dict d;
          d["delta_hat"] = est.delta_hat;
          d["c1"] = est.c1;
          d["c2"] = est.c2;
          d["source"] = est.source == GapEstimate::Source::search ? "search" : "user";
          return d;
        },
        py::arg("op"), py::arg("eps") = 1e-3, py::arg("p") = 0.1, py::arg("seed") = 0);

  m.def("run_json",
        [](const std::string& config_json) {
          RunConfig cfg = config_from_json_text(config_json);
          return run(cfg).to_json();
        },
        "Run a full CLI-style config (JSON in, report JSON out)");
}
