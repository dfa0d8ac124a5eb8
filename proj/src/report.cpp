#include "fastpca/report.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace fastpca {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv(kWorkersEnvVar)) {
    int w = std::atoi(env);
    if (w > 0) return w;
  }
  return 1;
}

void RunConfig::validate() const {
  if (input.empty()) throw InputError("config: input is required");
  if (format != "libsvm" && format != "csv") {
    throw InputError("config: format must be libsvm or csv");
  }
  if (mode != "gap" && mode != "gapfree" && mode != "shrink-exact" &&
      mode != "power-baseline") {
    throw InputError("config: mode must be gap|gapfree|shrink-exact|power-baseline");
  }
  if (inner != "exact" && inner != "svrg" && inner != "catalyst") {
    throw InputError("config: inner must be exact|svrg|catalyst");
  }
  if (!(epsilon > 0.0) || epsilon >= 1.0) throw InputError("config: epsilon must be in (0,1)");
  if (!(p > 0.0) || p >= 1.0) throw InputError("config: p must be in (0,1)");
  if ((mode == "gap" || mode == "shrink-exact") && !delta_hat.has_value() && !search_gap) {
    throw InputError("config: mode=" + mode + " requires --delta-hat or --search-gap");
  }
  if (delta_hat.has_value() && (!(*delta_hat > 0.0) || *delta_hat > 1.0)) {
    throw InputError("config: delta-hat must be in (0,1]");
  }
  if (schedule != "theoretical" && schedule != "practical") {
    throw InputError("config: schedule must be theoretical or practical");
  }
  if (!(tol > 0.0)) throw InputError("config: tol must be positive");
  if (out_format != "json" && out_format != "csv") {
    throw InputError("config: out-format must be json or csv");
  }
  if (repeats < 1) throw InputError("config: repeats must be >= 1");
  if (workers < 0) throw InputError("config: workers must be >= 0");
  if (beta_mode != "conservative" && beta_mode != "tight") {
    throw InputError("config: beta-mode must be conservative or tight");
  }
  if (stop_at_alignment.has_value() &&
      (!(*stop_at_alignment > 0.0) || *stop_at_alignment > 1.0)) {
    throw InputError("config: stop-at-alignment must be in (0,1]");
  }
}

namespace {

InnerSolver parse_inner(const std::string& s) {
  if (s == "exact") return InnerSolver::exact;
  if (s == "svrg") return InnerSolver::svrg;
  return InnerSolver::catalyst;
}

json counters_to_json(const SolveCounters& c) {
  json j;
  j["inner_solves"] = c.inner_solves;
  j["cg_iterations"] = c.cg_iterations;
  j["svrg_epochs"] = c.svrg_epochs;
  j["component_grads"] = c.component_grads;
  j["full_grads"] = c.full_grads;
  j["matvecs"] = c.matvecs;
  return j;
}

void counters_from_json(const json& j, SolveCounters& c) {
  c.inner_solves = j.at("inner_solves").get<std::uint64_t>();
  c.cg_iterations = j.at("cg_iterations").get<std::uint64_t>();
  c.svrg_epochs = j.at("svrg_epochs").get<std::uint64_t>();
  c.component_grads = j.at("component_grads").get<std::uint64_t>();
  c.full_grads = j.at("full_grads").get<std::uint64_t>();
  c.matvecs = j.at("matvecs").get<std::uint64_t>();
}

json config_to_json_obj(const RunConfig& c) {
  json j;
  j["input"] = c.input;
  j["format"] = c.format;
  j["mode"] = c.mode;
  j["inner"] = c.inner;
  j["epsilon"] = c.epsilon;
  j["p"] = c.p;
  if (c.delta_hat.has_value()) {
    j["delta_hat"] = *c.delta_hat;
  } else {
    j["delta_hat"] = nullptr;
  }
  j["search_gap"] = c.search_gap;
  j["seed"] = c.seed;
  j["subsample"] = c.subsample;
  j["schedule"] = c.schedule;
  j["tol"] = c.tol;
  j["out"] = c.out;
  j["out_format"] = c.out_format;
  j["repeats"] = c.repeats;
  j["workers"] = c.workers;
  j["timings"] = c.timings;
  j["beta_mode"] = c.beta_mode;
  j["adaptive_phases"] = c.adaptive_phases;
  if (c.stop_at_alignment.has_value()) {
    j["stop_at_alignment"] = *c.stop_at_alignment;
  } else {
    j["stop_at_alignment"] = nullptr;
  }
  return j;
}

RunConfig config_from_json_obj(const json& j) {
  RunConfig c;
  c.input = j.at("input").get<std::string>();
  if (j.contains("format")) c.format = j["format"].get<std::string>();
  if (j.contains("mode")) c.mode = j["mode"].get<std::string>();
  if (j.contains("inner")) c.inner = j["inner"].get<std::string>();
  if (j.contains("epsilon")) c.epsilon = j["epsilon"].get<double>();
  if (j.contains("p")) c.p = j["p"].get<double>();
  if (j.contains("delta_hat") && !j["delta_hat"].is_null()) {
    c.delta_hat = j["delta_hat"].get<double>();
  }
  if (j.contains("search_gap")) c.search_gap = j["search_gap"].get<bool>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("subsample")) c.subsample = j["subsample"].get<bool>();
  if (j.contains("schedule")) c.schedule = j["schedule"].get<std::string>();
  if (j.contains("tol")) c.tol = j["tol"].get<double>();
  if (j.contains("out")) c.out = j["out"].get<std::string>();
  if (j.contains("out_format")) c.out_format = j["out_format"].get<std::string>();
  if (j.contains("repeats")) c.repeats = j["repeats"].get<int>();
  if (j.contains("workers")) c.workers = j["workers"].get<int>();
  if (j.contains("timings")) c.timings = j["timings"].get<bool>();
  if (j.contains("beta_mode")) c.beta_mode = j["beta_mode"].get<std::string>();
  if (j.contains("adaptive_phases")) c.adaptive_phases = j["adaptive_phases"].get<bool>();
  if (j.contains("stop_at_alignment") && !j["stop_at_alignment"].is_null()) {
    c.stop_at_alignment = j["stop_at_alignment"].get<double>();
  }
  return c;
}

}  // namespace

std::string config_to_json(const RunConfig& config) {
  return config_to_json_obj(config).dump(2);
}

RunConfig config_from_json_text(const std::string& text) {
  json j = json::parse(text);
  return config_from_json_obj(j);
}

std::vector<RunConfig> configs_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open bench config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw InputError(std::string("bench config: ") + e.what());
  }
  if (!j.is_array()) throw InputError("bench config must be a JSON array of run configs");
  std::vector<RunConfig> out;
  for (const auto& item : j) out.push_back(config_from_json_obj(item));
  return out;
}

std::string RunReport::to_json() const {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["config"] = config_to_json_obj(config);
  j["exit_code"] = exit_code;
  j["error"] = error;
  json r;
  r["mode"] = mode;
  r["rayleigh"] = rayleigh;
  r["lambda_f"] = lambda_f;
  r["w_f"] = w_f;
  r["loop_iterations"] = loop_iterations;
  r["m1"] = m1;
  r["m2"] = m2;
  r["final_pm_steps"] = final_pm_steps;
  r["eps_tilde"] = eps_tilde;
  r["delta_hat_used"] = delta_hat_used;
  r["gap_source"] = gap_source;
  json hist = json::array();
  for (const auto& h : history) {
    json e;
    e["lambda_prev"] = h.lambda_prev;
    e["delta"] = h.delta;
    e["lambda_next"] = h.lambda_next;
    e["pm_steps"] = h.pm_steps;
    hist.push_back(e);
  }
  r["history"] = hist;
  r["subsample_formula"] = subsample_formula;
  r["subsample_n"] = subsample_n;
  j["result"] = r;
  if (oracle.has_value()) {
    json o;
    o["lambda1"] = oracle->lambda1;
    o["delta"] = oracle->delta;
    o["alignment"] = oracle->alignment;
    o["rayleigh_gap"] = oracle->rayleigh_gap;
    j["oracle"] = o;
  } else {
    j["oracle"] = nullptr;
  }
  j["counters"] = counters_to_json(counters);
  j["equivalent_passes"] = equivalent_passes;
  j["wall_time_ms"] = wall_time_ms;
  return j.dump(2);
}

RunReport RunReport::from_json(const std::string& text) {
  json j = json::parse(text);
  RunReport rep;
  rep.config = config_from_json_obj(j.at("config"));
  rep.exit_code = j.at("exit_code").get<int>();
  rep.error = j.at("error").get<std::string>();
  const json& r = j.at("result");
  rep.mode = r.at("mode").get<std::string>();
  rep.rayleigh = r.at("rayleigh").get<double>();
  rep.lambda_f = r.at("lambda_f").get<double>();
  rep.w_f = r.at("w_f").get<Vec>();
  rep.loop_iterations = r.at("loop_iterations").get<int>();
  rep.m1 = r.at("m1").get<int>();
  rep.m2 = r.at("m2").get<int>();
  rep.final_pm_steps = r.at("final_pm_steps").get<int>();
  rep.eps_tilde = r.at("eps_tilde").get<double>();
  rep.delta_hat_used = r.at("delta_hat_used").get<double>();
  rep.gap_source = r.at("gap_source").get<std::string>();
  for (const auto& e : r.at("history")) {
    rep.history.push_back({e.at("lambda_prev").get<double>(), e.at("delta").get<double>(),
                           e.at("lambda_next").get<double>(), e.at("pm_steps").get<int>()});
  }
  rep.subsample_formula = r.at("subsample_formula").get<std::size_t>();
  rep.subsample_n = r.at("subsample_n").get<std::size_t>();
  if (!j.at("oracle").is_null()) {
    const json& o = j.at("oracle");
    OracleCheck oc;
    oc.lambda1 = o.at("lambda1").get<double>();
    oc.delta = o.at("delta").get<double>();
    oc.alignment = o.at("alignment").get<double>();
    oc.rayleigh_gap = o.at("rayleigh_gap").get<double>();
    rep.oracle = oc;
  }
  counters_from_json(j.at("counters"), rep.counters);
  rep.equivalent_passes = j.at("equivalent_passes").get<double>();
  rep.wall_time_ms = j.at("wall_time_ms").get<double>();
  return rep;
}

std::string RunReport::to_csv() const {
  std::ostringstream os;
  os << "key,value\n";
  os << "schema_version," << kReportSchemaVersion << "\n";
  os << "mode," << mode << "\n";
  os << "exit_code," << exit_code << "\n";
  os << "error," << error << "\n";
  os << "seed," << config.seed << "\n";
  os << "rayleigh," << format_double(rayleigh) << "\n";
  os << "lambda_f," << format_double(lambda_f) << "\n";
  os << "loop_iterations," << loop_iterations << "\n";
  os << "m1," << m1 << "\n";
  os << "m2," << m2 << "\n";
  os << "final_pm_steps," << final_pm_steps << "\n";
  os << "eps_tilde," << format_double(eps_tilde) << "\n";
  os << "delta_hat_used," << format_double(delta_hat_used) << "\n";
  os << "gap_source," << gap_source << "\n";
  os << "subsample_formula," << subsample_formula << "\n";
  os << "subsample_n," << subsample_n << "\n";
  if (oracle.has_value()) {
    os << "oracle_lambda1," << format_double(oracle->lambda1) << "\n";
    os << "oracle_delta," << format_double(oracle->delta) << "\n";
    os << "oracle_alignment," << format_double(oracle->alignment) << "\n";
    os << "oracle_rayleigh_gap," << format_double(oracle->rayleigh_gap) << "\n";
  }
  os << "inner_solves," << counters.inner_solves << "\n";
  os << "cg_iterations," << counters.cg_iterations << "\n";
  os << "svrg_epochs," << counters.svrg_epochs << "\n";
  os << "component_grads," << counters.component_grads << "\n";
  os << "full_grads," << counters.full_grads << "\n";
  os << "matvecs," << counters.matvecs << "\n";
  os << "equivalent_passes," << format_double(equivalent_passes) << "\n";
  os << "wall_time_ms," << format_double(wall_time_ms) << "\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    os << "history_" << i << "_lambda_prev," << format_double(history[i].lambda_prev) << "\n";
    os << "history_" << i << "_delta," << format_double(history[i].delta) << "\n";
    os << "history_" << i << "_lambda_next," << format_double(history[i].lambda_next) << "\n";
    os << "history_" << i << "_pm_steps," << history[i].pm_steps << "\n";
  }
  for (std::size_t i = 0; i < w_f.size(); ++i) {
    os << "w_f_" << i << "," << format_double(w_f[i]) << "\n";
  }
  return os.str();
}

RunReport run(const RunConfig& config) {
  config.validate();
  auto t0 = std::chrono::steady_clock::now();

  RunReport rep;
  rep.config = config;
  rep.mode = config.mode;

  SeededRng rng(config.seed);

  CovarianceOperator X = [&]() -> CovarianceOperator {
    if (looks_like_synthetic_spec(config.input)) {
      SyntheticSpec spec = parse_synthetic_spec(config.input);
      SeededRng plant_rng = rng.split(1);
      PlantResult plant = plant_spectrum(spec.d, spec.n, spec.spectrum, plant_rng);
      return CovarianceOperator(std::move(plant.data));
    }
    return CovarianceOperator(ingest(config.input, config.format));
  }();

  std::optional<SpectrumOracle> oracle;
  if (X.dim() <= 512) {
    oracle = dense_eigendecompose(X);
  }

  DriverOptions opts;
  opts.beta_mode = config.beta_mode == "tight" ? BetaMode::tight : BetaMode::conservative;
  opts.adaptive_phases = config.adaptive_phases;
  opts.stop_at_alignment = config.stop_at_alignment;
  opts.oracle = oracle.has_value() ? &*oracle : nullptr;

  double delta_hat = 0.0;
  if (config.mode == "gap" || config.mode == "shrink-exact") {
    if (config.delta_hat.has_value()) {
      delta_hat = *config.delta_hat;
      rep.gap_source = "user";
    } else {
      SeededRng search_rng = rng.split(3);
      GapEstimate est = search_delta_hat(X, config.epsilon, config.p, search_rng);
      delta_hat = est.delta_hat;
      rep.gap_source = "search";
    }
    rep.delta_hat_used = delta_hat;
  }

  SeededRng solve_rng = rng.split(2);
  auto fill_from_eig = [&](const EigResult& r) {
    rep.rayleigh = r.rayleigh;
    rep.lambda_f = r.lambda_f;
    rep.w_f = r.w_f;
    rep.loop_iterations = r.trace.loop_iterations;
    rep.m1 = r.m1;
    rep.m2 = r.m2;
    rep.final_pm_steps = r.trace.final_pm_steps;
    rep.eps_tilde = r.eps_tilde;
    rep.history = r.trace.history;
    rep.subsample_formula = r.subsample_formula;
    rep.subsample_n = r.subsample_n;
    rep.counters = r.counters;
  };

  if (config.mode == "gap") {
    ScheduleParams sched =
        config.schedule == "theoretical"
            ? ScheduleParams::theoretical(X.dim(), delta_hat, config.epsilon, config.p)
            : ScheduleParams::practical(X.dim(), delta_hat, config.epsilon, config.p,
                                        config.tol);
    EigResult r = shrink_inexact(X, delta_hat, config.epsilon, config.p,
                                 parse_inner(config.inner), sched, solve_rng, opts);
    fill_from_eig(r);
  } else if (config.mode == "shrink-exact") {
    EigResult r = shrink_exact(X, delta_hat, config.epsilon, config.p, solve_rng, config.tol,
                               opts);
    fill_from_eig(r);
  } else if (config.mode == "gapfree") {
    std::optional<ScheduleParams> sched;
    if (config.schedule == "theoretical") {
      sched = ScheduleParams::theoretical(X.dim(), config.epsilon, config.epsilon, config.p);
    } else {
      sched = ScheduleParams::practical(X.dim(), config.epsilon, config.epsilon, config.p,
                                        config.tol);
    }
    sched->m2 = pm_iterations_span(0.25, config.epsilon / 2.0, config.p, X.dim());
    EigResult r = gapfree_eigenvalue(X, config.epsilon, config.p, parse_inner(config.inner),
                                     solve_rng, config.subsample, &*sched, opts);
    fill_from_eig(r);
  } else {  // power-baseline
    BaselineResult r = power_baseline(X, config.epsilon, config.p, solve_rng,
                                      oracle.has_value() ? &*oracle : nullptr,
                                      config.delta_hat, config.stop_at_alignment);
    rep.rayleigh = r.rayleigh;
    rep.w_f = r.w;
    rep.loop_iterations = r.iterations;
    rep.counters = r.counters;
  }

  if (oracle.has_value()) {
    OracleCheck oc;
    oc.lambda1 = oracle->lambda1();
    oc.delta = oracle->gap();
    oc.alignment = std::min(1.0, oracle->alignment(rep.w_f));
    oc.rayleigh_gap = oracle->lambda1() - rep.rayleigh;
    rep.oracle = oc;
  }
  rep.equivalent_passes = rep.counters.equivalent_passes(X.components());

  if (config.timings) {
    auto t1 = std::chrono::steady_clock::now();
    rep.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  }
  return rep;
}

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::string BenchTable::to_csv() const {
  std::ostringstream os;
  os << "config_index,repeat,mode,inner,seed,exit_code,rayleigh,oracle_alignment,"
        "lambda_f,loop_iterations,inner_solves,svrg_epochs,component_grads,full_grads,"
        "matvecs,equivalent_passes,wall_time_ms,error\n";
  int config_index = -1;
  int repeat = 0;
  std::string last_key;
  for (const auto& r : rows) {
    std::string key = r.config.mode + "/" + r.config.inner + "/" + r.config.input;
    if (key != last_key) {
      ++config_index;
      repeat = 0;
      last_key = key;
    }
    os << config_index << ',' << repeat++ << ',' << r.config.mode << ',' << r.config.inner
       << ',' << r.config.seed << ',' << r.exit_code << ',' << format_double(r.rayleigh) << ','
       << format_double(r.oracle.has_value() ? r.oracle->alignment : 0.0) << ','
       << format_double(r.lambda_f) << ',' << r.loop_iterations << ','
       << r.counters.inner_solves << ',' << r.counters.svrg_epochs << ','
       << r.counters.component_grads << ',' << r.counters.full_grads << ','
       << r.counters.matvecs << ',' << format_double(r.equivalent_passes) << ','
       << format_double(r.wall_time_ms) << ',' << r.error << "\n";
  }

  os << "# summary: config_index,metric,median\n";
  config_index = -1;
  last_key.clear();
  std::vector<std::vector<const RunReport*>> groups;
  for (const auto& r : rows) {
    std::string key = r.config.mode + "/" + r.config.inner + "/" + r.config.input;
    if (key != last_key) {
      groups.emplace_back();
      last_key = key;
    }
    groups.back().push_back(&r);
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<double> passes, align, rayleigh, wall;
    for (const auto* r : groups[g]) {
      if (r->exit_code != 0) continue;
      passes.push_back(r->equivalent_passes);
      align.push_back(r->oracle.has_value() ? r->oracle->alignment : 0.0);
      rayleigh.push_back(r->rayleigh);
      wall.push_back(r->wall_time_ms);
    }
    os << "# " << g << ",equivalent_passes," << format_double(median_of(passes)) << "\n";
    os << "# " << g << ",oracle_alignment," << format_double(median_of(align)) << "\n";
    os << "# " << g << ",rayleigh," << format_double(median_of(rayleigh)) << "\n";
    os << "# " << g << ",wall_time_ms," << format_double(median_of(wall)) << "\n";
  }
  return os.str();
}

BenchTable bench(const std::vector<RunConfig>& configs, int repeats, int workers,
                 bool timings) {
  if (configs.empty()) throw InputError("bench: empty config list");
  if (repeats < 1) throw InputError("bench: repeats must be >= 1");

  struct Cell {
    RunConfig config;
  };
  std::vector<Cell> cells;
  for (const auto& base : configs) {
    for (int r = 0; r < repeats; ++r) {
      Cell c{base};
      c.config.seed = SeededRng(base.seed).split(1000 + static_cast<std::uint64_t>(r)).seed();
      c.config.timings = timings;
      c.config.repeats = 1;
      cells.push_back(std::move(c));
    }
  }

  BenchTable table;
  table.rows.resize(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) break;
      try {
        table.rows[i] = run(cells[i].config);
      } catch (const Error& e) {
        RunReport rep;
        rep.config = cells[i].config;
        rep.mode = cells[i].config.mode;
        rep.exit_code = e.exit_code();
        rep.error = e.what();
        table.rows[i] = std::move(rep);
      } catch (const std::exception& e) {
        RunReport rep;
        rep.config = cells[i].config;
        rep.mode = cells[i].config.mode;
        rep.exit_code = 1;
        rep.error = e.what();
        table.rows[i] = std::move(rep);
      }
    }
  };

  int w = std::min<int>(resolve_workers(workers), static_cast<int>(cells.size()));
  if (w <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (int i = 0; i < w; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return table;
}

}  // namespace fastpca
