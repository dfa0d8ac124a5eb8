#pragma once

#include <optional>
#include <string>

#include "fastpca/driver.hpp"
#include "fastpca/io.hpp"

namespace fastpca {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kWorkersEnvVar = "FASTPCA_WORKERS";

struct RunConfig {
  std::string input;              // file path or `plant ...` synthetic spec
  std::string format = "libsvm";  // libsvm | csv
  std::string mode = "gap";       // gap | gapfree | shrink-exact | power-baseline
  std::string inner = "svrg";     // exact | svrg | catalyst
  double epsilon = 1e-3;
  double p = 0.1;
  std::optional<double> delta_hat;
  bool search_gap = false;
  std::uint64_t seed = 0;
  bool subsample = false;
  std::string schedule = "practical";  // theoretical | practical
  double tol = 1e-10;                  // practical-mode eps_tilde
  std::string out;                     // empty: stdout
  std::string out_format = "json";     // json | csv
  int repeats = 1;
  int workers = 0;  // 0: FASTPCA_WORKERS env var, else 1
  bool timings = false;                    // off keeps reports byte-identical
  std::string beta_mode = "conservative";  // conservative | tight
  bool adaptive_phases = false;
  std::optional<double> stop_at_alignment;  // matched-accuracy stop (needs oracle)

  void validate() const;
};

struct OracleCheck {
  double lambda1 = 0.0;
  double delta = 0.0;
  double alignment = 0.0;     // (w_f^T u_1)^2
  double rayleigh_gap = 0.0;  // lambda_1 - w_f^T X w_f
};

struct RunReport {
  RunConfig config;
  int exit_code = 0;
  std::string error;

  std::string mode;
  double rayleigh = 0.0;
  double lambda_f = 0.0;
  Vec w_f;
  int loop_iterations = 0;
  int m1 = 0;
  int m2 = 0;
  int final_pm_steps = 0;
  double eps_tilde = 0.0;
  double delta_hat_used = 0.0;
  std::string gap_source;  // "user" | "search" | ""
  std::vector<ShrinkStep> history;
  std::size_t subsample_formula = 0;
  std::size_t subsample_n = 0;
  std::optional<OracleCheck> oracle;
  SolveCounters counters;
  double equivalent_passes = 0.0;
  double wall_time_ms = 0.0;  // populated only when config.timings

  std::string to_json() const;
  std::string to_csv() const;
  static RunReport from_json(const std::string& text);
};

RunReport run(const RunConfig& config);

struct BenchTable {
  std::vector<RunReport> rows;  // one per (config, repeat), errors included
  std::string to_csv() const;   // rows plus a median summary block
};

BenchTable bench(const std::vector<RunConfig>& configs, int repeats, int workers = 0,
                 bool timings = false);

std::string config_to_json(const RunConfig& config);
RunConfig config_from_json_text(const std::string& text);
std::vector<RunConfig> configs_from_json_file(const std::string& path);

// %.17g, enough digits that strtod round-trips exactly.
std::string format_double(double v);

int resolve_workers(int requested);

}  // namespace fastpca
