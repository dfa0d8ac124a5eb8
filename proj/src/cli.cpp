#include "fastpca/cli.hpp"

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fastpca/report.hpp"

namespace fastpca {

namespace {

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot open output file '" + path + "'");
  out << text;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{
      "fastpca: leading-eigenvector / leading-eigenvalue solver that reduces PCA to a "
      "short sequence of well-conditioned convex quadratic minimizations, with a dense "
      "brute-force oracle cross-check on every desk-scale run"};

  RunConfig cfg;
  std::string bench_file;
  double delta_hat_flag = -1.0;
  double stop_at_alignment_flag = -1.0;

  app.add_option("--input", cfg.input,
                 "input file path, or a synthetic spec: 'plant d=50 n=500 "
                 "spectrum=geometric(0.9,0.5,50)' / 'spectrum=list(0.5,0.3)'");
  app.add_option("--format", cfg.format, "input file format: libsvm|csv")
      ->default_val("libsvm");
  app.add_option("--mode", cfg.mode, "gap|gapfree|shrink-exact|power-baseline")
      ->default_val("gap");
  app.add_option("--inner", cfg.inner, "inner solver: exact|svrg|catalyst")
      ->default_val("svrg");
  app.add_option("--epsilon", cfg.epsilon, "accuracy target")->default_val(1e-3);
  app.add_option("--p", cfg.p, "failure probability budget")->default_val(0.1);
  app.add_option("--delta-hat", delta_hat_flag, "eigengap estimate in (0,1]");
  app.add_flag("--search-gap", cfg.search_gap, "search for delta-hat by geometric halving");
  app.add_option("--seed", cfg.seed, "rng seed")->default_val(0);
  app.add_flag("--subsample", cfg.subsample,
               "gapfree: run on ceil(8 ln(2d/p)/eps^2) uniformly sampled rows");
  app.add_option("--schedule", cfg.schedule, "theoretical|practical")
      ->default_val("practical");
  app.add_option("--tol", cfg.tol, "practical-mode inner tolerance eps_tilde")
      ->default_val(1e-10);
  app.add_option("--out", cfg.out, "output path (default: stdout)");
  app.add_option("--out-format", cfg.out_format, "json|csv")->default_val("json");
  app.add_option("--repeats", cfg.repeats, "repeated runs per config (bench table output)")
      ->default_val(1);
  app.add_option("--workers", cfg.workers,
                 "bench worker threads (0: FASTPCA_WORKERS env var, else 1)")
      ->default_val(0);
  app.add_flag("--timings", cfg.timings,
               "record wall time (off by default so reports are byte-identical)");
  app.add_option("--beta-mode", cfg.beta_mode,
                 "svrg component smoothness bound: conservative|tight")
      ->default_val("conservative");
  app.add_flag("--adaptive-phases", cfg.adaptive_phases,
               "stop crude phases at quadform plateau (bench comparisons)");
  app.add_option("--stop-at-alignment", stop_at_alignment_flag,
                 "stop the final phase at this oracle alignment (d <= 512)");
  app.add_option("--bench", bench_file, "JSON array of run configs; emits a bench table");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "fastpca: " << e.what() << "\n";
    return 2;
  }

  if (delta_hat_flag >= 0.0) cfg.delta_hat = delta_hat_flag;
  if (stop_at_alignment_flag >= 0.0) cfg.stop_at_alignment = stop_at_alignment_flag;

  try {
    if (!bench_file.empty()) {
      std::vector<RunConfig> configs = configs_from_json_file(bench_file);
      BenchTable table = bench(configs, cfg.repeats, cfg.workers, cfg.timings);
      emit(table.to_csv(), cfg.out);
      return 0;
    }
    if (cfg.repeats > 1) {
      BenchTable table = bench({cfg}, cfg.repeats, cfg.workers, cfg.timings);
      emit(table.to_csv(), cfg.out);
      return 0;
    }
    RunReport rep = run(cfg);
    emit(cfg.out_format == "json" ? rep.to_json() : rep.to_csv(), cfg.out);
    return 0;
  } catch (const Error& e) {
    std::cerr << "fastpca: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "fastpca: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fastpca
