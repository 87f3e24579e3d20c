// pgh: command-line front end for the homotopy solver and its benchmarks.
//
//   pgh solve  --problem problem1 --algorithm homotopy
//   pgh bench  --config desk.json
//   pgh rip    --problem problem2 --level 20
//   pgh check  --problem problem1
//   pgh plot   --kind gap --out gap.svg bench_out/*.csv
//
// Exit codes: 0 success, 1 numerical failure, 2 invalid configuration,
// 3 solver iteration limit, 4 I/O error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pgh/pgh.hpp"

namespace {

using pgh::ExperimentConfig;
using json = nlohmann::json;

enum exit_code : int { ok = 0, numerical = 1, bad_config = 2, iteration_limit = 3, io = 4 };

struct ConfigFlags {
  std::string preset = "desk";
  std::string problem;
  std::optional<pgh::Index> d1, d2, k0, m;
  std::optional<double> noise;
  std::optional<std::uint64_t> seed;
  std::string norm;
  std::optional<double> lambda_tgt, epsilon, eta, delta_prime, l_min, gamma_inc, gamma_dec;
  std::optional<int> max_stage_iters, max_total_iters;
  std::optional<double> r;
  std::optional<int> rip_samples;
  std::string output_dir;
  std::string a_file, b_file, x0_file;
  std::optional<pgh::Index> svp_rank;
  std::optional<double> svp_step;
  std::optional<int> svp_iters;
  std::string config_file;
};

void add_config_flags(CLI::App* app, ConfigFlags& f) {
  app->add_option("--preset", f.preset, "desk or full (problem sizes)")
      ->check(CLI::IsMember({"desk", "full"}));
  app->add_option("--problem", f.problem, "problem1, problem2 or custom");
  app->add_option("--d1", f.d1, "rows of the unknown matrix");
  app->add_option("--d2", f.d2, "columns of the unknown matrix");
  app->add_option("--k0", f.k0, "rank (problem1) or nonzero columns (problem2)");
  app->add_option("--m", f.m, "number of measurements");
  app->add_option("--noise", f.noise, "noise half-width");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--norm", f.norm, "l1, l12 or nuclear");
  app->add_option("--lambda-tgt", f.lambda_tgt, "target regularization (default 4||A*z||_*)");
  app->add_option("--epsilon", f.epsilon, "final-stage tolerance");
  app->add_option("--eta", f.eta, "lambda decrease factor");
  app->add_option("--delta-prime", f.delta_prime, "intermediate stage tolerance factor");
  app->add_option("--l-min", f.l_min, "lower bound on the step constant");
  app->add_option("--gamma-inc", f.gamma_inc, "backtracking increase factor");
  app->add_option("--gamma-dec", f.gamma_dec, "step constant decrease factor");
  app->add_option("--max-stage-iters", f.max_stage_iters, "iteration cap per stage");
  app->add_option("--max-total-iters", f.max_total_iters, "iteration cap overall");
  app->add_option("--r", f.r, "assumption constant r (default 2c)");
  app->add_option("--rip-samples", f.rip_samples, "Monte-Carlo samples per RIP level");
  app->add_option("--output-dir", f.output_dir, "directory for CSV traces and summary.json");
  app->add_option("--a-file", f.a_file, "operator CSV (custom problems)");
  app->add_option("--b-file", f.b_file, "measurement CSV (custom problems)");
  app->add_option("--x0-file", f.x0_file, "reference signal CSV (custom problems)");
  app->add_option("--svp-rank", f.svp_rank, "SVP target rank (default k0)");
  app->add_option("--svp-step", f.svp_step, "SVP step size");
  app->add_option("--svp-iters", f.svp_iters, "SVP iteration count");
  app->add_option("--config", f.config_file, "JSON config; its fields override flags");
}

template <class T>
void set_if(const std::optional<T>& v, T& out) {
  if (v) out = *v;
}

ExperimentConfig build_config(const ConfigFlags& f) {
  const pgh::ProblemKind kind =
      f.problem.empty() ? pgh::ProblemKind::problem1 : pgh::problem_kind_from_string(f.problem);
  ExperimentConfig c;
  if (kind == pgh::ProblemKind::problem2) {
    c = f.preset == "full" ? ExperimentConfig::problem2_full() : ExperimentConfig::problem2_desk();
  } else {
    c = f.preset == "full" ? ExperimentConfig::problem1_full() : ExperimentConfig::problem1_desk();
  }
  c.problem = kind;
  set_if(f.d1, c.d1);
  set_if(f.d2, c.d2);
  set_if(f.k0, c.k0);
  set_if(f.m, c.m);
  set_if(f.noise, c.noise);
  set_if(f.seed, c.seed);
  if (!f.norm.empty()) c.norm = f.norm;
  set_if(f.lambda_tgt, c.homotopy.lambda_tgt);
  set_if(f.epsilon, c.homotopy.epsilon);
  set_if(f.eta, c.homotopy.eta);
  set_if(f.delta_prime, c.homotopy.delta_prime);
  set_if(f.l_min, c.homotopy.l_min);
  set_if(f.gamma_inc, c.homotopy.gamma_inc);
  set_if(f.gamma_dec, c.homotopy.gamma_dec);
  set_if(f.max_stage_iters, c.homotopy.max_stage_iters);
  set_if(f.max_total_iters, c.homotopy.max_total_iters);
  set_if(f.r, c.r);
  set_if(f.rip_samples, c.rip_samples);
  if (!f.output_dir.empty()) c.output_dir = f.output_dir;
  if (!f.a_file.empty()) c.a_file = f.a_file;
  if (!f.b_file.empty()) c.b_file = f.b_file;
  if (!f.x0_file.empty()) c.x0_file = f.x0_file;
  set_if(f.svp_rank, c.svp.rank);
  set_if(f.svp_step, c.svp.step);
  set_if(f.svp_iters, c.svp.iters);
  if (!f.config_file.empty()) return pgh::load_config(f.config_file, c);
  pgh::validate(c);
  return c;
}

void print_runs(const pgh::BenchResult& result) {
  const auto& s = result.summary;
  std::cout << "lambda0 = " << s.lambda0 << ", lambda_tgt = " << s.lambda_tgt
            << ", reference objective = " << s.reference_objective << "\n";
  for (const auto& a : s.algorithms) {
    std::cout << a.name << ": " << a.status << ", " << a.iterations << " iterations, gap "
              << a.final_gap << ", K " << a.final_k << ", recovery error "
              << a.final_recovery_err << ", " << a.elapsed_ms << " ms\n";
  }
  std::cout << "traces written to " << s.config.output_dir << "\n";
}

int run_experiment(ExperimentConfig config, bool parallel) {
  const pgh::BenchResult result = pgh::run_bench(config, {parallel, true});
  print_runs(result);
  for (const auto& run : result.runs) {
    if (run.status == "iteration_limit") {
      std::cerr << "pgh: " << run.name << ": " << run.message << "\n";
      return iteration_limit;
    }
  }
  return ok;
}

json rip_json(const pgh::RipEstimate& e) {
  return {{"k", e.k},
          {"level", e.level},
          {"rho_minus_hat", e.rho_minus_hat},
          {"rho_plus_hat", e.rho_plus_hat},
          {"n_samples", e.n_samples},
          {"seed", e.seed}};
}

int run_rip(const ExperimentConfig& config, const std::vector<double>& levels) {
  const pgh::GeneratedProblem gen = pgh::gen_problem(config);
  json out = json::array();
  for (double k : levels) {
    out.push_back(rip_json(pgh::estimate_rip(gen.problem.op(), gen.problem.metric(), gen.family,
                                             k, config.rip_samples, config.seed)));
  }
  std::cout << out.dump(2) << "\n";
  return ok;
}

int run_check(const ExperimentConfig& config) {
  const pgh::GeneratedProblem gen = pgh::gen_problem(config);
  const pgh::Vector z = gen.z ? *gen.z : pgh::Vector::Zero(gen.problem.op().rows());
  const auto defaults = pgh::default_lambda_tgt(gen.problem, gen.family, z);
  const double lambda_tgt =
      config.homotopy.lambda_tgt > 0.0 ? config.homotopy.lambda_tgt : defaults.lambda_tgt;
  if (!(lambda_tgt > 0.0)) {
    throw pgh::config_error("config: noise is zero or unknown; homotopy.lambda_tgt must be given");
  }
  const double c = pgh::norm_constant_c(gen.family);
  const double delta = pgh::select_delta(config.homotopy.delta_prime, config.homotopy.eta);
  const auto report = pgh::check_assumption(gen.problem.op(), gen.problem.metric(), gen.family,
                                            gen.x0, z, lambda_tgt, delta,
                                            config.r > 0.0 ? config.r : 2.0 * c,
                                            config.homotopy.gamma_inc, config.seed,
                                            config.rip_samples);
  json out{{"lambda0", defaults.lambda0}, {"assumption", pgh::to_json_value(report)}};
  if (defaults.lambda0 > 0.0 && report.rate > 0.0) {
    out["bounds"] = pgh::to_json_value(
        pgh::theorem5_bounds(report, config.homotopy.delta_prime, config.homotopy.eta,
                             config.homotopy.epsilon, defaults.lambda0, lambda_tgt));
  }
  std::cout << out.dump(2) << "\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proximal-gradient homotopy solver and benchmark harness"};
  app.require_subcommand(1);

  ConfigFlags solve_flags, bench_flags, rip_flags, check_flags;
  std::string algorithm = "homotopy";
  bool parallel = false;
  std::vector<double> levels;
  std::string plot_kind = "gap", plot_out = "plot.svg";
  std::vector<std::string> plot_inputs;

  CLI::App* solve = app.add_subcommand("solve", "run one algorithm on one problem");
  add_config_flags(solve, solve_flags);
  solve->add_option("--algorithm", algorithm, "homotopy, pg, apg or svp");

  CLI::App* bench = app.add_subcommand("bench", "run every configured algorithm");
  add_config_flags(bench, bench_flags);
  bench->add_flag("--parallel", parallel, "run algorithms concurrently");

  CLI::App* rip = app.add_subcommand("rip", "estimate restricted isometry constants");
  add_config_flags(rip, rip_flags);
  rip->add_option("--level", levels, "sparsity / rank levels")->required();

  CLI::App* check = app.add_subcommand("check", "print the assumption report and bounds");
  add_config_flags(check, check_flags);

  CLI::App* plot = app.add_subcommand("plot", "render trace CSVs as an SVG chart");
  plot->add_option("--kind", plot_kind, "gap, K or recovery");
  plot->add_option("--out", plot_out, "output SVG path");
  plot->add_option("traces", plot_inputs, "trace CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return bad_config;
  }

  try {
    if (*solve) {
      ExperimentConfig config = build_config(solve_flags);
      config.algorithms = {algorithm};
      pgh::validate(config);
      return run_experiment(config, false);
    }
    if (*bench) return run_experiment(build_config(bench_flags), parallel);
    if (*rip) return run_rip(build_config(rip_flags), levels);
    if (*check) return run_check(build_config(check_flags));
    if (*plot) {
      std::vector<std::filesystem::path> paths(plot_inputs.begin(), plot_inputs.end());
      pgh::emit_plot(paths, pgh::plot_kind_from_string(plot_kind), plot_out);
      std::cout << "wrote " << plot_out << "\n";
      return ok;
    }
  } catch (const pgh::iteration_limit_error& e) {
    std::cerr << "pgh: " << e.what() << "\n";
    return iteration_limit;
  } catch (const pgh::contract_error& e) {
    std::cerr << "pgh: invalid configuration: " << e.what() << "\n";
    return bad_config;
  } catch (const pgh::io_error& e) {
    std::cerr << "pgh: " << e.what() << "\n";
    return io;
  } catch (const pgh::parse_error& e) {
    std::cerr << "pgh: " << e.what() << "\n";
    return io;
  } catch (const std::exception& e) {
    std::cerr << "pgh: " << e.what() << "\n";
    return numerical;
  }
  return ok;
}
