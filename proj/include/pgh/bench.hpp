#pragma once

// Seeded synthetic problems (low-rank matrix sensing with Gaussian
// measurements, column-sparse recovery with Rademacher measurements), the
// experiment configuration, and the runner that writes one trace CSV per
// algorithm plus a summary JSON.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <future>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "pgh/analysis.hpp"
#include "pgh/errors.hpp"
#include "pgh/io.hpp"
#include "pgh/model_space.hpp"
#include "pgh/norms.hpp"
#include "pgh/random.hpp"
#include "pgh/solver.hpp"

namespace pgh {

using json = nlohmann::json;

inline constexpr const char* kTraceSchema = "pgh-trace/1";
inline constexpr const char* kTraceHeader =
    "stage,iter_stage,iter_global,lambda,objective,gap,stop_quantity,K,M,recovery_err,elapsed_ms";

/// Invalid experiment configuration (maps to CLI exit code 2).
class config_error : public contract_error {
 public:
  using contract_error::contract_error;
};

enum class ProblemKind { problem1, problem2, custom };

inline std::string to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::problem1: return "problem1";
    case ProblemKind::problem2: return "problem2";
    case ProblemKind::custom: return "custom";
  }
  return "?";
}

inline ProblemKind problem_kind_from_string(const std::string& s) {
  if (s == "problem1") return ProblemKind::problem1;
  if (s == "problem2") return ProblemKind::problem2;
  if (s == "custom") return ProblemKind::custom;
  throw config_error("unknown problem kind '" + s + "'");
}

struct SvpSettings {
  Index rank = 0;  // 0: use k0
  double step = 1.0;
  int iters = 500;

  bool operator==(const SvpSettings&) const = default;
};

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::problem1;
  Index d1 = 60;
  Index d2 = 60;
  Index k0 = 3;
  Index m = 2500;
  double noise = 0.005;  // half-width of the uniform noise
  std::uint64_t seed = 1;
  std::string norm;  // "l1" | "l12" | "nuclear"; empty: problem default
  std::vector<std::string> algorithms = {"homotopy", "pg", "apg"};
  HomotopyParams homotopy;  // lambda_tgt == 0: use 4 ||A* z||_*
  SvpSettings svp;
  double r = 0.0;  // assumption constant r; 0: use 2c
  int rip_samples = kDefaultRipSamples;
  std::string output_dir = "bench_out";
  std::string a_file;  // custom problems only
  std::string b_file;
  std::string x0_file;

  bool operator==(const ExperimentConfig&) const = default;

  /// 60 x 60, rank 3, m = 2500, Gaussian measurements, nuclear norm.
  static ExperimentConfig problem1_desk() {
    ExperimentConfig c;
    c.problem = ProblemKind::problem1;
    c.d1 = 60;
    c.d2 = 60;
    c.k0 = 3;
    c.m = 2500;
    c.homotopy.epsilon = 1e-7;
    return c;
  }

  /// 10 x 200, 10 nonzero columns, m = 800, +-1/sqrt(m) measurements, l1,2 norm.
  static ExperimentConfig problem2_desk() {
    ExperimentConfig c;
    c.problem = ProblemKind::problem2;
    c.d1 = 10;
    c.d2 = 200;
    c.k0 = 10;
    c.m = 800;
    c.homotopy.epsilon = 1e-7;
    return c;
  }

  static ExperimentConfig problem1_full() {
    ExperimentConfig c = problem1_desk();
    c.d1 = 300;
    c.d2 = 300;
    c.k0 = 10;
    c.m = 20000;
    return c;
  }

  static ExperimentConfig problem2_full() {
    ExperimentConfig c = problem2_desk();
    c.d1 = 50;
    c.d2 = 1000;
    c.k0 = 50;
    c.m = 18000;
    return c;
  }

  std::string norm_name() const {
    if (!norm.empty()) return norm;
    return problem == ProblemKind::problem2 ? "l12" : "nuclear";
  }
};

inline const std::set<std::string>& known_algorithms() {
  static const std::set<std::string> names = {"homotopy", "pg", "apg", "svp"};
  return names;
}

/// Checks the generator-independent invariants of a configuration.
inline void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& msg) { throw config_error("config: " + msg); };
  const std::string norm = c.norm_name();
  if (norm != "l1" && norm != "l12" && norm != "nuclear") fail("unknown norm '" + norm + "'");
  if (c.algorithms.empty()) fail("algorithm list is empty");
  for (const auto& a : c.algorithms) {
    if (!known_algorithms().count(a)) fail("unknown algorithm '" + a + "'");
    if (a == "svp" && norm != "nuclear") fail("svp requires the nuclear norm");
  }
  if (!(c.noise >= 0.0) || !std::isfinite(c.noise)) fail("noise half-width must be >= 0");
  if (c.rip_samples < 1) fail("rip_samples must be >= 1");
  if (c.r != 0.0 && !(c.r > 1.0)) fail("r must be > 1 (or 0 for the default)");
  if (!(c.svp.step > 0.0) || c.svp.iters < 0 || c.svp.rank < 0) fail("invalid svp settings");
  try {
    HomotopyParams p = c.homotopy;
    if (p.lambda_tgt == 0.0) p.lambda_tgt = 1.0;
    p.validate(true);
  } catch (const contract_error& e) {
    fail(e.what());
  }
  if (c.problem == ProblemKind::custom) {
    if (c.a_file.empty() || c.b_file.empty()) fail("custom problems need a_file and b_file");
    return;
  }
  if (c.m < 1) fail("m must be >= 1");
  if (c.d1 < 1 || c.d2 < 1) fail("dimensions must be >= 1");
  if (c.k0 < 0) fail("k0 must be >= 0");
  if (c.problem == ProblemKind::problem1 && c.k0 > std::min(c.d1, c.d2)) {
    fail("k0 must be <= min(d1, d2) for problem1");
  }
  if (c.problem == ProblemKind::problem2 && c.k0 > c.d2) fail("k0 must be <= d2 for problem2");
}

struct GeneratedProblem {
  LeastSquaresProblem problem;
  NormFamily family;
  Vector x0;
  std::optional<Vector> z;  // known for synthetic problems only
};

inline NormFamily family_for(const std::string& norm, Index d1, Index d2, Index n) {
  if (norm == "l1") return unit_l1(n);
  if (d1 * d2 != n) throw config_error("config: d1*d2 must equal the operator's column count");
  if (norm == "l12") return l12(d1, d2);
  return nuclear(d1, d2);
}

/// Builds A, x0, z and b = A x0 + z. All randomness derives from config.seed
/// through separate streams for the signal, the operator and the noise.
inline GeneratedProblem gen_problem(const ExperimentConfig& c) {
  validate(c);
  if (c.problem == ProblemKind::custom) {
    Matrix a = read_matrix_csv(c.a_file);
    Matrix b = read_matrix_csv(c.b_file);
    if (b.cols() != 1 || b.rows() != a.rows()) {
      throw config_error("config: b_file must be an m x 1 matrix matching a_file");
    }
    NormFamily fam = family_for(c.norm_name(), c.d1, c.d2, a.cols());
    Vector x0 = Vector::Zero(a.cols());
    if (!c.x0_file.empty()) {
      Matrix x = read_matrix_csv(c.x0_file);
      if (x.cols() != 1 || x.rows() != a.cols()) {
        throw config_error("config: x0_file must be an n x 1 matrix");
      }
      x0 = x.col(0);
    }
    LeastSquaresProblem p(MeasurementOperator(std::move(a)), b.col(0), metric_for(fam));
    return {std::move(p), std::move(fam), std::move(x0), std::nullopt};
  }

  const Index n = c.d1 * c.d2;
  Rng signal_rng(derive_seed(c.seed, 1));
  Rng op_rng(derive_seed(c.seed, 2));
  Rng noise_rng(derive_seed(c.seed, 3));

  Matrix x0m = Matrix::Zero(c.d1, c.d2);
  Matrix a(c.m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(c.m));
  if (c.problem == ProblemKind::problem1) {
    if (c.k0 > 0) {
      Matrix g1 = gaussian_matrix(c.d1, c.k0, signal_rng);
      Matrix g2 = gaussian_matrix(c.d2, c.k0, signal_rng);
      x0m = g1 * g2.transpose();
      x0m /= detail::singular_values(x0m)[0];
    }
    a = gaussian_matrix(c.m, n, op_rng, scale);
  } else {
    for (Index j : random_subset(c.d2, c.k0, signal_rng)) {
      x0m.col(j) = gaussian_matrix(c.d1, 1, signal_rng);
    }
    std::bernoulli_distribution coin(0.5);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < c.m; ++i) a(i, j) = coin(op_rng) ? scale : -scale;
  }
  Vector z = Vector::Zero(c.m);
  if (c.noise > 0.0) {
    std::uniform_real_distribution<double> u(-c.noise, c.noise);
    for (Index i = 0; i < c.m; ++i) z[i] = u(noise_rng);
  }
  Vector x0 = detail::flatten(x0m);
  Vector b = a * x0 + z;
  NormFamily fam = family_for(c.norm_name(), c.d1, c.d2, n);
  LeastSquaresProblem p(MeasurementOperator(std::move(a)), std::move(b), metric_for(fam));
  return {std::move(p), std::move(fam), std::move(x0), std::move(z)};
}

struct LambdaDefaults {
  double lambda_tgt = 0.0;  // 4 ||A* z||_*
  double lambda0 = 0.0;     // ||A* b||_*
  bool needs_explicit = false;  // z = 0: the caller must supply lambda_tgt
};

inline LambdaDefaults default_lambda_tgt(const LeastSquaresProblem& problem,
                                         const NormFamily& fam, const Vector& z) {
  LambdaDefaults out;
  out.lambda_tgt =
      4.0 * dual_norm_value(fam, adjoint_apply(problem.op(), z, problem.metric()));
  out.lambda0 =
      dual_norm_value(fam, adjoint_apply(problem.op(), problem.b(), problem.metric()));
  out.needs_explicit = !(out.lambda_tgt > 0.0);
  return out;
}

// ---------------------------------------------------------------------------
// JSON encoding. Non-finite doubles are written as the strings "inf",
// "-inf" and "nan" so that summaries round-trip.

namespace detail {

inline json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double num(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw config_error("expected a number, got string '" + s + "'");
  }
  if (!j.is_number()) throw config_error("expected a number, got " + j.dump());
  return j.get<double>();
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> keys,
                           const std::string& where) {
  if (!j.is_object()) throw config_error(where + ": expected a JSON object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw config_error(where + ": unknown key '" + it.key() + "'");
  }
}

template <class T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    if constexpr (std::is_same_v<T, double>) {
      out = num(j.at(key));
    } else {
      out = j.at(key).get<T>();
    }
  } catch (const json::exception& e) {
    throw config_error(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline json to_json_value(const HomotopyParams& p) {
  return json{{"lambda_tgt", detail::num(p.lambda_tgt)},
              {"epsilon", detail::num(p.epsilon)},
              {"eta", p.eta},
              {"delta_prime", p.delta_prime},
              {"l_min", p.l_min},
              {"gamma_inc", p.gamma_inc},
              {"gamma_dec", p.gamma_dec},
              {"max_stage_iters", p.max_stage_iters},
              {"max_total_iters", p.max_total_iters}};
}

inline HomotopyParams homotopy_params_from_json(const json& j) {
  detail::reject_unknown(j,
                         {"lambda_tgt", "epsilon", "eta", "delta_prime", "l_min", "gamma_inc",
                          "gamma_dec", "max_stage_iters", "max_total_iters"},
                         "config.homotopy");
  HomotopyParams p;
  detail::read_field(j, "lambda_tgt", p.lambda_tgt);
  detail::read_field(j, "epsilon", p.epsilon);
  detail::read_field(j, "eta", p.eta);
  detail::read_field(j, "delta_prime", p.delta_prime);
  detail::read_field(j, "l_min", p.l_min);
  detail::read_field(j, "gamma_inc", p.gamma_inc);
  detail::read_field(j, "gamma_dec", p.gamma_dec);
  detail::read_field(j, "max_stage_iters", p.max_stage_iters);
  detail::read_field(j, "max_total_iters", p.max_total_iters);
  return p;
}

inline json to_json_value(const ExperimentConfig& c) {
  return json{{"problem", to_string(c.problem)},
              {"d1", c.d1},
              {"d2", c.d2},
              {"k0", c.k0},
              {"m", c.m},
              {"noise", c.noise},
              {"seed", c.seed},
              {"norm", c.norm},
              {"algorithms", c.algorithms},
              {"homotopy", to_json_value(c.homotopy)},
              {"svp", {{"rank", c.svp.rank}, {"step", c.svp.step}, {"iters", c.svp.iters}}},
              {"r", c.r},
              {"rip_samples", c.rip_samples},
              {"output_dir", c.output_dir},
              {"a_file", c.a_file},
              {"b_file", c.b_file},
              {"x0_file", c.x0_file}};
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline ExperimentConfig config_from_json(const json& j, ExperimentConfig c = {}) {
  detail::reject_unknown(j,
                         {"problem", "d1", "d2", "k0", "m", "noise", "seed", "norm", "algorithms",
                          "homotopy", "svp", "r", "rip_samples", "output_dir", "a_file", "b_file",
                          "x0_file"},
                         "config");
  if (j.contains("problem")) {
    std::string kind;
    detail::read_field(j, "problem", kind);
    c.problem = problem_kind_from_string(kind);
  }
  detail::read_field(j, "d1", c.d1);
  detail::read_field(j, "d2", c.d2);
  detail::read_field(j, "k0", c.k0);
  detail::read_field(j, "m", c.m);
  detail::read_field(j, "noise", c.noise);
  detail::read_field(j, "seed", c.seed);
  detail::read_field(j, "norm", c.norm);
  detail::read_field(j, "algorithms", c.algorithms);
  if (j.contains("homotopy")) c.homotopy = homotopy_params_from_json(j.at("homotopy"));
  if (j.contains("svp")) {
    const json& s = j.at("svp");
    detail::reject_unknown(s, {"rank", "step", "iters"}, "config.svp");
    detail::read_field(s, "rank", c.svp.rank);
    detail::read_field(s, "step", c.svp.step);
    detail::read_field(s, "iters", c.svp.iters);
  }
  detail::read_field(j, "r", c.r);
  detail::read_field(j, "rip_samples", c.rip_samples);
  detail::read_field(j, "output_dir", c.output_dir);
  detail::read_field(j, "a_file", c.a_file);
  detail::read_field(j, "b_file", c.b_file);
  detail::read_field(j, "x0_file", c.x0_file);
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path,
                                    ExperimentConfig base = {}) {
  const std::string text = detail::read_text(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw config_error("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j, std::move(base));
}

inline json to_json_value(const AssumptionReport& r) {
  using detail::num;
  return json{{"lambda_tgt", num(r.lambda_tgt)},
              {"delta", num(r.delta)},
              {"r", num(r.r)},
              {"gamma_inc", num(r.gamma_inc)},
              {"k0", r.k0},
              {"c", num(r.c)},
              {"dual_noise", num(r.dual_noise)},
              {"gamma", num(r.gamma)},
              {"k_tilde", num(r.k_tilde)},
              {"level_small", num(r.level_small)},
              {"level_large", num(r.level_large)},
              {"sampled_small", r.sampled_small},
              {"sampled_large", r.sampled_large},
              {"rho_minus_small", num(r.rho_minus_small)},
              {"rho_minus_large", num(r.rho_minus_large)},
              {"rho_plus_large", num(r.rho_plus_large)},
              {"rho_plus_one", num(r.rho_plus_one)},
              {"kappa", num(r.kappa)},
              {"rate", num(r.rate)},
              {"C", num(r.C)},
              {"verdicts",
               {{"noise_bound_ok", r.verdicts.noise_bound_ok},
                {"rho_ratio_ok", r.verdicts.rho_ratio_ok},
                {"rho_positive_ok", r.verdicts.rho_positive_ok}}},
              {"optimistic", r.optimistic}};
}

inline AssumptionReport assumption_report_from_json(const json& j) {
  using detail::num;
  AssumptionReport r;
  r.lambda_tgt = num(j.at("lambda_tgt"));
  r.delta = num(j.at("delta"));
  r.r = num(j.at("r"));
  r.gamma_inc = num(j.at("gamma_inc"));
  r.k0 = j.at("k0").get<Index>();
  r.c = num(j.at("c"));
  r.dual_noise = num(j.at("dual_noise"));
  r.gamma = num(j.at("gamma"));
  r.k_tilde = num(j.at("k_tilde"));
  r.level_small = num(j.at("level_small"));
  r.level_large = num(j.at("level_large"));
  r.sampled_small = j.at("sampled_small").get<Index>();
  r.sampled_large = j.at("sampled_large").get<Index>();
  r.rho_minus_small = num(j.at("rho_minus_small"));
  r.rho_minus_large = num(j.at("rho_minus_large"));
  r.rho_plus_large = num(j.at("rho_plus_large"));
  r.rho_plus_one = num(j.at("rho_plus_one"));
  r.kappa = num(j.at("kappa"));
  r.rate = num(j.at("rate"));
  r.C = num(j.at("C"));
  const json& v = j.at("verdicts");
  r.verdicts.noise_bound_ok = v.at("noise_bound_ok").get<bool>();
  r.verdicts.rho_ratio_ok = v.at("rho_ratio_ok").get<bool>();
  r.verdicts.rho_positive_ok = v.at("rho_positive_ok").get<bool>();
  r.optimistic = j.at("optimistic").get<bool>();
  return r;
}

inline json to_json_value(const Theorem5Bounds& b) {
  using detail::num;
  return json{{"kappa", num(b.kappa)},
              {"rate", num(b.rate)},
              {"C", num(b.C)},
              {"n_stages", b.n_stages},
              {"per_stage_iterations", num(b.per_stage_iterations)},
              {"final_stage_iterations", num(b.final_stage_iterations)},
              {"total_iterations", num(b.total_iterations)},
              {"gap_bound", num(b.gap_bound)},
              {"eta_condition_lhs", num(b.eta_condition_lhs)},
              {"eta_condition_ok", b.eta_condition_ok}};
}

inline Theorem5Bounds theorem5_bounds_from_json(const json& j) {
  using detail::num;
  Theorem5Bounds b;
  b.kappa = num(j.at("kappa"));
  b.rate = num(j.at("rate"));
  b.C = num(j.at("C"));
  b.n_stages = j.at("n_stages").get<int>();
  b.per_stage_iterations = num(j.at("per_stage_iterations"));
  b.final_stage_iterations = num(j.at("final_stage_iterations"));
  b.total_iterations = num(j.at("total_iterations"));
  b.gap_bound = num(j.at("gap_bound"));
  b.eta_condition_lhs = num(j.at("eta_condition_lhs"));
  b.eta_condition_ok = j.at("eta_condition_ok").get<bool>();
  return b;
}

// ---------------------------------------------------------------------------
// Runner

struct TraceRow {
  TraceRecord record;
  double gap = 0.0;
  double recovery_err = 0.0;
};

struct AlgorithmRun {
  std::string name;
  std::string status;  // "converged", "completed" (svp) or "iteration_limit"
  std::string message;
  std::vector<TraceRow> rows;
  Vector x;
};

struct AlgorithmSummary {
  std::string name;
  std::string status;
  std::string csv_file;
  int iterations = 0;
  double final_objective = 0.0;
  double final_gap = 0.0;
  Index final_k = 0;
  double final_recovery_err = 0.0;
  double elapsed_ms = 0.0;

  bool operator==(const AlgorithmSummary&) const = default;
};

struct BenchSummary {
  std::string trace_schema = kTraceSchema;
  ExperimentConfig config;
  double lambda0 = 0.0;
  double lambda_tgt = 0.0;
  double reference_objective = 0.0;
  AssumptionReport assumption;
  double delta = 0.0;
  std::optional<Theorem5Bounds> bounds;
  std::vector<AlgorithmSummary> algorithms;
};

inline bool operator==(const AssumptionVerdicts& a, const AssumptionVerdicts& b) {
  return a.noise_bound_ok == b.noise_bound_ok && a.rho_ratio_ok == b.rho_ratio_ok &&
         a.rho_positive_ok == b.rho_positive_ok;
}

inline bool same_number(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

inline bool operator==(const AssumptionReport& a, const AssumptionReport& b) {
  return to_json_value(a) == to_json_value(b);
}

inline bool operator==(const Theorem5Bounds& a, const Theorem5Bounds& b) {
  return to_json_value(a) == to_json_value(b);
}

inline bool operator==(const BenchSummary& a, const BenchSummary& b) {
  return a.trace_schema == b.trace_schema && a.config == b.config &&
         same_number(a.lambda0, b.lambda0) && same_number(a.lambda_tgt, b.lambda_tgt) &&
         same_number(a.reference_objective, b.reference_objective) &&
         a.assumption == b.assumption && same_number(a.delta, b.delta) && a.bounds == b.bounds &&
         a.algorithms == b.algorithms;
}

inline json to_json_value(const BenchSummary& s) {
  using detail::num;
  json algs = json::array();
  for (const auto& a : s.algorithms) {
    algs.push_back({{"name", a.name},
                    {"status", a.status},
                    {"csv_file", a.csv_file},
                    {"iterations", a.iterations},
                    {"final_objective", num(a.final_objective)},
                    {"final_gap", num(a.final_gap)},
                    {"final_k", a.final_k},
                    {"final_recovery_err", num(a.final_recovery_err)},
                    {"elapsed_ms", num(a.elapsed_ms)}});
  }
  return json{{"trace_schema", s.trace_schema},
              {"config", to_json_value(s.config)},
              {"lambda0", num(s.lambda0)},
              {"lambda_tgt", num(s.lambda_tgt)},
              {"reference_objective", num(s.reference_objective)},
              {"assumption", to_json_value(s.assumption)},
              {"delta", num(s.delta)},
              {"bounds", s.bounds ? to_json_value(*s.bounds) : json(nullptr)},
              {"algorithms", algs}};
}

inline BenchSummary bench_summary_from_json(const json& j) {
  using detail::num;
  BenchSummary s;
  s.trace_schema = j.at("trace_schema").get<std::string>();
  s.config = config_from_json(j.at("config"));
  s.lambda0 = num(j.at("lambda0"));
  s.lambda_tgt = num(j.at("lambda_tgt"));
  s.reference_objective = num(j.at("reference_objective"));
  s.assumption = assumption_report_from_json(j.at("assumption"));
  s.delta = num(j.at("delta"));
  if (!j.at("bounds").is_null()) s.bounds = theorem5_bounds_from_json(j.at("bounds"));
  for (const auto& a : j.at("algorithms")) {
    AlgorithmSummary x;
    x.name = a.at("name").get<std::string>();
    x.status = a.at("status").get<std::string>();
    x.csv_file = a.at("csv_file").get<std::string>();
    x.iterations = a.at("iterations").get<int>();
    x.final_objective = num(a.at("final_objective"));
    x.final_gap = num(a.at("final_gap"));
    x.final_k = a.at("final_k").get<Index>();
    x.final_recovery_err = num(a.at("final_recovery_err"));
    x.elapsed_ms = num(a.at("elapsed_ms"));
    s.algorithms.push_back(std::move(x));
  }
  return s;
}

namespace detail {

inline std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace detail

inline std::string format_trace_csv(const std::vector<TraceRow>& rows) {
  std::ostringstream out;
  out << kTraceHeader << '\n';
  for (const auto& row : rows) {
    const auto& r = row.record;
    out << r.stage << ',' << r.iter_stage << ',' << r.iter_global << ','
        << detail::format_double(r.lambda) << ',' << detail::format_double(r.objective) << ','
        << detail::format_double(row.gap) << ',' << detail::format_double(r.stop_quantity) << ','
        << r.k << ',' << detail::format_double(r.step_constant) << ','
        << detail::format_double(row.recovery_err) << ',' << detail::format_double(r.elapsed_ms)
        << '\n';
  }
  return out.str();
}

/// The trace CSV without its elapsed_ms column: the part of the file that
/// is a deterministic function of the configuration.
inline std::string strip_timing(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto cut = line.rfind(',');
    out << (cut == std::string::npos ? line : line.substr(0, cut)) << '\n';
  }
  return out.str();
}

/// Evaluation context shared by all algorithms of one experiment.
struct BenchContext {
  const GeneratedProblem& gen;
  double lambda_tgt;
  double reference_objective;
};

inline AlgorithmRun run_algorithm(const std::string& name, const ExperimentConfig& config,
                                  const BenchContext& ctx) {
  const auto& problem = ctx.gen.problem;
  const auto& fam = ctx.gen.family;
  const Metric& B = problem.metric();
  const double x0_norm = induced_norm(ctx.gen.x0, B);
  AlgorithmRun run;
  run.name = name;
  IterateObserver observer = [&](const TraceRecord& rec, const Vector& x) {
    TraceRow row;
    row.record = rec;
    double phi = rec.objective;
    if (rec.lambda != ctx.lambda_tgt) phi += (ctx.lambda_tgt - rec.lambda) * norm_value(fam, x);
    row.gap = phi - ctx.reference_objective;
    const double err = induced_norm(x - ctx.gen.x0, B);
    row.recovery_err = x0_norm > 0.0 ? err / x0_norm : err;
    run.rows.push_back(row);
  };
  HomotopyParams params = config.homotopy;
  params.lambda_tgt = ctx.lambda_tgt;
  try {
    if (name == "homotopy") {
      run.x = homotopy(problem, fam, params, observer).x;
    } else if (name == "pg") {
      run.x = baseline_pg(problem, fam, ctx.lambda_tgt, params.epsilon, params, observer).x;
    } else if (name == "apg") {
      run.x = baseline_apg(problem, fam, ctx.lambda_tgt, params.epsilon, params, observer).x;
    } else if (name == "svp") {
      const Index rank = config.svp.rank > 0 ? config.svp.rank : std::max<Index>(1, config.k0);
      run.x = baseline_svp(problem, fam, rank, config.svp.step, config.svp.iters, observer).x;
    } else {
      throw config_error("unknown algorithm '" + name + "'");
    }
    run.status = name == "svp" ? "completed" : "converged";
  } catch (const iteration_limit_error& e) {
    run.status = "iteration_limit";
    run.message = e.what();
    run.x = e.last_iterate();
  }
  return run;
}

struct RunOptions {
  bool parallel = false;  // run algorithms concurrently
  bool write_files = true;
};

struct BenchResult {
  BenchSummary summary;
  std::vector<AlgorithmRun> runs;
};

/// Generates the problem, computes the reference optimum at lambda_tgt,
/// runs every configured algorithm and writes <output_dir>/<name>.csv and
/// <output_dir>/summary.json.
inline BenchResult run_bench(const ExperimentConfig& config, RunOptions options = {}) {
  validate(config);
  const GeneratedProblem gen = gen_problem(config);
  BenchResult result;
  BenchSummary& summary = result.summary;
  summary.config = config;

  const Vector zero_noise = Vector::Zero(gen.problem.op().rows());
  const Vector& z = gen.z ? *gen.z : zero_noise;
  const LambdaDefaults defaults = default_lambda_tgt(gen.problem, gen.family, z);
  summary.lambda0 = defaults.lambda0;
  summary.lambda_tgt = config.homotopy.lambda_tgt > 0.0 ? config.homotopy.lambda_tgt
                                                        : defaults.lambda_tgt;
  if (!(summary.lambda_tgt > 0.0)) {
    throw config_error("config: noise is zero or unknown; homotopy.lambda_tgt must be given");
  }
  summary.reference_objective =
      reference_optimum(gen.problem, gen.family, summary.lambda_tgt).value;

  const double c = norm_constant_c(gen.family);
  const double r = config.r > 0.0 ? config.r : 2.0 * c;
  summary.delta = select_delta(config.homotopy.delta_prime, config.homotopy.eta);
  summary.assumption = check_assumption(gen.problem.op(), gen.problem.metric(), gen.family,
                                        gen.x0, z, summary.lambda_tgt, summary.delta, r,
                                        config.homotopy.gamma_inc, config.seed,
                                        config.rip_samples);
  if (summary.lambda0 > 0.0 && summary.assumption.rate > 0.0) {
    summary.bounds = theorem5_bounds(summary.assumption, config.homotopy.delta_prime,
                                     config.homotopy.eta, config.homotopy.epsilon,
                                     summary.lambda0, summary.lambda_tgt);
  }

  const BenchContext ctx{gen, summary.lambda_tgt, summary.reference_objective};
  if (options.parallel) {
    std::vector<std::future<AlgorithmRun>> futures;
    for (const auto& name : config.algorithms) {
      futures.push_back(std::async(std::launch::async,
                                   [&, name] { return run_algorithm(name, config, ctx); }));
    }
    for (auto& f : futures) result.runs.push_back(f.get());
  } else {
    for (const auto& name : config.algorithms) {
      result.runs.push_back(run_algorithm(name, config, ctx));
    }
  }

  const std::filesystem::path dir(config.output_dir);
  if (options.write_files) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create output directory " + dir.string() + ": " + ec.message());
  }
  for (const auto& run : result.runs) {
    AlgorithmSummary a;
    a.name = run.name;
    a.status = run.status;
    a.csv_file = run.name + ".csv";
    if (!run.rows.empty()) {
      const auto& last = run.rows.back();
      a.iterations = last.record.iter_global;
      a.final_objective = last.record.objective;
      a.final_gap = last.gap;
      a.final_k = last.record.k;
      a.final_recovery_err = last.recovery_err;
      a.elapsed_ms = last.record.elapsed_ms;
    }
    if (options.write_files) detail::write_text(dir / a.csv_file, format_trace_csv(run.rows));
    summary.algorithms.push_back(std::move(a));
  }
  if (options.write_files) {
    detail::write_text(dir / "summary.json", to_json_value(summary).dump(2) + "\n");
  }
  return result;
}

}  // namespace pgh
