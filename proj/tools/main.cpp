// Command-line front end: single solves, reconstruction-rate sweeps, critical
// sparsity tables, the split-variable/history-form consistency check, and the
// convergence-constant calculator.

#include <CLI11.hpp>
#include <json.hpp>

#include "adsparse/admm.hpp"
#include "adsparse/experiments.hpp"
#include "adsparse/solvers.hpp"
#include "adsparse/theory.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <thread>

using namespace adsparse;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int default_threads() {
  if (const char* env = std::getenv("ADSPARSE_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

struct SolveArgs {
  std::string algorithm;
  int m = 200, n = 1000, s = 0;
  double mu = 1.0, gamma = 0.1, tol = 1e-6;
  int max_iters = 400;
  uint64_t seed = 1;
  std::string signal = "gaussian";
};

int run_solve(const SolveArgs& a) {
  const auto alg = algorithm_from_name(a.algorithm);
  const auto kind = signal_kind_from_name(a.signal);
  if (!alg) {
    std::cerr << "unknown algorithm: " << a.algorithm << "\n";
    return kExitUsage;
  }
  if (!kind) {
    std::cerr << "unknown signal kind: " << a.signal << "\n";
    return kExitUsage;
  }
  if (a.s < 1 || a.s > a.n || a.m < 1 || !(a.mu > 0) || !(a.gamma > 0) ||
      a.max_iters < 1 || !(a.tol >= 0)) {
    std::cerr << "invalid solve parameters\n";
    return kExitUsage;
  }

  const ProblemInstance problem = make_instance(a.m, a.n, a.s, *kind, a.seed);
  SolverConfig config;
  config.algorithm = *alg;
  config.s = a.s;
  config.mu = a.mu;
  config.gamma = a.gamma;
  config.max_iters = a.max_iters;
  config.residual_tol = a.tol;
  const SolverResult result = run_solver(problem, config);

  json out;
  out["algorithm"] = a.algorithm;
  out["m"] = a.m;
  out["n"] = a.n;
  out["s"] = a.s;
  out["signal"] = a.signal;
  out["seed"] = a.seed;
  out["success"] = result.support_final == *problem.true_support;
  out["iterations"] = result.iterations_used;
  out["stop_reason"] = stop_reason_name(result.stop_reason);
  out["relative_residual"] = result.relative_residual_history.back();
  out["support"] = result.support_final.indices;
  out["true_support"] = problem.true_support->indices;
  if (!result.error.empty()) out["error"] = result.error;
  std::cout << out.dump(2) << "\n";
  return result.stop_reason == StopReason::error ? kExitRuntime : kExitOk;
}

struct SweepArgs {
  std::string algorithms = "iht:1,iht:0.333333,iad:1,iad:0.333333,niht,niad,htp,adp";
  int m = 200, n = 1000;
  int s_min = 1, s_max = 60;
  int trials = 1000;
  double gamma = 0.1;
  uint64_t seed = 1;
  std::string signal = "cars";
  int threads = 0;  // 0: resolve from env/hardware
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

struct SweepPlan {
  ExperimentSpec spec;
  std::vector<AlgorithmSpec> algorithms;
  int threads = 1;
};

// Returns the validated sweep plan or exits with a usage message.
std::optional<SweepPlan> build_sweep(const SweepArgs& a) {
  const auto kind = signal_kind_from_name(a.signal);
  if (!kind) {
    std::cerr << "unknown signal kind: " << a.signal << "\n";
    return std::nullopt;
  }
  SweepPlan plan;
  plan.spec.m = a.m;
  plan.spec.n = a.n;
  plan.spec.s_min = a.s_min;
  plan.spec.s_max = a.s_max;
  plan.spec.signal = *kind;
  plan.spec.trials_per_s = a.trials;
  plan.spec.gamma = a.gamma;
  plan.spec.master_seed = a.seed;
  try {
    plan.spec.validate();
    for (const auto& tag : split(a.algorithms, ','))
      plan.algorithms.push_back(parse_algorithm_tag(tag, a.gamma));
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return std::nullopt;
  }
  plan.threads = a.threads >= 1 ? a.threads : default_threads();
  return plan;
}

std::vector<Curve> run_sweep(const SweepPlan& plan) {
  std::vector<Curve> curves;
  for (const auto& algo : plan.algorithms) {
    const auto progress = [](const std::string& tag, int s, int done, int total) {
      std::cerr << tag << " " << s << " " << done << "/" << total << "\n";
    };
    curves.push_back(reconstruction_curve(plan.spec, algo, plan.threads, progress));
  }
  return curves;
}

int run_curve(const SweepArgs& a, const std::string& out_path, const std::string& format) {
  const auto plan = build_sweep(a);
  if (!plan) return kExitUsage;
  if (format != "csv" && format != "json") {
    std::cerr << "unknown format: " << format << "\n";
    return kExitUsage;
  }
  const auto curves = run_sweep(*plan);
  ReportMeta meta{plan->spec.m,     plan->spec.n,     plan->spec.signal,
                  plan->spec.trials_per_s, plan->spec.gamma, plan->spec.master_seed};
  try {
    emit_report(curves, meta, out_path,
                format == "csv" ? ReportFormat::Csv : ReportFormat::Json);
  } catch (const std::runtime_error& e) {
    std::cerr << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int run_critical(const SweepArgs& a, const std::string& in_path, const std::string& pairs) {
  std::vector<Curve> curves;
  if (!in_path.empty()) {
    try {
      curves = parse_report(in_path).curves;
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return kExitRuntime;
    }
  } else {
    const auto plan = build_sweep(a);
    if (!plan) return kExitUsage;
    curves = run_sweep(*plan);
  }

  auto find_curve = [&](const std::string& tag) -> const Curve* {
    for (const auto& c : curves)
      if (c.algorithm == tag) return &c;
    return nullptr;
  };

  std::printf("%-14s %10s %14s\n", "algorithm", "critical", "critical@0.99");
  for (const auto& c : curves) {
    const auto crit = critical_sparsity(c);
    const auto crit99 = critical_sparsity(c, 99, 100);
    std::printf("%-14s %10s %14s\n", c.algorithm.c_str(),
                crit ? std::to_string(*crit).c_str() : "-",
                crit99 ? std::to_string(*crit99).c_str() : "-");
  }

  for (const auto& pair : split(pairs, ',')) {
    const auto parts = split(pair, '/');
    if (parts.size() != 2) {
      std::cerr << "bad pair (want old/new): " << pair << "\n";
      return kExitUsage;
    }
    const Curve* old_curve = find_curve(parts[0]);
    const Curve* new_curve = find_curve(parts[1]);
    if (!old_curve || !new_curve) {
      std::cerr << "missing curve for pair " << pair << "\n";
      return kExitRuntime;
    }
    const auto old_crit = critical_sparsity(*old_curve);
    const auto new_crit = critical_sparsity(*new_curve);
    if (!old_crit || !new_crit || *old_crit == 0) {
      std::printf("%s -> %s: gain n/a\n", parts[0].c_str(), parts[1].c_str());
      continue;
    }
    const double gain = 100.0 * (*new_crit - *old_crit) / *old_crit;
    std::printf("%s -> %s: %d -> %d, gain %.1f%%\n", parts[0].c_str(), parts[1].c_str(),
                *old_crit, *new_crit, gain);
  }
  return kExitOk;
}

struct EquivalenceArgs {
  int m = 10, n = 30;
  double alpha = 1.0, beta = 1.0, tau = 1.0;
  int iters = 8, instances = 50;
  uint64_t seed = 1;
};

int run_equivalence(const EquivalenceArgs& a) {
  if (!(a.alpha > 0) || !(a.beta > 0) || !(a.tau > 0) || a.iters < 2 ||
      a.instances < 1 || a.m < 1 || a.n < 1) {
    std::cerr << "invalid equivalence parameters\n";
    return kExitUsage;
  }
  const AdmmParams params{a.alpha, a.beta, a.tau};
  const int s = std::max(1, a.n / 10);
  double worst = 0.0;
  int flagged = 0;
  for (int i = 0; i < a.instances; ++i) {
    auto problem =
        make_instance(a.m, a.n, s, SignalKind::Gaussian, a.seed + static_cast<uint64_t>(i));
    problem.b *= 1.5;  // keep a good share of the runs above the threshold
    *problem.truth *= 1.5;
    const auto report =
        check_unrolled_equivalence(problem, params, Vector::Zero(a.n), a.iters);
    if (report.inconclusive()) {
      ++flagged;
      std::printf("instance %d: max_dev=%.3e (%s, excluded)\n", i, report.max_deviation,
                  report.boundary_inconclusive ? "boundary-inconclusive"
                                               : "magnitude-inconclusive");
      continue;
    }
    worst = std::max(worst, report.max_deviation);
    std::printf("instance %d: max_dev=%.3e\n", i, report.max_deviation);
  }
  const bool pass = worst <= 1e-8;
  std::printf("%s max_dev=%.3e over %d instances (%d inconclusive excluded)\n",
              pass ? "PASS" : "FAIL", worst, a.instances, flagged);
  return pass ? kExitOk : kExitRuntime;
}

struct TheoryArgs {
  std::string algorithm = "iad";
  double delta3s = 0.0;
  double mu = 1.0, gamma = 1.0;
  int k = 2;
  double x0_err = -1.0, noise = 0.0, x_min = -1.0;
};

int run_theory(const TheoryArgs& a) {
  const auto alg = algorithm_from_name(a.algorithm);
  if (!alg || !uses_direction_memory(*alg)) {
    std::cerr << "algorithm must be iad, niad or adp\n";
    return kExitUsage;
  }
  if (!(a.delta3s >= 0.0) || a.delta3s >= 1.0) {
    std::cerr << "delta3s must lie in [0, 1)\n";
    return kExitUsage;
  }
  if (!(a.gamma > 0) || !(a.mu > 0) || a.k < 2) {
    std::cerr << "invalid theory parameters\n";
    return kExitUsage;
  }

  TheoryInputs in;
  in.algorithm = *alg;
  in.delta3s = a.delta3s;
  in.mu = a.mu;
  in.gamma = a.gamma;
  try {
    const TheoryBounds t = convergence_constants(in, a.k);
    json out;
    out["algorithm"] = a.algorithm;
    out["delta3s"] = a.delta3s;
    out["mu"] = a.mu;
    out["gamma"] = a.gamma;
    out["rho"] = t.rho;
    out["b"] = t.b;
    out["b1"] = t.b1;
    out["b2"] = t.b2;
    out["b5"] = t.b5;
    out["b6"] = t.b6;
    out["b7"] = t.b7;
    out["b8"] = t.b8;
    out["b9"] = t.b9;
    out["lambda1"] = t.lambda1;
    out["lambda2"] = t.lambda2;
    out["omega1"] = t.omega1;
    out["omega2"] = t.omega2;
    out["converges"] = t.converges;
    out["k"] = a.k;
    const auto th1 = geometric_sum_split(t.lambda1, t.b, a.k);
    const auto th2 = geometric_sum_split(t.lambda2, t.b, a.k);
    out["theta11"] = th1.on_lambda;
    out["theta12"] = th1.on_pow_b;
    out["theta21"] = th2.on_lambda;
    out["theta22"] = th2.on_pow_b;
    for (int i = 0; i < 7; ++i)
      out["c" + std::to_string(i + 1)] = t.c[static_cast<size_t>(i)];
    if (a.x0_err >= 0.0)
      out["error_bound"] = recovery_error_bound(in, a.k, a.x0_err, a.noise);
    if (a.x_min > 0.0 && a.x0_err > 0.0)
      out["support_identification_iterations"] =
          support_identification_bound(a.x_min, a.x0_err, t);
    std::cout << out.dump(2) << "\n";
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse recovery solvers and reconstruction-rate benchmarks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file mirroring the flags in [subcommand] sections");

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Run one seeded instance and print the result");
  solve->fallthrough();
  solve->add_option("--algorithm", solve_args.algorithm,
                    "One of iht, niht, htp, iad, niad, adp")->required();
  solve->add_option("--m", solve_args.m, "Measurement rows")->capture_default_str();
  solve->add_option("--n", solve_args.n, "Signal length")->capture_default_str();
  solve->add_option("--s", solve_args.s, "Target sparsity")->required();
  solve->add_option("--mu", solve_args.mu, "Fixed step size (iht/iad)")->capture_default_str();
  solve->add_option("--gamma", solve_args.gamma, "Memory decay")->capture_default_str();
  solve->add_option("--seed", solve_args.seed, "Instance seed")->capture_default_str();
  solve->add_option("--max-iters", solve_args.max_iters, "Iteration cap")->capture_default_str();
  solve->add_option("--tol", solve_args.tol, "Relative residual tolerance")->capture_default_str();
  solve->add_option("--signal", solve_args.signal, "cars or gaussian")->capture_default_str();

  SweepArgs curve_args;
  std::string curve_out;
  std::string curve_format = "csv";
  auto* curve = app.add_subcommand("curve", "Reconstruction-rate sweep over sparsity");
  curve->fallthrough();
  auto add_sweep_flags = [](CLI::App* cmd, SweepArgs& args) {
    cmd->add_option("--algorithms", args.algorithms,
                    "Comma list of tags; iht/iad take a :mu suffix")->capture_default_str();
    cmd->add_option("--m", args.m, "Measurement rows")->capture_default_str();
    cmd->add_option("--n", args.n, "Signal length")->capture_default_str();
    cmd->add_option("--s-min", args.s_min, "Smallest sparsity")->capture_default_str();
    cmd->add_option("--s-max", args.s_max, "Largest sparsity")->capture_default_str();
    cmd->add_option("--trials", args.trials, "Trials per sparsity level")->capture_default_str();
    cmd->add_option("--gamma", args.gamma, "Memory decay")->capture_default_str();
    cmd->add_option("--seed", args.seed, "Master seed")->capture_default_str();
    cmd->add_option("--signal", args.signal, "cars or gaussian")->capture_default_str();
    cmd->add_option("--threads", args.threads,
                    "Worker threads (default: ADSPARSE_THREADS or hardware)");
  };
  add_sweep_flags(curve, curve_args);
  curve->add_option("--out", curve_out, "Report file")->required();
  curve->add_option("--format", curve_format, "csv or json")->capture_default_str();

  SweepArgs critical_args;
  std::string critical_in;
  std::string critical_pairs =
      "iht:1/iad:1,iht:0.333333/iad:0.333333,niht/niad,htp/adp";
  auto* critical = app.add_subcommand("critical", "Critical sparsity and relative gains");
  critical->fallthrough();
  add_sweep_flags(critical, critical_args);
  critical->add_option("--in", critical_in, "Existing report file (skips the sweep)");
  critical->add_option("--pairs", critical_pairs, "Comma list of old/new tag pairs")
      ->capture_default_str();

  EquivalenceArgs eq_args;
  auto* equivalence = app.add_subcommand(
      "equivalence", "Check the split-variable iteration against its history-only form");
  equivalence->fallthrough();
  equivalence->add_option("--m", eq_args.m)->capture_default_str();
  equivalence->add_option("--n", eq_args.n)->capture_default_str();
  equivalence->add_option("--alpha", eq_args.alpha)->capture_default_str();
  equivalence->add_option("--beta", eq_args.beta)->capture_default_str();
  equivalence->add_option("--tau", eq_args.tau)->capture_default_str();
  equivalence->add_option("--iters", eq_args.iters)->capture_default_str();
  equivalence->add_option("--instances", eq_args.instances)->capture_default_str();
  equivalence->add_option("--seed", eq_args.seed)->capture_default_str();

  TheoryArgs theory_args;
  auto* theory = app.add_subcommand("theory", "Convergence constants and error bounds");
  theory->fallthrough();
  theory->add_option("--algorithm", theory_args.algorithm, "iad, niad or adp")
      ->capture_default_str();
  theory->add_option("--delta3s", theory_args.delta3s, "RIP constant of order 3s")->required();
  theory->add_option("--mu", theory_args.mu, "Fixed step size (iad)")->capture_default_str();
  theory->add_option("--gamma", theory_args.gamma, "Memory decay")->capture_default_str();
  theory->add_option("--k", theory_args.k, "Iteration count for the bound")->capture_default_str();
  theory->add_option("--x0-err", theory_args.x0_err, "Initial error norm");
  theory->add_option("--noise", theory_args.noise, "Noise norm")->capture_default_str();
  theory->add_option("--x-min", theory_args.x_min, "Smallest nonzero truth magnitude");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve->parsed()) return run_solve(solve_args);
    if (curve->parsed()) return run_curve(curve_args, curve_out, curve_format);
    if (critical->parsed()) return run_critical(critical_args, critical_in, critical_pairs);
    if (equivalence->parsed()) return run_equivalence(eq_args);
    if (theory->parsed()) return run_theory(theory_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
