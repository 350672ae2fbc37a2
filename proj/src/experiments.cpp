#include "adsparse/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace adsparse {

namespace {

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        if (failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string format_rate(double rate) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), rate, std::chars_format::fixed, 6);
  return std::string(buf, ptr);
}

}  // namespace

const char* signal_kind_name(SignalKind k) {
  return k == SignalKind::Cars ? "cars" : "gaussian";
}

std::optional<SignalKind> signal_kind_from_name(const std::string& name) {
  if (name == "cars") return SignalKind::Cars;
  if (name == "gaussian") return SignalKind::Gaussian;
  return std::nullopt;
}

Matrix gen_gaussian_matrix(int m, int n, uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("gen matrix: m, n must be >= 1");
  Matrix A(m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i)
      A(i, j) = scale * normal_at(seed, static_cast<uint64_t>(i) * n + j);
  return A;
}

std::pair<Vector, IndexSet> gen_sparse_signal(int n, int s, SignalKind kind,
                                              uint64_t seed) {
  if (s < 1 || s > n) throw std::invalid_argument("gen signal: s must be in [1, n]");
  Rng rng(seed);

  // Partial Fisher-Yates draw of an s-subset.
  std::vector<int> pool(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) pool[static_cast<size_t>(i)] = i;
  for (int i = 0; i < s; ++i) {
    const int j = i + static_cast<int>(rng.next_below(static_cast<uint64_t>(n - i)));
    std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
  }
  pool.resize(static_cast<size_t>(s));
  IndexSet S(std::move(pool), n);

  Vector x = Vector::Zero(n);
  for (int i : S.indices) {
    if (kind == SignalKind::Cars) {
      x[i] = (rng.next_u64() & 1) ? 1.0 : -1.0;
    } else {
      double v = rng.next_normal();
      while (v == 0.0) v = rng.next_normal();
      x[i] = v;
    }
  }
  return {std::move(x), std::move(S)};
}

ProblemInstance make_instance(int m, int n, int s, SignalKind kind,
                              uint64_t instance_seed) {
  ProblemInstance p;
  p.A = gen_gaussian_matrix(m, n, mix_at(instance_seed, 1));
  auto [x, S] = gen_sparse_signal(n, s, kind, mix_at(instance_seed, 2));
  p.b = matvec_on_support(p.A, x, S);
  p.truth = std::move(x);
  p.true_support = std::move(S);
  return p;
}

AlgorithmSpec parse_algorithm_tag(const std::string& tag, double gamma) {
  const auto colon = tag.find(':');
  const std::string name = tag.substr(0, colon);
  const auto alg = algorithm_from_name(name);
  if (!alg) throw std::invalid_argument("unknown algorithm tag: " + tag);

  AlgorithmSpec spec;
  spec.tag = tag;
  spec.config.algorithm = *alg;
  spec.config.gamma = gamma;
  if (colon != std::string::npos) {
    if (*alg != Algorithm::Iht && *alg != Algorithm::Iad)
      throw std::invalid_argument("step-size suffix only applies to iht/iad: " + tag);
    const std::string mu_str = tag.substr(colon + 1);
    size_t used = 0;
    double mu = 0.0;
    try {
      mu = std::stod(mu_str, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad step size in tag: " + tag);
    }
    if (used != mu_str.size() || !(mu > 0.0))
      throw std::invalid_argument("bad step size in tag: " + tag);
    spec.config.mu = mu;
  }
  return spec;
}

void ExperimentSpec::validate() const {
  if (m < 1 || n < 1) throw std::invalid_argument("experiment: m, n must be >= 1");
  if (s_min < 1 || s_min > s_max || s_max > n)
    throw std::invalid_argument("experiment: sparsity range must satisfy 1 <= s_min <= s_max <= n");
  if (trials_per_s < 1) throw std::invalid_argument("experiment: trials_per_s must be >= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("experiment: gamma must be positive");
}

TrialReport run_trial(const ExperimentSpec& spec, const AlgorithmSpec& algo,
                      int s, int trial_index) {
  TrialReport rep;
  rep.algorithm = algo.tag;
  rep.s = s;
  rep.trial = trial_index;
  rep.seed = derive_seed(spec.master_seed, algo.tag, s, trial_index);

  const ProblemInstance problem = make_instance(spec.m, spec.n, s, spec.signal, rep.seed);
  SolverConfig config = algo.config;
  config.s = s;
  const SolverResult result = run_solver(problem, config);

  rep.success = result.support_final == *problem.true_support;
  rep.iterations_used = result.iterations_used;
  rep.stop_reason = result.stop_reason;
  rep.error = result.error;
  return rep;
}

CurvePoint measure_point(const ExperimentSpec& spec, const AlgorithmSpec& algo,
                         int s, int threads) {
  spec.validate();
  const int trials = spec.trials_per_s;
  std::vector<uint8_t> ok(static_cast<size_t>(trials), 0);
  std::vector<uint8_t> err(static_cast<size_t>(trials), 0);
  parallel_for(trials, threads, [&](int t) {
    const TrialReport rep = run_trial(spec, algo, s, t);
    ok[static_cast<size_t>(t)] = rep.success ? 1 : 0;
    err[static_cast<size_t>(t)] = rep.stop_reason == StopReason::error ? 1 : 0;
  });

  CurvePoint point;
  point.s = s;
  point.trials = trials;
  for (int t = 0; t < trials; ++t) {
    point.successes += ok[static_cast<size_t>(t)];
    point.solver_errors += err[static_cast<size_t>(t)];
  }
  return point;
}

Curve reconstruction_curve(const ExperimentSpec& spec, const AlgorithmSpec& algo,
                           int threads, const CurveProgress& progress) {
  spec.validate();
  Curve curve;
  curve.algorithm = algo.tag;
  for (int s = spec.s_min; s <= spec.s_max; ++s) {
    curve.points.push_back(measure_point(spec, algo, s, threads));
    if (progress) progress(algo.tag, s, spec.trials_per_s, spec.trials_per_s);
  }
  curve.critical_sparsity = critical_sparsity(curve);
  return curve;
}

std::optional<int> critical_sparsity(const Curve& curve, int num, int den) {
  std::optional<int> best;
  for (const auto& p : curve.points) {
    if (static_cast<long long>(p.successes) * den < static_cast<long long>(num) * p.trials)
      break;
    best = p.s;
  }
  return best;
}

void emit_report(const std::vector<Curve>& curves, const ReportMeta& meta,
                 const std::string& path, ReportFormat format) {
  std::string body;
  if (format == ReportFormat::Csv) {
    body = "algorithm,s,trials,successes,rate\n";
    for (const auto& curve : curves)
      for (const auto& p : curve.points) {
        body += curve.algorithm;
        body += ',';
        body += std::to_string(p.s) + ',' + std::to_string(p.trials) + ',' +
                std::to_string(p.successes) + ',' + format_rate(p.rate()) + '\n';
      }
  } else {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["m"] = meta.m;
    j["n"] = meta.n;
    j["signal"] = signal_kind_name(meta.signal);
    j["trials_per_s"] = meta.trials_per_s;
    j["gamma"] = meta.gamma;
    j["master_seed"] = meta.master_seed;
    auto& arr = j["curves"] = nlohmann::json::array();
    for (const auto& curve : curves) {
      nlohmann::json jc;
      jc["algorithm"] = curve.algorithm;
      if (curve.critical_sparsity)
        jc["critical_sparsity"] = *curve.critical_sparsity;
      else
        jc["critical_sparsity"] = nullptr;
      auto& pts = jc["points"] = nlohmann::json::array();
      for (const auto& p : curve.points)
        pts.push_back({{"s", p.s},
                       {"trials", p.trials},
                       {"successes", p.successes},
                       {"solver_errors", p.solver_errors},
                       {"rate", p.rate()}});
      arr.push_back(std::move(jc));
    }
    body = j.dump(2);
    body += '\n';
  }

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write report file: " + path);
    out << body;
    if (!out.good()) throw std::runtime_error("write failed: " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move report into place: " + path + ": " + ec.message());
  }
}

namespace {

Report parse_csv_report(const std::string& text) {
  Report report;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "algorithm,s,trials,successes,rate")
    throw std::runtime_error("csv report: unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string tag, field;
    CurvePoint p;
    if (!std::getline(row, tag, ',')) throw std::runtime_error("csv report: bad row");
    std::getline(row, field, ',');
    p.s = std::stoi(field);
    std::getline(row, field, ',');
    p.trials = std::stoi(field);
    std::getline(row, field, ',');
    p.successes = std::stoi(field);
    if (report.curves.empty() || report.curves.back().algorithm != tag) {
      auto it = std::find_if(report.curves.begin(), report.curves.end(),
                             [&](const Curve& c) { return c.algorithm == tag; });
      if (it != report.curves.end())
        throw std::runtime_error("csv report: rows for " + tag + " are not contiguous");
      report.curves.push_back({tag, {}, std::nullopt});
    }
    report.curves.back().points.push_back(p);
  }
  for (auto& curve : report.curves) curve.critical_sparsity = critical_sparsity(curve);
  return report;
}

Report parse_json_report(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  Report report;
  report.has_meta = true;
  report.meta.m = j.at("m").get<int>();
  report.meta.n = j.at("n").get<int>();
  const auto kind = signal_kind_from_name(j.at("signal").get<std::string>());
  if (!kind) throw std::runtime_error("json report: unknown signal kind");
  report.meta.signal = *kind;
  report.meta.trials_per_s = j.at("trials_per_s").get<int>();
  report.meta.gamma = j.at("gamma").get<double>();
  report.meta.master_seed = j.at("master_seed").get<uint64_t>();
  for (const auto& jc : j.at("curves")) {
    Curve curve;
    curve.algorithm = jc.at("algorithm").get<std::string>();
    if (!jc.at("critical_sparsity").is_null())
      curve.critical_sparsity = jc.at("critical_sparsity").get<int>();
    for (const auto& jp : jc.at("points")) {
      CurvePoint p;
      p.s = jp.at("s").get<int>();
      p.trials = jp.at("trials").get<int>();
      p.successes = jp.at("successes").get<int>();
      p.solver_errors = jp.value("solver_errors", 0);
      curve.points.push_back(p);
    }
    report.curves.push_back(std::move(curve));
  }
  return report;
}

}  // namespace

Report parse_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read report file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw std::runtime_error("empty report file: " + path);
  return text[first] == '{' ? parse_json_report(text) : parse_csv_report(text);
}

}  // namespace adsparse
