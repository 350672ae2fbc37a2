#pragma once

#include "adsparse/core.hpp"
#include "adsparse/rng.hpp"
#include "adsparse/solvers.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace adsparse {

enum class SignalKind { Cars, Gaussian };

const char* signal_kind_name(SignalKind k);
std::optional<SignalKind> signal_kind_from_name(const std::string& name);

/// m x n matrix with i.i.d. N(0, 1/m) entries; entry (i, j) depends only on
/// (seed, i*n + j), so the same seed reproduces the same matrix bit for bit.
Matrix gen_gaussian_matrix(int m, int n, uint64_t seed);

/// s-sparse signal with a uniformly random support. Cars nonzeros are +/-1,
/// Gaussian nonzeros are standard normal (exact zeros redrawn).
std::pair<Vector, IndexSet> gen_sparse_signal(int n, int s, SignalKind kind,
                                              uint64_t seed);

/// Fresh noiseless instance: A ~ N(0, 1/m), s-sparse truth, b = A x.
ProblemInstance make_instance(int m, int n, int s, SignalKind kind,
                              uint64_t instance_seed);

/// Benchmark entry: a display tag ("iad:0.333333", "htp", ...) plus the
/// solver configuration it stands for. Tags key the per-trial seeds.
struct AlgorithmSpec {
  std::string tag;
  SolverConfig config;
};

/// Parses "name" or "name:mu" (mu suffix only for iht/iad).
AlgorithmSpec parse_algorithm_tag(const std::string& tag, double gamma);

struct ExperimentSpec {
  int m = 200;
  int n = 1000;
  int s_min = 1;
  int s_max = 60;
  SignalKind signal = SignalKind::Cars;
  int trials_per_s = 1000;
  double gamma = 0.1;
  uint64_t master_seed = 1;
  void validate() const;
};

struct TrialReport {
  std::string algorithm;
  int s = 0;
  int trial = 0;
  uint64_t seed = 0;
  bool success = false;  // recovered support equals the true support
  int iterations_used = 0;
  StopReason stop_reason = StopReason::max_iters;
  std::string error;
};

/// One seeded trial: fresh matrix and signal, run the solver, compare
/// supports. Solver aborts (degenerate step, singular fit, divergence) count
/// as failures and carry the error message.
TrialReport run_trial(const ExperimentSpec& spec, const AlgorithmSpec& algo,
                      int s, int trial_index);

struct CurvePoint {
  int s = 0;
  int trials = 0;
  int successes = 0;
  int solver_errors = 0;
  double rate() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
};

struct Curve {
  std::string algorithm;
  std::vector<CurvePoint> points;        // sorted by s
  std::optional<int> critical_sparsity;  // largest all-success prefix
};

/// trials_per_s trials at one sparsity level, fanned out over `threads`
/// workers. The aggregate is independent of scheduling.
CurvePoint measure_point(const ExperimentSpec& spec, const AlgorithmSpec& algo,
                         int s, int threads);

using CurveProgress =
    std::function<void(const std::string& tag, int s, int done, int total)>;

Curve reconstruction_curve(const ExperimentSpec& spec, const AlgorithmSpec& algo,
                           int threads = 1, const CurveProgress& progress = {});

/// Largest s such that successes/trials >= num/den at every s' <= s in the
/// curve; absent when the first point already misses the threshold.
std::optional<int> critical_sparsity(const Curve& curve, int num = 1, int den = 1);

enum class ReportFormat { Csv, Json };

struct ReportMeta {
  int m = 0;
  int n = 0;
  SignalKind signal = SignalKind::Cars;
  int trials_per_s = 0;
  double gamma = 0.0;
  uint64_t master_seed = 0;
};

/// Writes curves to `path` (temp file + atomic rename). Csv columns are
/// exactly algorithm,s,trials,successes,rate with 6-decimal rates; Json adds
/// the sweep metadata and a schema_version field.
void emit_report(const std::vector<Curve>& curves, const ReportMeta& meta,
                 const std::string& path, ReportFormat format);

struct Report {
  std::vector<Curve> curves;
  ReportMeta meta;
  bool has_meta = false;  // Csv files carry no metadata
};

/// Reads either report flavor back (format sniffed from the content).
Report parse_report(const std::string& path);

}  // namespace adsparse
