#pragma once

#include "adsparse/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace adsparse {

enum class Algorithm { Iht, Niht, Htp, Iad, Niad, Adp };

const char* algorithm_name(Algorithm a);
std::optional<Algorithm> algorithm_from_name(const std::string& name);

/// True for the variants that carry the correction pair (u, v).
bool uses_direction_memory(Algorithm a);

/// Thrown when a normalized step has no usable direction on the current
/// support (zero denominator); the run aborts rather than guessing a step.
class DegenerateStepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  Algorithm algorithm = Algorithm::Iad;
  int s = 0;                    // target sparsity
  double mu = 1.0;              // fixed step, Iht/Iad only
  double gamma = 0.1;           // memory decay, alternating-direction variants
  int max_iters = 400;
  double residual_tol = 1e-6;
  std::optional<Vector> x0;     // defaults to the zero vector
  bool force_zero_uv = false;   // test hook: freeze u = v = 0

  void validate(Index n) const;
};

struct IterState {
  Vector x;       // current iterate, at most s nonzeros
  Vector r;       // cached residual b - A x
  Vector u;       // decaying gradient memory
  Vector v;       // decaying imprint of the initial residual
  IndexSet S;     // the support used by the normalized step
  double mu_k = 0.0;
  int k = 0;
};

enum class StopReason { residual_tol, max_iters, error };

const char* stop_reason_name(StopReason r);

struct SolverResult {
  Vector x_final;
  IndexSet support_final;
  int iterations_used = 0;
  StopReason stop_reason = StopReason::max_iters;
  std::vector<double> relative_residual_history;     // one entry per iterate
  std::optional<std::vector<double>> error_history;  // ||x_S - x(k)|| if truth known
  std::string error;                                 // set when stop_reason == error
};

/// Produces x(1), u(1), v(1) from x(0) for the configured algorithm.
IterState solver_init(const ProblemInstance& problem, const SolverConfig& config);

/// One iteration x(k) -> x(k+1) of the configured algorithm.
IterState solver_step(const ProblemInstance& problem, const IterState& state,
                      const SolverConfig& config);

/// Iterates until ||b - A x(k)|| / ||b|| <= residual_tol or k >= max_iters.
/// Step errors end the run with stop_reason == error and the message kept.
SolverResult run_solver(const ProblemInstance& problem, const SolverConfig& config);

}  // namespace adsparse
