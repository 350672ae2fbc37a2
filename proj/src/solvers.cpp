#include "adsparse/solvers.hpp"

#include <cmath>

namespace adsparse {

namespace {

enum class Family { FixedStep, Normalized, Pursuit };

Family family_of(Algorithm a) {
  switch (a) {
    case Algorithm::Iht:
    case Algorithm::Iad:
      return Family::FixedStep;
    case Algorithm::Niht:
    case Algorithm::Niad:
      return Family::Normalized;
    case Algorithm::Htp:
    case Algorithm::Adp:
      return Family::Pursuit;
  }
  throw std::invalid_argument("unknown algorithm");
}

double normalized_step(const Matrix& A, const Vector& d, const IndexSet& S) {
  if (S.empty()) throw DegenerateStepError("normalized step: empty support");
  const double num = norm_sq_on(d, S);
  const double den = matvec_on_support(A, d, S).squaredNorm();
  if (den == 0.0) throw DegenerateStepError("normalized step: zero direction image");
  return num / den;
}

}  // namespace

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Iht: return "iht";
    case Algorithm::Niht: return "niht";
    case Algorithm::Htp: return "htp";
    case Algorithm::Iad: return "iad";
    case Algorithm::Niad: return "niad";
    case Algorithm::Adp: return "adp";
  }
  return "?";
}

std::optional<Algorithm> algorithm_from_name(const std::string& name) {
  for (Algorithm a : {Algorithm::Iht, Algorithm::Niht, Algorithm::Htp, Algorithm::Iad,
                      Algorithm::Niad, Algorithm::Adp})
    if (name == algorithm_name(a)) return a;
  return std::nullopt;
}

bool uses_direction_memory(Algorithm a) {
  return a == Algorithm::Iad || a == Algorithm::Niad || a == Algorithm::Adp;
}

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::residual_tol: return "residual_tol";
    case StopReason::max_iters: return "max_iters";
    case StopReason::error: return "error";
  }
  return "?";
}

void SolverConfig::validate(Index n) const {
  if (s < 1 || s > n) throw std::invalid_argument("solver: s must be in [1, n]");
  if (!(gamma > 0.0)) throw std::invalid_argument("solver: gamma must be positive");
  if (family_of(algorithm) == Family::FixedStep && !(mu > 0.0))
    throw std::invalid_argument("solver: mu must be positive");
  if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be >= 1");
  if (!(residual_tol >= 0.0)) throw std::invalid_argument("solver: residual_tol must be >= 0");
  if (x0 && x0->size() != n) throw std::invalid_argument("solver: x0 size != n");
}

IterState solver_init(const ProblemInstance& problem, const SolverConfig& config) {
  const Index n = problem.cols();
  config.validate(n);

  const Vector x0 = config.x0 ? *config.x0 : Vector::Zero(n);
  const Vector c0 = problem.b - problem.A * x0;
  const Vector t = problem.A.transpose() * c0;  // -grad f(x0)
  const bool with_memory = uses_direction_memory(config.algorithm) && !config.force_zero_uv;

  IterState st;
  st.k = 1;
  st.u = Vector::Zero(n);
  st.v = with_memory ? (config.gamma / (2.0 * (1.0 + config.gamma)) * t).eval()
                     : Vector::Zero(n);

  switch (family_of(config.algorithm)) {
    case Family::FixedStep:
      st.mu_k = config.mu;
      st.x = hard_threshold_top_s(x0 + 0.5 * config.mu * t, config.s);
      st.S = support(st.x);
      break;
    case Family::Normalized: {
      const IndexSet S0 = support(x0);
      // From a zero start the step is normalized over the s top entries of
      // A^T b instead of the (empty) support of x(0).
      const IndexSet Sm = S0.empty() ? support(hard_threshold_top_s(t, config.s)) : S0;
      st.mu_k = normalized_step(problem.A, t, Sm);
      st.x = hard_threshold_top_s(x0 + 0.5 * st.mu_k * t, config.s);
      st.S = support(st.x);
      break;
    }
    case Family::Pursuit: {
      const Vector w = hard_threshold_top_s(x0 + 0.5 * t, config.s);
      st.S = support(w);
      st.x = least_squares_on_support(problem.A, problem.b, st.S);
      st.mu_k = 1.0;
      break;
    }
  }
  st.r = problem.b - matvec_on_support(problem.A, st.x, support(st.x));
  return st;
}

IterState solver_step(const ProblemInstance& problem, const IterState& state,
                      const SolverConfig& config) {
  const bool with_memory = uses_direction_memory(config.algorithm) && !config.force_zero_uv;
  const Vector g = (-(problem.A.transpose() * state.r)).eval();  // grad f(x(k))
  const Vector d = -g + state.u - state.v;

  IterState next;
  next.k = state.k + 1;
  switch (family_of(config.algorithm)) {
    case Family::FixedStep:
      next.mu_k = config.mu;
      next.x = hard_threshold_top_s(state.x + config.mu * d, config.s);
      next.S = support(next.x);
      break;
    case Family::Normalized:
      next.mu_k = normalized_step(problem.A, d, state.S);
      next.x = hard_threshold_top_s(state.x + next.mu_k * d, config.s);
      next.S = support(next.x);
      break;
    case Family::Pursuit: {
      const Vector w = hard_threshold_top_s(state.x + d, config.s);
      next.S = support(w);
      next.x = least_squares_on_support(problem.A, problem.b, next.S);
      next.mu_k = 1.0;
      break;
    }
  }
  if (with_memory) {
    const double gamma = config.gamma;
    next.u = -(1.0 - gamma) / (2.0 * (1.0 + gamma)) * g + state.u / (1.0 + gamma);
    next.v = state.v / (1.0 + gamma);
  } else {
    next.u = Vector::Zero(state.u.size());
    next.v = Vector::Zero(state.v.size());
  }
  next.r = problem.b - matvec_on_support(problem.A, next.x, support(next.x));
  return next;
}

SolverResult run_solver(const ProblemInstance& problem, const SolverConfig& config) {
  problem.validate();
  config.validate(problem.cols());

  SolverResult result;
  const double b_norm = problem.b.norm();

  std::optional<Vector> target;  // best s-term approximation of the truth
  if (problem.truth) {
    target = hard_threshold_top_s(*problem.truth, config.s);
    result.error_history.emplace();
  }

  // Zero observations: the recovery target is the zero vector and the
  // relative residual is defined as 0.
  if (b_norm == 0.0) {
    result.x_final = Vector::Zero(problem.cols());
    result.support_final = support(result.x_final);
    result.iterations_used = 0;
    result.stop_reason = StopReason::residual_tol;
    result.relative_residual_history.push_back(0.0);
    if (target) result.error_history->push_back(target->norm());
    return result;
  }

  const Vector x0 = config.x0 ? *config.x0 : Vector::Zero(problem.cols());
  auto record = [&](const Vector& x, const Vector& r) {
    result.relative_residual_history.push_back(r.norm() / b_norm);
    if (target) result.error_history->push_back((x - *target).norm());
  };
  record(x0, problem.b - problem.A * x0);

  Vector last_x = x0;
  int k = 0;
  try {
    IterState st = solver_init(problem, config);
    last_x = st.x;
    k = st.k;
    record(st.x, st.r);
    while (true) {
      const double rel = result.relative_residual_history.back();
      if (!std::isfinite(rel)) throw NonFiniteError("solver: non-finite residual");
      if (rel <= config.residual_tol) {
        result.stop_reason = StopReason::residual_tol;
        break;
      }
      if (k >= config.max_iters) {
        result.stop_reason = StopReason::max_iters;
        break;
      }
      st = solver_step(problem, st, config);
      last_x = st.x;
      k = st.k;
      record(st.x, st.r);
    }
  } catch (const SingularSystemError& e) {
    result.stop_reason = StopReason::error;
    result.error = e.what();
  } catch (const DegenerateStepError& e) {
    result.stop_reason = StopReason::error;
    result.error = e.what();
  } catch (const NonFiniteError& e) {
    result.stop_reason = StopReason::error;
    result.error = e.what();
  }

  result.x_final = last_x;
  result.support_final =
      last_x.allFinite() ? support(last_x) : IndexSet({}, static_cast<int>(problem.cols()));
  result.iterations_used = k;
  return result;
}

}  // namespace adsparse
