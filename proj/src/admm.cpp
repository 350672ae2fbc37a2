#include "adsparse/admm.hpp"

#include <cmath>

namespace adsparse {

namespace {

constexpr double kBoundaryTol = 1e-9;
constexpr double kMagnitudeCap = 1e5;

// Smallest distance of any |entry| to the hard-threshold cut.
double boundary_margin(const Vector& arg, double tau) {
  double margin = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < arg.size(); ++i)
    margin = std::min(margin, std::abs(std::abs(arg[i]) - tau));
  return margin;
}

}  // namespace

void AdmmParams::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(tau > 0.0))
    throw std::invalid_argument("admm: alpha, beta, tau must be positive");
}

double AdmmParams::threshold() const { return std::sqrt(2.0 * tau / beta); }

AdmmState admm_l0_step(const ProblemInstance& problem, const AdmmState& state,
                       const AdmmParams& params) {
  params.validate();
  if (state.x.size() != problem.cols() || state.r.size() != problem.rows() ||
      state.y.size() != problem.rows())
    throw std::invalid_argument("admm: state dimensions do not match problem");

  const double ab = params.alpha * params.beta;
  AdmmState next;
  next.r = (ab / (1.0 + ab)) * (state.y / params.beta + problem.b - problem.A * state.x);
  next.x = hard_threshold_by_value(
      state.x + (params.tau / ab) * (problem.A.transpose() * next.r), params.threshold());
  next.y = state.y - params.beta * (problem.A * next.x + next.r - problem.b);
  next.k = state.k + 1;
  return next;
}

std::vector<AdmmState> run_admm_l0(const ProblemInstance& problem,
                                   const AdmmParams& params, const Vector& x0,
                                   int max_iters) {
  params.validate();
  if (max_iters < 1) throw std::invalid_argument("admm: max_iters must be >= 1");
  if (x0.size() != problem.cols()) throw std::invalid_argument("admm: x0 size != cols(A)");

  std::vector<AdmmState> trajectory;
  trajectory.reserve(static_cast<size_t>(max_iters) + 1);
  trajectory.push_back({x0, Vector::Zero(problem.rows()), Vector::Zero(problem.rows()), 0});
  for (int k = 0; k < max_iters; ++k)
    trajectory.push_back(admm_l0_step(problem, trajectory.back(), params));
  return trajectory;
}

Vector unrolled_x_argument(const ProblemInstance& problem, const AdmmParams& params,
                           const std::vector<Vector>& x_history, int k) {
  params.validate();
  if (k < 1) throw std::invalid_argument("unrolled update: k must be >= 1");
  if (x_history.size() < static_cast<size_t>(k) + 1)
    throw std::invalid_argument("unrolled update: history must hold x(0)..x(k)");

  const double ab = params.alpha * params.beta;
  auto at_c = [&](int i) {
    return (problem.A.transpose() * (problem.b - problem.A * x_history[static_cast<size_t>(i)])).eval();
  };

  Vector arg = x_history[static_cast<size_t>(k)] + (2.0 * params.tau / (1.0 + ab)) * at_c(k);
  for (int i = 1; i <= k - 1; ++i)
    arg += params.tau * (1.0 - ab) * std::pow(1.0 + ab, -(k + 1 - i)) * at_c(i);
  arg -= (ab * params.tau * std::pow(1.0 + ab, -(k + 1))) * at_c(0);
  return arg;
}

Vector unrolled_x_update(const ProblemInstance& problem, const AdmmParams& params,
                         const std::vector<Vector>& x_history, int k) {
  return hard_threshold_by_value(unrolled_x_argument(problem, params, x_history, k),
                                 params.threshold());
}

EquivalenceReport check_unrolled_equivalence(const ProblemInstance& problem,
                                             const AdmmParams& params,
                                             const Vector& x0, int iters) {
  if (iters < 2) throw std::invalid_argument("equivalence check: iters must be >= 2");
  const auto trajectory = run_admm_l0(problem, params, x0, iters);

  std::vector<Vector> xs;
  xs.reserve(trajectory.size());
  for (const auto& st : trajectory) xs.push_back(st.x);

  EquivalenceReport report;
  report.iters = iters;
  const double tau = params.threshold();
  const double ab = params.alpha * params.beta;
  auto note_magnitude = [&report](const Vector& v) {
    report.max_magnitude = std::max(report.max_magnitude, v.lpNorm<Eigen::Infinity>());
  };

  // Threshold arguments actually seen by the split-variable route.
  for (int k = 0; k < iters; ++k) {
    const Vector arg =
        xs[static_cast<size_t>(k)] +
        (params.tau / ab) * (problem.A.transpose() * trajectory[static_cast<size_t>(k) + 1].r);
    if (boundary_margin(arg, tau) <= kBoundaryTol) report.boundary_inconclusive = true;
    note_magnitude(arg);
  }

  for (int k = 1; k < iters; ++k) {
    const Vector arg = unrolled_x_argument(problem, params, xs, k);
    if (boundary_margin(arg, tau) <= kBoundaryTol) report.boundary_inconclusive = true;
    note_magnitude(arg);
    const Vector recomputed = hard_threshold_by_value(arg, tau);
    const double dev = (recomputed - xs[static_cast<size_t>(k) + 1]).lpNorm<Eigen::Infinity>();
    report.max_deviation = std::max(report.max_deviation, dev);
  }
  report.magnitude_inconclusive = report.max_magnitude > kMagnitudeCap;
  return report;
}

}  // namespace adsparse
