#pragma once

#include "adsparse/core.hpp"

#include <vector>

namespace adsparse {

/// Parameters of the split-variable ADMM iteration for l0-penalized least
/// squares: alpha penalizes the residual variable, beta is the augmented
/// Lagrangian weight, tau the proximal step of the x-update.
struct AdmmParams {
  double alpha = 1.0;
  double beta = 1.0;
  double tau = 1.0;
  void validate() const;

  double threshold() const;  // sqrt(2 tau / beta)
};

struct AdmmState {
  Vector x;  // length n
  Vector r;  // splitting variable, length m
  Vector y;  // multiplier, length m
  int k = 0;
};

/// One iteration:
///   r+ = (ab/(1+ab)) (y/beta + b - A x)
///   x+ = hard(x + (tau/ab) A^T r+, sqrt(2 tau/beta))
///   y+ = y - beta (A x+ + r+ - b)
/// with ab = alpha*beta.
AdmmState admm_l0_step(const ProblemInstance& problem, const AdmmState& state,
                       const AdmmParams& params);

/// Full trajectory from (x0, r=0, y=0); returns max_iters+1 states, the first
/// being the initial one.
std::vector<AdmmState> run_admm_l0(const ProblemInstance& problem,
                                   const AdmmParams& params, const Vector& x0,
                                   int max_iters);

/// Pre-threshold argument of the history-only form of the x-update:
///   x(k) + (2 tau/(1+ab)) A^T c(k)
///        + tau (1-ab) sum_{i=1}^{k-1} (1+ab)^{-(k+1-i)} A^T c(i)
///        - (ab tau/(1+ab)^{k+1}) A^T c(0),
/// with c(i) = b - A x(i); the empty sum at k=1 contributes nothing.
Vector unrolled_x_argument(const ProblemInstance& problem,
                           const AdmmParams& params,
                           const std::vector<Vector>& x_history, int k);

/// hard(unrolled_x_argument(...), sqrt(2 tau/beta))
Vector unrolled_x_update(const ProblemInstance& problem,
                         const AdmmParams& params,
                         const std::vector<Vector>& x_history, int k);

struct EquivalenceReport {
  double max_deviation = 0.0;   // inf-norm over all recomputed iterates
  double max_magnitude = 0.0;   // largest |entry| seen on either route
  bool boundary_inconclusive = false;   // a threshold decision sat within
                                        // 1e-9 of the cut
  bool magnitude_inconclusive = false;  // iterates grew past 1e5, where an
                                        // absolute comparison stops attesting
                                        // the identity at double precision
  int iters = 0;

  bool inconclusive() const { return boundary_inconclusive || magnitude_inconclusive; }
};

/// Runs the split-variable iteration, then recomputes each x(k+1), k >= 1,
/// from the x-history alone and reports the worst-case disagreement.
EquivalenceReport check_unrolled_equivalence(const ProblemInstance& problem,
                                             const AdmmParams& params,
                                             const Vector& x0, int iters);

}  // namespace adsparse
