#pragma once

#include "adsparse/core.hpp"
#include "adsparse/solvers.hpp"

#include <array>
#include <vector>

namespace adsparse {

/// Thrown when the 2x2 recurrence matrix has a double eigenvalue, which makes
/// the eigen-projection weights singular. Reported, never silently patched.
class DegenerateSpectrumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed form of the two-term scalar recurrence
///   b(k+2) = c1 b(k+1) + c2 a(k+1) + c3 a(k),
/// evaluated at b(k+1) from b(1) and the driving samples a(0..k):
///   b(k+1) = c1^k b(1) + c2 a(k)
///          + (c1 c2 + c3) sum_{i=1}^{k-1} c1^{k-1-i} a(i) + c1^{k-1} c3 a(0).
double unroll_recurrence(double c1, double c2, double c3,
                         const std::vector<double>& a, double b1, int k);

/// Inputs of a nonnegative recurrence with geometrically decaying memory:
///   a(k+1) <= b1 a(k) + b2 sum_{i=1}^{k-1} b^{k-i} a(i) + b3 b^k + b4.
struct RecurrenceSpec {
  double b = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  double b4 = 0.0;
  double a1 = 0.0;  // a(1)
  double a2 = 0.0;  // a(2)
  void validate() const;
};

/// sum_{i=0}^{k-3} b^i lambda^{k-3-i} = (lambda^{k-2} - b^{k-2})/(lambda - b),
/// continued as (k-2) lambda^{k-3} at lambda == b (tolerance 1e-12).
double geometric_sum_ratio(double lambda, double b, int k);

/// The same quantity split into the coefficient of lambda^{k-2} and the
/// coefficient of b^{k-2}; both tables are exposed because the error-bound
/// coefficients group terms by these powers.
struct ThetaCoeffs {
  double on_lambda = 0.0;  // multiplies lambda^{k-2}
  double on_pow_b = 0.0;   // multiplies b^{k-2}
};
ThetaCoeffs geometric_sum_split(double lambda, double b, int k);

/// Closed-form envelope of the memory recurrence at index k+1 (k >= 2),
/// assembled from the eigen-structure of [[b1, b], [b2, b]]. Equality-driven
/// sequences reproduce it exactly.
double recurrence_envelope(const RecurrenceSpec& spec, int k);

struct TheoryInputs {
  Algorithm algorithm = Algorithm::Iad;  // one of Iad, Niad, Adp
  double delta3s = 0.0;                  // RIP constant of order 3s, in [0, 1)
  double mu = 1.0;                       // Iad only
  double gamma = 1.0;
  void validate() const;
};

/// RIP-based convergence constants: recurrence coefficients (b, b1, b2),
/// initialization/noise transfer factors (b5..b9), the eigenvalues and
/// projection weights of the recurrence matrix, the error-bound coefficients
/// c1..c7 (evaluated at c_eval_k), and the convergence margin rho. The
/// iteration contracts iff rho > |1-gamma|/gamma, equivalently
/// (1-b)(1-b1) > b b2 with 0 < b < 1, equivalently max eigenvalue < 1.
struct TheoryBounds {
  Algorithm algorithm = Algorithm::Iad;
  double gamma = 1.0, mu = 1.0, delta3s = 0.0;
  double rho = 0.0;
  double b = 0.0;
  double b1 = 0.0, b2 = 0.0;
  double b5 = 0.0, b6 = 0.0, b7 = 0.0, b8 = 0.0, b9 = 0.0;
  double lambda1 = 0.0, lambda2 = 0.0;
  double omega1 = 0.0, omega2 = 0.0;
  std::array<double, 7> c{};  // c[0] is c1
  int c_eval_k = 2;
  bool converges = false;
};

TheoryBounds convergence_constants(const TheoryInputs& inputs, int k_for_c = 2);

/// c1..c7 for a given iteration count k (the equal-eigenvalue branch of the
/// theta tables depends on k).
std::array<double, 7> error_coefficients(const TheoryBounds& bounds, int k);

/// Worst-case recovery error after k iterations (k >= 2):
///   (c1 l1^{k-2} + c2 l2^{k-2} + c3 b^k) x0_err
/// + (c4 + c5 l1^{k-2} + c6 l2^{k-2} + c7 b^k) noise_norm.
double recovery_error_bound(const TheoryInputs& inputs, int k, double x0_err,
                            double noise_norm);

/// Iteration count after which the support is identified exactly in the
/// noiseless s-sparse case:
///   ceil((ln(x_min/x0_err) - ln(c1+c2+c3 b^2)) / ln(max(l1,l2,b)) + 3).
int support_identification_bound(double x_min, double x0_err,
                                 const TheoryBounds& bounds);

/// Exact RIP constant of order s by enumerating all C(n,s) supports and
/// taking eigenvalue extremes of each Gram submatrix. Guard: C(n,s) <= 1e6.
double exact_rip_constant(const Matrix& A, int s);

}  // namespace adsparse
