#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace adsparse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Sorted set of 0-based indices into a vector of length `universe`.
struct IndexSet {
  std::vector<int> indices;
  int universe = 0;

  IndexSet() = default;
  IndexSet(std::vector<int> idx, int n);

  int size() const { return static_cast<int>(indices.size()); }
  bool empty() const { return indices.empty(); }
  bool contains(int i) const;
  bool operator==(const IndexSet&) const = default;
};

/// Thrown when a restricted least-squares system is rank deficient; carries
/// the offending support so callers can report which trial degenerated.
class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& msg, IndexSet s)
      : std::runtime_error(msg), support_(std::move(s)) {}
  const IndexSet& support() const { return support_; }

 private:
  IndexSet support_;
};

/// Thrown when an iterate contains inf/nan (diverging fixed-step runs).
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Measurement model b = A x (+ noise); truth/true_support are optional
/// bookkeeping for recovery experiments.
struct ProblemInstance {
  Matrix A;
  Vector b;
  std::optional<Vector> truth;
  std::optional<IndexSet> true_support;
  std::optional<Vector> noise;

  Index rows() const { return A.rows(); }
  Index cols() const { return A.cols(); }
  void validate() const;
};

/// Zero every entry with |x_i| <= tau; entries strictly larger survive.
Vector hard_threshold_by_value(const Vector& x, double tau);

/// Keep the s largest-magnitude entries, zero the rest. Ties are broken by
/// keeping the lowest index, so the result is deterministic.
Vector hard_threshold_top_s(const Vector& x, Index s);

/// Indices of the exactly-nonzero entries.
IndexSet support(const Vector& x);

/// b - A x
Vector residual(const Matrix& A, const Vector& x, const Vector& b);

/// Gradient of f(x) = 0.5 ||A x - b||^2, i.e. A^T (A x - b).
Vector gradient(const Matrix& A, const Vector& x, const Vector& b);

/// argmin ||b - A z|| over supp(z) in S, solved by column-pivoted QR of A_S.
/// Rank deficiency (relative diagonal tolerance 1e-12) raises
/// SingularSystemError.
Vector least_squares_on_support(const Matrix& A, const Vector& b,
                                const IndexSet& S);

/// sum over S of v_i^2
double norm_sq_on(const Vector& v, const IndexSet& S);

/// Copy of v with entries outside S zeroed.
Vector masked(const Vector& v, const IndexSet& S);

/// A x restricted to the columns in S: sum_{j in S} x_j A_j.
Vector matvec_on_support(const Matrix& A, const Vector& x, const IndexSet& S);

}  // namespace adsparse
