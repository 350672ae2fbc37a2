#include "adsparse/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace adsparse {

IndexSet::IndexSet(std::vector<int> idx, int n) : indices(std::move(idx)), universe(n) {
  std::sort(indices.begin(), indices.end());
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end())
    throw std::invalid_argument("IndexSet: duplicate index");
  if (!indices.empty() && (indices.front() < 0 || indices.back() >= n))
    throw std::invalid_argument("IndexSet: index out of range");
}

bool IndexSet::contains(int i) const {
  return std::binary_search(indices.begin(), indices.end(), i);
}

void ProblemInstance::validate() const {
  if (A.rows() < 1 || A.cols() < 1) throw std::invalid_argument("problem: empty matrix");
  if (b.size() != A.rows()) throw std::invalid_argument("problem: b size != rows(A)");
  if (!A.allFinite() || !b.allFinite()) throw std::invalid_argument("problem: non-finite data");
  if (truth && truth->size() != A.cols())
    throw std::invalid_argument("problem: truth size != cols(A)");
  if (noise && noise->size() != A.rows())
    throw std::invalid_argument("problem: noise size != rows(A)");
  if (true_support && true_support->universe != static_cast<int>(A.cols()))
    throw std::invalid_argument("problem: support universe != cols(A)");
  if (truth && true_support && !(support(*truth) == *true_support))
    throw std::invalid_argument("problem: true_support != support(truth)");
}

Vector hard_threshold_by_value(const Vector& x, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("hard threshold: tau must be >= 0");
  Vector out = Vector::Zero(x.size());
  for (Index i = 0; i < x.size(); ++i)
    if (std::abs(x[i]) > tau) out[i] = x[i];
  return out;
}

Vector hard_threshold_top_s(const Vector& x, Index s) {
  const Index n = x.size();
  if (s < 0 || s > n) throw std::invalid_argument("hard threshold: s out of range");
  if (!x.allFinite()) throw NonFiniteError("hard threshold: non-finite input");
  if (s == 0) return Vector::Zero(n);
  if (s == n) return x;

  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  // Total order: magnitude descending, index ascending on ties.
  auto before = [&x](Index a, Index b) {
    const double ma = std::abs(x[a]), mb = std::abs(x[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  };
  std::nth_element(order.begin(), order.begin() + s, order.end(), before);

  Vector out = Vector::Zero(n);
  for (Index i = 0; i < s; ++i) out[order[static_cast<size_t>(i)]] = x[order[static_cast<size_t>(i)]];
  return out;
}

IndexSet support(const Vector& x) {
  std::vector<int> idx;
  for (Index i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) idx.push_back(static_cast<int>(i));
  return IndexSet(std::move(idx), static_cast<int>(x.size()));
}

Vector residual(const Matrix& A, const Vector& x, const Vector& b) {
  if (x.size() != A.cols() || b.size() != A.rows())
    throw std::invalid_argument("residual: dimension mismatch");
  return b - A * x;
}

Vector gradient(const Matrix& A, const Vector& x, const Vector& b) {
  if (x.size() != A.cols() || b.size() != A.rows())
    throw std::invalid_argument("gradient: dimension mismatch");
  return A.transpose() * (A * x - b);
}

Vector least_squares_on_support(const Matrix& A, const Vector& b, const IndexSet& S) {
  if (b.size() != A.rows()) throw std::invalid_argument("least squares: dimension mismatch");
  if (S.universe != static_cast<int>(A.cols()))
    throw std::invalid_argument("least squares: support universe != cols(A)");
  const Index m = A.rows();
  const Index t = static_cast<Index>(S.size());
  if (t == 0) return Vector::Zero(A.cols());

  Matrix As(m, t);
  for (Index j = 0; j < t; ++j) As.col(j) = A.col(S.indices[static_cast<size_t>(j)]);

  Eigen::ColPivHouseholderQR<Matrix> qr(As);
  bool deficient = t > m;
  if (!deficient) {
    const double d0 = std::abs(qr.matrixQR()(0, 0));
    if (d0 == 0.0) deficient = true;
    for (Index j = 1; !deficient && j < t; ++j)
      if (std::abs(qr.matrixQR()(j, j)) <= 1e-12 * d0) deficient = true;
  }
  if (deficient) throw SingularSystemError("least squares: rank-deficient support", S);

  const Vector zs = qr.solve(b);
  Vector z = Vector::Zero(A.cols());
  for (Index j = 0; j < t; ++j) z[S.indices[static_cast<size_t>(j)]] = zs[j];
  return z;
}

double norm_sq_on(const Vector& v, const IndexSet& S) {
  if (S.universe != static_cast<int>(v.size()))
    throw std::invalid_argument("norm_sq_on: support universe != vector size");
  double acc = 0.0;
  for (int i : S.indices) acc += v[i] * v[i];
  return acc;
}

Vector masked(const Vector& v, const IndexSet& S) {
  if (S.universe != static_cast<int>(v.size()))
    throw std::invalid_argument("masked: support universe != vector size");
  Vector out = Vector::Zero(v.size());
  for (int i : S.indices) out[i] = v[i];
  return out;
}

Vector matvec_on_support(const Matrix& A, const Vector& x, const IndexSet& S) {
  if (S.universe != static_cast<int>(A.cols()) || x.size() != A.cols())
    throw std::invalid_argument("matvec_on_support: dimension mismatch");
  Vector out = Vector::Zero(A.rows());
  for (int j : S.indices) out += x[j] * A.col(j);
  return out;
}

}  // namespace adsparse
