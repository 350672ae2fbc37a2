#include "adsparse/theory.hpp"

#include <cmath>

namespace adsparse {

namespace {

constexpr double kEqualRootTol = 1e-12;
constexpr double kSqrt3 = 1.7320508075688772;

struct Spectrum {
  double lambda1, lambda2, omega1, omega2;
};

Spectrum spectrum_of(double b, double b1, double b2) {
  const double disc = (b - b1) * (b - b1) + 4.0 * b * b2;
  if (disc == 0.0)
    throw DegenerateSpectrumError("recurrence matrix has a double eigenvalue");
  const double root = std::sqrt(disc);
  Spectrum sp;
  sp.lambda1 = 0.5 * ((b + b1) + root);
  sp.lambda2 = 0.5 * ((b + b1) - root);
  sp.omega1 = (-b * b1 + b1 * b1 + 2.0 * b * b2) / (2.0 * root);
  sp.omega2 = (b + b1) * b2 / (2.0 * root);
  return sp;
}

double pow_i(double base, int e) { return std::pow(base, static_cast<double>(e)); }

}  // namespace

double unroll_recurrence(double c1, double c2, double c3,
                         const std::vector<double>& a, double b1, int k) {
  if (k < 1) throw std::invalid_argument("unroll: k must be >= 1");
  if (a.size() < static_cast<size_t>(k) + 1)
    throw std::invalid_argument("unroll: need a(0)..a(k)");
  double value = pow_i(c1, k) * b1 + c2 * a[static_cast<size_t>(k)];
  for (int i = 1; i <= k - 1; ++i)
    value += (c1 * c2 + c3) * pow_i(c1, k - 1 - i) * a[static_cast<size_t>(i)];
  value += pow_i(c1, k - 1) * c3 * a[0];
  return value;
}

void RecurrenceSpec::validate() const {
  for (double v : {b, b1, b2, b3, b4, a1, a2})
    if (!(v >= 0.0)) throw std::invalid_argument("recurrence: coefficients must be >= 0");
}

double geometric_sum_ratio(double lambda, double b, int k) {
  if (std::abs(lambda - b) <= kEqualRootTol)
    return static_cast<double>(k - 2) * pow_i(lambda, k - 3);
  return (pow_i(lambda, k - 2) - pow_i(b, k - 2)) / (lambda - b);
}

ThetaCoeffs geometric_sum_split(double lambda, double b, int k) {
  if (std::abs(lambda - b) <= kEqualRootTol)
    return {static_cast<double>(k - 2) / lambda, 0.0};
  return {1.0 / (lambda - b), -1.0 / (lambda - b)};
}

double recurrence_envelope(const RecurrenceSpec& spec, int k) {
  spec.validate();
  if (k < 2) throw std::invalid_argument("recurrence envelope: k must be >= 2");
  const auto sp = spectrum_of(spec.b, spec.b1, spec.b2);
  const double p1 = sp.omega1 + 0.5 * spec.b1;
  const double m1 = sp.omega1 - 0.5 * spec.b1;
  const double p2 = sp.omega2 + 0.5 * spec.b2;
  const double m2 = sp.omega2 - 0.5 * spec.b2;
  const double l1k = pow_i(sp.lambda1, k - 2);
  const double l2k = pow_i(sp.lambda2, k - 2);

  // The a(1) group carries the geometric weight b^{2-1} of its memory term.
  double bound = (p1 * l1k - m1 * l2k) * spec.a2;
  bound += spec.b * (p2 * l1k - m2 * l2k) * spec.a1;
  bound += (pow_i(spec.b, k - 2) + p1 * geometric_sum_ratio(sp.lambda1, spec.b, k) -
            m1 * geometric_sum_ratio(sp.lambda2, spec.b, k)) *
           spec.b3 * spec.b * spec.b;
  bound += (1.0 + p1 * (1.0 - l1k) / (1.0 - sp.lambda1) -
            m1 * (1.0 - l2k) / (1.0 - sp.lambda2)) *
           spec.b4;
  return bound;
}

void TheoryInputs::validate() const {
  if (!uses_direction_memory(algorithm))
    throw std::invalid_argument("theory: algorithm must be iad, niad or adp");
  if (!(delta3s >= 0.0 && delta3s < 1.0))
    throw std::invalid_argument("theory: delta3s must be in [0, 1)");
  if (!(gamma > 0.0)) throw std::invalid_argument("theory: gamma must be positive");
  if (algorithm == Algorithm::Iad && !(mu > 0.0))
    throw std::invalid_argument("theory: mu must be positive");
}

TheoryBounds convergence_constants(const TheoryInputs& inputs, int k_for_c) {
  inputs.validate();
  const double d = inputs.delta3s;
  const double gamma = inputs.gamma;
  const double mu = inputs.mu;

  TheoryBounds out;
  out.algorithm = inputs.algorithm;
  out.gamma = gamma;
  out.mu = mu;
  out.delta3s = d;
  out.b = 1.0 / (1.0 + gamma);

  switch (inputs.algorithm) {
    case Algorithm::Iad:
      out.b1 = kSqrt3 * (std::abs(1.0 - mu) + mu * d);
      out.b2 = kSqrt3 * mu * std::abs(1.0 - gamma) * (1.0 + d) / 2.0;
      out.rho = 2.0 * (1.0 - out.b1) / (kSqrt3 * mu * (1.0 + d));
      out.b5 = kSqrt3 * mu * gamma * (1.0 + d);
      out.b6 = mu * std::sqrt(3.0 * (1.0 + d)) / (1.0 + gamma);
      out.b7 = mu * std::sqrt(3.0 * (1.0 + d));
      out.b8 = kSqrt3 * (std::abs(0.5 * mu - 1.0) + 0.5 * mu * d);
      out.b9 = 0.5 * mu * std::sqrt(3.0 * (1.0 + d));
      break;
    case Algorithm::Niad:
      out.b1 = 2.0 * kSqrt3 * d / (1.0 - d);
      out.b2 = kSqrt3 * std::abs(1.0 - gamma) * (1.0 + d) / (2.0 * (1.0 - d));
      // Margin consistent with (1-b)(1-b1) > b b2.
      out.rho = 2.0 * (1.0 - (2.0 * kSqrt3 + 1.0) * d) / (kSqrt3 * (1.0 + d));
      out.b5 = kSqrt3 * gamma * (1.0 + d) / (1.0 - d);
      out.b6 = std::sqrt(3.0 * (1.0 + d)) / ((1.0 + gamma) * (1.0 - d));
      out.b7 = std::sqrt(3.0 * (1.0 + d)) / (1.0 - d);
      out.b8 = kSqrt3 * (1.0 + 3.0 * d) / (2.0 * (1.0 + d));
      out.b9 = std::sqrt(3.0 * (1.0 + d)) / (2.0 * (1.0 - d));
      break;
    case Algorithm::Adp:
      out.b1 = std::sqrt(2.0 * d * d / (1.0 - d * d));
      out.b2 = std::abs(1.0 - gamma) * std::sqrt((1.0 + d) / (2.0 * (1.0 - d)));
      out.rho = std::sqrt(2.0) * (std::sqrt(1.0 - d * d) - std::sqrt(2.0) * d) / (1.0 + d);
      out.b5 = gamma * std::sqrt(2.0 * (1.0 + d) / (1.0 - d));
      out.b6 = std::sqrt(2.0 / (1.0 - d)) / (1.0 + gamma);
      out.b7 = std::sqrt(1.0 + d) / (1.0 - d) + std::sqrt(2.0 / (1.0 - d));
      out.b8 = std::sqrt(2.0 * d * d / (1.0 - d * d));
      out.b9 = 1.0 / std::sqrt(2.0 * (1.0 - d)) + std::sqrt(1.0 + d) / (1.0 - d);
      break;
    default:
      throw std::invalid_argument("theory: unsupported algorithm");
  }

  const auto sp = spectrum_of(out.b, out.b1, out.b2);
  out.lambda1 = sp.lambda1;
  out.lambda2 = sp.lambda2;
  out.omega1 = sp.omega1;
  out.omega2 = sp.omega2;
  out.converges = out.rho > std::abs(1.0 - gamma) / gamma;
  out.c_eval_k = k_for_c;
  out.c = error_coefficients(out, k_for_c);
  return out;
}

std::array<double, 7> error_coefficients(const TheoryBounds& t, int k) {
  const double p1 = t.omega1 + 0.5 * t.b1;
  const double m1 = t.omega1 - 0.5 * t.b1;
  const double p2 = t.omega2 + 0.5 * t.b2;
  const double m2 = t.omega2 - 0.5 * t.b2;
  const auto th1 = geometric_sum_split(t.lambda1, t.b, k);
  const auto th2 = geometric_sum_split(t.lambda2, t.b, k);
  const double b = t.b;

  std::array<double, 7> c{};
  c[0] = (t.b1 * t.b8 + b * t.b5) * p1 + b * t.b8 * p2 + b * b * t.b5 * p1 * th1.on_lambda;
  c[1] = -(t.b1 * t.b8 + b * t.b5) * m1 - b * t.b8 * m2 - b * b * t.b5 * m1 * th2.on_lambda;
  c[2] = (1.0 + p1 * th1.on_pow_b - m1 * th2.on_pow_b) * t.b5;
  c[3] = (1.0 + p1 / (1.0 - t.lambda1) - m1 / (1.0 - t.lambda2)) * t.b7;
  c[4] = (t.b1 * t.b9 - b * t.b6 + t.b7) * p1 + b * t.b9 * p2 -
         b * b * t.b6 * p1 * th1.on_lambda - t.b7 * p1 / (1.0 - t.lambda1);
  c[5] = -(t.b1 * t.b9 - b * t.b6 + t.b7) * m1 - b * t.b9 * m2 +
         b * b * t.b6 * m1 * th2.on_lambda + t.b7 * m1 / (1.0 - t.lambda2);
  c[6] = -(1.0 + p1 * th1.on_pow_b - m1 * th2.on_pow_b) * t.b6;
  return c;
}

double recovery_error_bound(const TheoryInputs& inputs, int k, double x0_err,
                            double noise_norm) {
  if (k < 2) throw std::invalid_argument("error bound: k must be >= 2");
  const TheoryBounds t = convergence_constants(inputs, k);
  if (!t.converges) throw std::invalid_argument("error bound: inputs do not converge");
  const double l1k = pow_i(t.lambda1, k - 2);
  const double l2k = pow_i(t.lambda2, k - 2);
  const double bk = pow_i(t.b, k);
  return (t.c[0] * l1k + t.c[1] * l2k + t.c[2] * bk) * x0_err +
         (t.c[3] + t.c[4] * l1k + t.c[5] * l2k + t.c[6] * bk) * noise_norm;
}

int support_identification_bound(double x_min, double x0_err, const TheoryBounds& t) {
  if (!(x_min > 0.0) || !(x0_err > 0.0))
    throw std::invalid_argument("support bound: x_min and x0_err must be positive");
  if (!t.converges) throw std::invalid_argument("support bound: inputs do not converge");
  const double csum = t.c[0] + t.c[1] + t.c[2] * t.b * t.b;
  if (!(csum > 0.0)) throw std::invalid_argument("support bound: c1+c2+c3 b^2 must be positive");
  const double lam = std::max({t.lambda1, t.lambda2, t.b});
  if (!(lam < 1.0)) throw std::invalid_argument("support bound: spectral radius must be < 1");
  return static_cast<int>(
      std::ceil((std::log(x_min / x0_err) - std::log(csum)) / std::log(lam) + 3.0));
}

double exact_rip_constant(const Matrix& A, int s) {
  const int n = static_cast<int>(A.cols());
  if (s < 1 || s > n) throw std::invalid_argument("rip: s out of range");

  double combos = 1.0;
  for (int i = 0; i < s; ++i) combos = combos * (n - i) / (i + 1);
  if (combos > 1e6) throw std::length_error("rip: C(n, s) exceeds enumeration guard");

  std::vector<int> T(static_cast<size_t>(s));
  for (int i = 0; i < s; ++i) T[static_cast<size_t>(i)] = i;

  double delta = 0.0;
  Matrix sub(A.rows(), s);
  while (true) {
    for (int j = 0; j < s; ++j) sub.col(j) = A.col(T[static_cast<size_t>(j)]);
    const Matrix gram = sub.transpose() * sub;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    delta = std::max({delta, eig.eigenvalues().maxCoeff() - 1.0,
                      1.0 - eig.eigenvalues().minCoeff()});

    int i = s - 1;
    while (i >= 0 && T[static_cast<size_t>(i)] == n - s + i) --i;
    if (i < 0) break;
    ++T[static_cast<size_t>(i)];
    for (int j = i + 1; j < s; ++j) T[static_cast<size_t>(j)] = T[static_cast<size_t>(j - 1)] + 1;
  }
  return delta;
}

}  // namespace adsparse
