// Acceptance suite: end-to-end checks of the library against its committed
// tolerances. Prints one PASS/FAIL line per criterion and exits nonzero if
// any criterion fails. Criterion 6 is the desk-scale benchmark table and
// dominates the runtime.

#include "adsparse/admm.hpp"
#include "adsparse/experiments.hpp"
#include "adsparse/solvers.hpp"
#include "adsparse/theory.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace adsparse;

namespace {

int g_threads = 1;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (ok) return;
    pass = false;
    if (detail.size() > 600) return;  // keep the line readable
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

std::string fmt(const char* pattern, ...) {
  va_list args;
  va_start(args, pattern);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Split-variable iterates vs the history-only update, 50 instances x 3
//    parameter triples, 8 iterations, deviation <= 1e-8 on non-flagged runs,
//    flagged runs <= 5%.
Outcome criterion1() {
  Outcome out;
  const AdmmParams triples[] = {{1.0, 1.0, 1.0}, {0.5, 2.0, 0.3}, {2.0, 0.5, 1.0}};
  int flagged = 0;
  int total = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    auto problem = make_instance(10, 30, 3, SignalKind::Gaussian, 1 + static_cast<uint64_t>(i));
    problem.b *= 1.5;  // keep a good share of the runs above the threshold
    *problem.truth *= 1.5;
    for (const auto& params : triples) {
      ++total;
      const auto report = check_unrolled_equivalence(problem, params, Vector::Zero(30), 8);
      if (report.inconclusive()) {
        ++flagged;
        continue;
      }
      worst = std::max(worst, report.max_deviation);
      out.require(report.max_deviation <= 1e-8,
                  fmt("deviation %.3e > 1e-8 on instance %d", report.max_deviation, i));
    }
  }
  out.require(flagged * 20 <= total, fmt("%d/%d runs flagged (> 5%%)", flagged, total));
  if (out.pass) out.detail = fmt("max deviation %.3e, %d/%d flagged", worst, flagged, total);
  return out;
}

// ---------------------------------------------------------------------------
// 2. u/v recursion vs the explicit history sums, 30 iterations, 20 instances,
//    gamma in {0.1, 0.5, 1, 2}, deviation <= 1e-10.
Outcome criterion2() {
  Outcome out;
  double worst = 0.0;
  for (double gamma : {0.1, 0.5, 1.0, 2.0}) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto p = make_instance(10, 30, 3, SignalKind::Gaussian,
                                   100 + static_cast<uint64_t>(rep));
      SolverConfig c;
      c.algorithm = Algorithm::Iad;
      c.s = 3;
      c.mu = 0.5;
      c.gamma = gamma;
      IterState st = solver_init(p, c);
      std::vector<Vector> xs = {Vector::Zero(30), st.x};
      for (int k = 1; k <= 30; ++k) {
        const Vector expected = hard_threshold_top_s(
            oracle::history_sum_argument(p.A, p.b, c.mu, gamma, xs, k), c.s);
        st = solver_step(p, st, c);
        xs.push_back(st.x);
        const double dev = (st.x - expected).lpNorm<Eigen::Infinity>();
        worst = std::max(worst, dev);
        out.require(dev <= 1e-10,
                    fmt("deviation %.3e > 1e-10 (gamma=%g, rep=%d, k=%d)", dev, gamma, rep, k));
      }
    }
  }
  if (out.pass) out.detail = fmt("max deviation %.3e", worst);
  return out;
}

// ---------------------------------------------------------------------------
// 3. With u, v frozen at zero, the paired variants reproduce the baselines
//    bit for bit over 20 iterations on 10 instances.
Outcome criterion3() {
  Outcome out;
  const std::pair<Algorithm, Algorithm> pairs[] = {
      {Algorithm::Iad, Algorithm::Iht},
      {Algorithm::Niad, Algorithm::Niht},
      {Algorithm::Adp, Algorithm::Htp},
  };
  for (int rep = 0; rep < 10; ++rep) {
    const auto p = make_instance(12, 36, 3, SignalKind::Gaussian, 200 + static_cast<uint64_t>(rep));
    for (const auto& [ad, base] : pairs) {
      SolverConfig ca;
      ca.algorithm = ad;
      ca.s = 3;
      ca.mu = 0.6;
      ca.gamma = 0.1;
      ca.force_zero_uv = true;
      SolverConfig cb = ca;
      cb.algorithm = base;
      cb.force_zero_uv = false;

      IterState sa = solver_init(p, ca);
      IterState sb = solver_init(p, cb);
      for (int k = 1; k <= 20; ++k) {
        out.require(oracle::same(sa.x, sb.x),
                    fmt("iterate %d differs (%s vs %s, rep %d)", k, algorithm_name(ad),
                        algorithm_name(base), rep));
        if (!out.pass) return out;
        sa = solver_step(p, sa, ca);
        sb = solver_step(p, sb, cb);
      }
    }
  }
  out.detail = "3 pairs x 10 instances x 20 iterations identical";
  return out;
}

// ---------------------------------------------------------------------------
// 4. Recurrence closed forms: the two-term unroll matches its literal
//    recursion to 1e-12 and the memory envelope tracks equality-driven
//    recursions to 1e-9 without ever falling below, 100 draws each.
Outcome criterion4() {
  Outcome out;
  Rng rng(4001);
  for (int rep = 0; rep < 100; ++rep) {
    const double c1 = 2.0 * rng.next_uniform() - 1.0;
    const double c2 = 2.0 * rng.next_uniform() - 1.0;
    const double c3 = 2.0 * rng.next_uniform() - 1.0;
    const double b1 = 2.0 * rng.next_uniform() - 1.0;
    std::vector<double> a(22);
    for (auto& v : a) v = 2.0 * rng.next_uniform() - 1.0;
    const auto direct = oracle::recursed_two_term(c1, c2, c3, a, b1, 20);
    for (int k = 1; k <= 20; ++k) {
      const double closed = unroll_recurrence(c1, c2, c3, a, b1, k);
      const double ref = direct[static_cast<size_t>(k) + 1];
      out.require(std::abs(closed - ref) <= 1e-12 * std::max(1.0, std::abs(ref)),
                  fmt("two-term unroll off at draw %d, k=%d", rep, k));
    }
  }

  int accepted = 0;
  while (accepted < 100) {
    RecurrenceSpec spec;
    spec.b = 0.05 + 0.9 * rng.next_uniform();
    spec.b1 = 0.9 * rng.next_uniform();
    spec.b2 = rng.next_uniform();
    spec.b3 = 2.0 * rng.next_uniform();
    spec.b4 = rng.next_uniform();
    spec.a1 = 2.0 * rng.next_uniform();
    spec.a2 = 2.0 * rng.next_uniform();
    if ((1.0 - spec.b) * (1.0 - spec.b1) <= spec.b * spec.b2) continue;
    ++accepted;
    const auto direct = oracle::recursed_memory(spec, 30);
    for (int k = 2; k <= 30; ++k) {
      const double bound = recurrence_envelope(spec, k);
      const double value = direct[static_cast<size_t>(k) + 1];
      const double slack = 1e-9 * std::max(1.0, std::abs(value));
      out.require(bound >= value - slack, fmt("envelope below recursion at k=%d", k));
      out.require(std::abs(bound - value) <= slack, fmt("envelope off by >1e-9 at k=%d", k));
    }
  }
  if (out.pass) out.detail = "100 draws per closed form";
  return out;
}

// ---------------------------------------------------------------------------
// 5. Convergence constants: eigenvalues solve the characteristic polynomial
//    to 1e-12, the three convergence criteria agree on 1000 random inputs,
//    and the gamma = 1 boundaries land at 0.224 / 0.5773 within 1e-3.
Outcome criterion5() {
  Outcome out;
  Rng rng(5001);
  const Algorithm algs[] = {Algorithm::Iad, Algorithm::Niad, Algorithm::Adp};
  for (int rep = 0; rep < 1000; ++rep) {
    TheoryInputs in;
    in.algorithm = algs[rep % 3];
    in.delta3s = 0.95 * rng.next_uniform();
    in.mu = 0.2 + 1.6 * rng.next_uniform();
    in.gamma = 0.1 + 2.9 * rng.next_uniform();
    const auto t = convergence_constants(in);
    for (double lam : {t.lambda1, t.lambda2}) {
      const double res = lam * lam - (t.b + t.b1) * lam + t.b * (t.b1 - t.b2);
      out.require(std::abs(res) <= 1e-12 * std::max(1.0, lam * lam),
                  fmt("characteristic residual %.3e at draw %d", res, rep));
    }
    const bool by_rho = t.rho > std::abs(1.0 - in.gamma) / in.gamma;
    const bool by_eig = t.lambda1 < 1.0 && std::abs(t.lambda2) < 1.0 && t.b > 0 && t.b < 1;
    const bool by_bb = (1.0 - t.b) * (1.0 - t.b1) > t.b * t.b2 && t.b > 0 && t.b < 1;
    out.require(by_rho == by_eig && by_eig == by_bb && t.converges == by_rho,
                fmt("criteria disagree at draw %d", rep));
  }

  auto boundary = [](Algorithm alg) {
    double lo = 0.0, hi = 0.999;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      TheoryInputs in;
      in.algorithm = alg;
      in.delta3s = mid;
      in.mu = 1.0;
      in.gamma = 1.0;
      (convergence_constants(in).converges ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double niad_boundary = boundary(Algorithm::Niad);
  const double adp_boundary = boundary(Algorithm::Adp);
  out.require(std::abs(niad_boundary - 0.224) <= 1e-3,
              fmt("normalized boundary %.5f not within 1e-3 of 0.224", niad_boundary));
  out.require(std::abs(adp_boundary - 0.5773) <= 1e-3,
              fmt("pursuit boundary %.5f not within 1e-3 of 0.5773", adp_boundary));
  if (out.pass)
    out.detail = fmt("boundaries %.4f / %.4f", niad_boundary, adp_boundary);
  return out;
}

// ---------------------------------------------------------------------------
// 6. Desk-scale benchmark table: m=200, n=1000, gamma=0.1, 100 trials per s,
//    both signal kinds. The paired variants must strictly beat their
//    baselines in 0.99-rate critical sparsity, and every measured value must
//    land within +/-5 of the 1000-trial reference figures.
Outcome criterion6() {
  Outcome out;
  struct Entry {
    const char* tag;
    int cars;
    int gaussian;
  };
  const Entry reference[] = {
      {"iht:1", 10, 7},   {"iad:1", 23, 20},  {"iht:0.333333", 10, 24},
      {"iad:0.333333", 36, 52}, {"niht", 28, 45}, {"niad", 38, 61},
      {"htp", 29, 45},    {"adp", 38, 66},
  };

  std::map<std::string, std::map<int, int>> measured;  // tag -> kind -> critical
  for (int kind_idx = 0; kind_idx < 2; ++kind_idx) {
    const SignalKind kind = kind_idx == 0 ? SignalKind::Cars : SignalKind::Gaussian;
    const int s_cap = kind == SignalKind::Cars ? 60 : 100;
    for (const auto& entry : reference) {
      ExperimentSpec spec;
      spec.m = 200;
      spec.n = 1000;
      spec.s_min = 1;
      spec.s_max = s_cap;
      spec.signal = kind;
      spec.trials_per_s = 100;
      spec.gamma = 0.1;
      spec.master_seed = 42;
      const auto algo = parse_algorithm_tag(entry.tag, spec.gamma);

      // Prefix-based critical: once a level misses the 0.99 rate the value
      // is decided, so the sweep stops there.
      int critical = 0;
      for (int s = 1; s <= s_cap; ++s) {
        const CurvePoint point = measure_point(spec, algo, s, g_threads);
        std::fprintf(stderr, "  [table] %s %s s=%d rate=%.2f\n",
                     signal_kind_name(kind), entry.tag, s, point.rate());
        if (point.successes * 100 < 99 * point.trials) break;
        critical = s;
      }
      measured[entry.tag][kind_idx] = critical;
      const int expected = kind == SignalKind::Cars ? entry.cars : entry.gaussian;
      out.require(std::abs(critical - expected) <= 5,
                  fmt("%s %s critical %d not within 5 of %d", entry.tag,
                      signal_kind_name(kind), critical, expected));
    }
  }

  const std::pair<const char*, const char*> order_pairs[] = {
      {"iht:1", "iad:1"},
      {"iht:0.333333", "iad:0.333333"},
      {"niht", "niad"},
      {"htp", "adp"},
  };
  for (int kind_idx = 0; kind_idx < 2; ++kind_idx)
    for (const auto& [base, ad] : order_pairs)
      out.require(measured[ad][kind_idx] > measured[base][kind_idx],
                  fmt("%s (%d) does not beat %s (%d) on %s", ad, measured[ad][kind_idx],
                      base, measured[base][kind_idx], kind_idx == 0 ? "cars" : "gaussian"));

  std::string table = "criticals";
  for (const auto& entry : reference)
    table += fmt(" %s=%d/%d", entry.tag, measured[entry.tag][0], measured[entry.tag][1]);
  if (out.pass) out.detail = table;
  else out.detail += " | " + table;
  return out;
}

// ---------------------------------------------------------------------------
// 7. Exact RIP brute force: duplicated unit column gives delta_2 = 1,
//    orthonormal columns give 0, and the constant is monotone in the order.
Outcome criterion7() {
  Outcome out;
  Matrix dup(3, 2);
  dup.col(0) << 1.0, 0.0, 0.0;
  dup.col(1) = dup.col(0);
  out.require(std::abs(exact_rip_constant(dup, 2) - 1.0) <= 1e-12, "duplicated column != 1");

  Matrix ortho = Matrix::Zero(7, 4);
  for (int j = 0; j < 4; ++j) ortho(j, j) = 1.0;
  for (int s = 1; s <= 4; ++s)
    out.require(exact_rip_constant(ortho, s) <= 1e-12, "orthonormal columns != 0");

  for (int rep = 0; rep < 20; ++rep) {
    const Matrix A = gen_gaussian_matrix(8, 12, 700 + static_cast<uint64_t>(rep));
    double prev = 0.0;
    for (int s = 1; s <= 4; ++s) {
      const double d = exact_rip_constant(A, s);
      out.require(d >= prev - 1e-12, fmt("monotonicity broken at rep %d, s=%d", rep, s));
      prev = d;
    }
  }
  if (out.pass) out.detail = "duplicate-column, isometry and monotonicity checks";
  return out;
}

// A 12x12 Hadamard matrix (Paley construction over GF(11)).
Matrix hadamard12() {
  const int q = 11;
  auto chi = [&](int r) {
    r = ((r % q) + q) % q;
    if (r == 0) return 0;
    for (int t = 1; t < q; ++t)
      if ((t * t) % q == r) return 1;
    return -1;
  };
  Matrix S = Matrix::Zero(q + 1, q + 1);
  for (int j = 0; j < q; ++j) S(0, 1 + j) = 1.0;
  for (int i = 0; i < q; ++i) S(1 + i, 0) = -1.0;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) S(1 + i, 1 + j) = chi(i - j);
  return Matrix::Identity(q + 1, q + 1) + S;
}

// ---------------------------------------------------------------------------
// 8. End-to-end guarantee: on a 12x24 spike instance whose brute-forced
//    delta_3 meets the fixed-step hypothesis, support identification happens
//    within the predicted iteration count. Random matrices essentially never
//    meet the hypothesis at this size, so the instance is a two-orthobasis
//    union (identity + scaled Hadamard) with flat cross-coherence.
Outcome criterion8() {
  Outcome out;
  Matrix A(12, 24);
  A.leftCols(12) = Matrix::Identity(12, 12);
  A.rightCols(12) = hadamard12() / std::sqrt(12.0);
  const double delta3 = exact_rip_constant(A, 3);

  TheoryInputs in;
  in.algorithm = Algorithm::Iad;
  in.delta3s = delta3;
  in.mu = 1.0;
  in.gamma = 1.0;
  const auto t = convergence_constants(in);
  out.require(t.converges, fmt("delta3=%.4f misses the hypothesis", delta3));
  out.require(t.c[0] + t.c[1] + t.c[2] * t.b * t.b > 0.0, "nonpositive coefficient sum");
  if (!out.pass) return out;

  int worst_observed = 0;
  int predicted = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    auto [truth, S] = gen_sparse_signal(24, 1, SignalKind::Cars, seed);
    ProblemInstance p;
    p.A = A;
    p.b = A * truth;
    p.truth = truth;
    p.true_support = S;

    // x_min = x0_err = 1 for a unit spike started from zero.
    predicted = support_identification_bound(1.0, 1.0, t);

    SolverConfig c;
    c.algorithm = Algorithm::Iad;
    c.s = 1;
    c.mu = 1.0;
    c.gamma = 1.0;
    int observed = -1;
    IterState st = solver_init(p, c);
    for (int k = 1; k <= std::max(predicted, 3) + 5; ++k) {
      if (support(st.x) == S) {
        observed = k;
        break;
      }
      st = solver_step(p, st, c);
    }
    out.require(observed >= 1, fmt("support never identified (seed %llu)",
                                   static_cast<unsigned long long>(seed)));
    out.require(observed <= predicted,
                fmt("identified at %d > predicted %d (delta3=%.3f)", observed, predicted, delta3));
    worst_observed = std::max(worst_observed, observed);
  }
  if (out.pass)
    out.detail = fmt("delta3=%.4f, worst identification at %d <= predicted %d", delta3,
                     worst_observed, predicted);
  return out;
}

// ---------------------------------------------------------------------------
// 9. The curve command writes byte-identical reports with 1 and 8 worker
//    threads.
Outcome criterion9() {
  Outcome out;
#ifndef ADSPARSE_CLI_PATH
  out.require(false, "CLI path not configured");
  return out;
#else
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "adsparse_acceptance";
  fs::create_directories(dir);
  const std::string base =
      std::string(ADSPARSE_CLI_PATH) +
      " curve --algorithms iad:1,niad,adp --m 40 --n 120 --s-min 1 --s-max 6"
      " --trials 16 --gamma 0.1 --seed 31 --signal gaussian --format csv";
  const std::string out1 = (dir / "t1.csv").string();
  const std::string out8 = (dir / "t8.csv").string();
  const int rc1 = std::system((base + " --threads 1 --out " + out1 + " 2>/dev/null").c_str());
  const int rc8 = std::system((base + " --threads 8 --out " + out8 + " 2>/dev/null").c_str());
  out.require(rc1 == 0 && rc8 == 0, "curve command failed");
  if (!out.pass) return out;

  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string a = slurp(out1);
  const std::string b = slurp(out8);
  out.require(!a.empty() && a == b, "reports differ between 1 and 8 threads");
  if (out.pass) out.detail = fmt("%zu identical bytes", a.size());
  fs::remove_all(dir);
  return out;
#endif
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
  g_threads = [] {
    if (const char* env = std::getenv("ADSPARSE_THREADS")) {
      const int v = std::atoi(env);
      if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
  }();

  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
    double budget_s;  // 0: no runtime requirement
  };
  const Criterion criteria[] = {
      {1, "split-variable vs history-only iterates", criterion1, 5.0},
      {2, "u/v recursion vs explicit history sums", criterion2, 5.0},
      {3, "zeroed memory reduces to the baselines bit-for-bit", criterion3, 0.0},
      {4, "recurrence closed forms vs literal recursions", criterion4, 2.0},
      {5, "convergence constants and criteria agreement", criterion5, 0.0},
      {6, "desk-scale critical-sparsity table", criterion6, 1800.0},
      {7, "exact RIP constants", criterion7, 0.0},
      {8, "support identification within the predicted count", criterion8, 0.0},
      {9, "thread-count independent curve reports", criterion9, 0.0},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && only != c.id) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome = c.run();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && elapsed > c.budget_s) {
      outcome.pass = false;
      outcome.detail = fmt("runtime %.1fs exceeds %.0fs budget; %s", elapsed, c.budget_s,
                           outcome.detail.c_str());
    }
    std::printf("[%s] criterion %d: %s (%.2fs)%s%s\n", outcome.pass ? "PASS" : "FAIL", c.id,
                c.name, elapsed, outcome.detail.empty() ? "" : " -- ",
                outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
