#ifndef DQT_ACCEPTANCE_HPP
#define DQT_ACCEPTANCE_HPP

// The acceptance suite: one verdict per criterion, shared by the CLI
// (`--check`) and the acceptance test binary.

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "dqt/classical.hpp"
#include "dqt/cutoff.hpp"
#include "dqt/recurrence.hpp"
#include "dqt/transfer.hpp"

namespace dqt::acceptance {

struct Result {
  int id;
  std::string title;
  bool passed;
  std::string detail;
};

namespace detail {

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::string num(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(4);
  os << v;
  return os.str();
}

inline Vector random_qubit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector v(2);
  v << complex(g(rng), g(rng)), complex(g(rng), g(rng));
  return v / v.norm();
}

inline Eigen::VectorXd random_distribution(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e;
  Eigen::VectorXd p(static_cast<Eigen::Index>(n));
  for (auto& x : p) x = e(rng);
  return p / p.sum();
}

// Least-squares slope of y against x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  return sxy / sxx;
}

}  // namespace detail

/// 1: symmetrized quantum evolution of the initializer equals the classical chain.
inline Result criterion_1(std::uint64_t seed = 1) {
  detail::Stopwatch sw;
  std::mt19937_64 rng(seed);
  const double omega = 1.0, Gamma = 2.0;
  double worst = 0;
  for (std::size_t M : {2, 3, 4}) {
    const auto L = build_initializer({M, omega, Gamma});
    const auto gen = initializer_generator(M, omega, Gamma);
    const auto reg = initializer_register(M);
    for (int trial = 0; trial < 3; ++trial) {
      const auto p = detail::random_distribution(reg.dim(), rng);
      const DensityMatrix rho0(reg, p.cast<complex>().asDiagonal().toDenseMatrix());
      const auto s0 = symmetrize(rho0);
      for (double t : {0.1, 1.0, 10.0}) {
        const auto q = symmetrize(evolve(L, rho0, t / omega));
        const auto c = evolve_classical(gen, s0, t / omega);
        worst = std::max(worst, total_variation(q.p, c.p));
      }
    }
  }
  const double secs = sw.seconds();
  return {1, "classical reduction matches symmetrized quantum evolution", worst <= 1e-8 && secs < 60,
          "max TV " + detail::num(worst) + " (limit 1e-8), " + detail::num(secs) + " s (limit 60)"};
}

/// 2: overlap closed form against dense evolution and against the f^k_m(0) series.
inline Result criterion_2() {
  const double omega = 1.0, Gamma = 2.0;
  double worst_rel = 0;
  for (std::size_t k : {1, 2, 3}) {
    const auto L = build_initializer({k, omega, Gamma});
    std::vector<int> bits(k + 1, 1);
    const auto rho0 = DensityMatrix::basis(initializer_register(k), bits);
    for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
      const double q = evolve(L, rho0, t).population(std::size_t{1} << k);  // |1_c 0..0>
      const double f = overlap_formula(k, t, omega, Gamma);
      worst_rel = std::max(worst_rel, std::abs(q - f) / f);
    }
  }
  double worst_series = 0;
  for (std::size_t k = 0; k <= 10; ++k)
    for (double gt : {0.1, 0.5, 1.0}) {
      const double s = overlap_series(k, gt).value;
      worst_series = std::max(worst_series, std::abs(s - overlap_formula(k, gt, 1.0, 1.0)));
    }
  return {2, "initializer overlap closed form", worst_rel <= 1e-8 && worst_series <= 1e-10,
          "max rel err vs dense " + detail::num(worst_rel) + " (limit 1e-8), max series err " + detail::num(worst_series) +
              " (limit 1e-10)"};
}

/// 3: timer occupation equals quantum evolution and the regularized gamma P(N-1, t gamma).
inline Result criterion_3() {
  const double gamma = 1.0;
  double worst_q = 0;
  for (std::size_t N = 2; N <= 6; ++N) {
    const auto L = build_timer({N, gamma});
    const auto rho0 = timer_initial_state(N);
    const std::vector<std::string> keep{"t" + std::to_string(N)};
    for (double t : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      const double q = partial_trace(evolve(L, rho0, t), keep).population(0);
      worst_q = std::max(worst_q, std::abs(q - timer_occupation(N, t, gamma)));
    }
  }
  double worst_g = 0;
  for (std::size_t N : {10, 100, 1000, 10000, 100000}) {
    const double n = static_cast<double>(N);
    for (double x : {0.5 * n, n - 1.0 - std::sqrt(n), n - 1.0, n + std::sqrt(n), 1.5 * n}) {
      const double ref = boost::math::gamma_p(n - 1.0, x);
      worst_g = std::max(worst_g, std::abs(timer_occupation(N, x / gamma, gamma) - ref));
    }
  }
  return {3, "timer occupation equality", worst_q <= 1e-10 && worst_g <= 1e-12,
          "max err vs quantum " + detail::num(worst_q) + " (limit 1e-10), vs P(N-1,t gamma) " + detail::num(worst_g) +
              " (limit 1e-12)"};
}

/// 4: sup remainder of the cutoff profile shrinks by a factor in [1/3, 1] per N -> 4N.
inline Result criterion_4() {
  const auto grid = linear_grid(-3.0, 3.0, 0.01);
  std::vector<double> sup;
  for (std::size_t N : {64, 256, 1024, 4096}) sup.push_back(cutoff_profile(N, 1.0, grid).sup_remainder);
  bool ok = true;
  std::string d = "ratios";
  for (std::size_t i = 0; i + 1 < sup.size(); ++i) {
    const double r = sup[i + 1] / sup[i];
    ok = ok && r >= 1.0 / 3 && r <= 1.0;
    d += " " + detail::num(r);
  }
  return {4, "cutoff profile remainder scaling", ok, d + " (range [1/3, 1])"};
}

/// 5: sharp threshold at N = 4096.
inline Result criterion_5() {
  const double lo = sharp_threshold(0.8, 4096, 1.0), hi = sharp_threshold(1.25, 4096, 1.0);
  return {5, "sharp threshold", lo < 1e-6 && hi > 1 - 1e-6,
          "c=0.8: " + detail::num(lo) + " (< 1e-6), c=1.25: 1-" + detail::num(1 - hi) + " (> 1-1e-6)"};
}

/// 6: concatenation tails certified with degree <= 2, and total mis-trigger.
inline Result criterion_6() {
  bool ok = true;
  int max_deg = 0;
  for (std::size_t N : {100, 400, 1600})
    for (std::size_t l = 1; l <= 20; ++l) {
      const auto e = concatenation_error(l, N, 1.0);
      if (e.early_degree < 0 || e.late_degree < 0) ok = false;
      max_deg = std::max({max_deg, e.early_degree, e.late_degree});
    }
  const double total = total_mistrigger({10, 10000, 1.0});
  return {6, "concatenation tail bounds", ok && total < 1e-6,
          std::string(ok ? "all tails certified" : "uncertified tail") + ", max degree " + std::to_string(max_deg) +
              ", total mis-trigger " + detail::num(total) + " (< 1e-6)"};
}

/// 7: initialization certificate on worst-case product inputs and logarithmic equilibration time.
inline Result criterion_7() {
  const double omega = 1.0, Gamma = 3.0, delta = 0.5, c = 0.5;
  bool ok = true;
  std::string d;
  std::vector<double> taus;
  for (std::size_t M : {10, 100, 1000}) {
    const InitializerConfig cfg{M, omega, Gamma};
    const double t = std::log(3.0 * static_cast<double>(M) * 1e6) / omega;
    const auto cert = theorem1_certificate(cfg, delta, c, t);
    const auto m_c = static_cast<std::size_t>(std::llround(c * static_cast<double>(M)));
    std::vector<double> q(M, 0.0);
    for (std::size_t j = 0; j < m_c; ++j) q[j] = delta;
    const auto s0 = product_input(q);
    const auto gen = initializer_generator(M, omega, Gamma);
    const auto limit = initializer_limit(s0, omega, Gamma);
    // Step along a grid of width 0.25/omega, recording the first time within 1e-6 of the limit.
    const double dt = 0.25 / omega;
    auto s = s0;
    double tau = -1, elapsed = 0;
    while (elapsed + 1e-12 < t) {
      const double h = std::min(dt, t - elapsed);
      s = evolve_classical(gen, s, h);
      elapsed += h;
      if (tau < 0 && total_variation(s.p, limit.p) <= 1e-6) tau = elapsed;
    }
    const double sim = s.central(1);
    ok = ok && sim <= cert.bound && tau > 0;
    taus.push_back(tau);
    d += "M=" + std::to_string(M) + ": " + detail::num(sim) + " <= " + detail::num(cert.bound) + ", tau " + detail::num(tau) + "; ";
  }
  const double ratio = taus.back() / taus.front();
  ok = ok && ratio <= 6.0;
  return {7, "initialization certificate", ok, d + "tau ratio " + detail::num(ratio) + " (<= 6)"};
}

/// 8: truncated-normal overlap below its analytic bound, with the predicted decay rate.
inline Result criterion_8() {
  // xi = e^16 keeps every grid point in the z2 <= 0 regime, where the bound's
  // exponent -alpha^2/(2 beta) is the decay rate.
  const double omega = 1.0, Gamma = std::expm1(16.0);
  bool ok = true;
  double worst_slope = 0;
  for (double alpha : {0.25, 0.5, 0.75})
    for (double beta : {0.1, 0.5}) {
      std::vector<double> ns, logs;
      for (std::size_t N : {50, 100, 200}) {
        const auto r = truncated_normal_overlap(N, alpha, beta, omega, Gamma);
        ok = ok && r.log_numeric <= r.log_bound;
        ns.push_back(static_cast<double>(N));
        logs.push_back(r.log_numeric);
      }
      const double expect = -alpha * alpha / (2 * beta);
      worst_slope = std::max(worst_slope, std::abs(detail::slope(ns, logs) / expect - 1));
    }
  ok = ok && worst_slope <= 0.1;
  return {8, "truncated-normal input bound", ok,
          std::string(ok ? "numeric <= bound everywhere" : "check failed") + ", worst relative slope error " +
              detail::num(worst_slope) + " (<= 0.1)"};
}

/// 9: imperfect initialization shift and its second-order residual.
inline Result criterion_9() {
  const std::size_t N = 8;
  const auto a = imperfect_init_shift(N, 1e-3, 8.0, 1.0), b = imperfect_init_shift(N, 1e-4, 8.0, 1.0);
  const double n = static_cast<double>(N);
  auto bound = [&](double e) { return n * e + 10 * e * e * n * n; };
  const double ratio = a.residual / b.residual;
  const bool ok = std::abs(a.shift) <= bound(1e-3) && std::abs(b.shift) <= bound(1e-4) && ratio >= 50 && ratio <= 200;
  return {9, "imperfect initialization", ok,
          "shifts " + detail::num(a.shift) + ", " + detail::num(b.shift) + "; residual ratio " + detail::num(ratio) +
              " (in [50, 200])"};
}

/// 10: 3-qubit dissipative transfer and the measurement bookkeeping oracle.
inline Result criterion_10(std::uint64_t seed = 10) {
  detail::Stopwatch sw;
  std::mt19937_64 rng(seed);
  double min_fid = 1;
  for (int i = 0; i < 20; ++i) min_fid = std::min(min_fid, run_transfer_3qubit(detail::random_qubit(rng)).fidelity);
  double min_oracle = 1;
  for (std::size_t n : {3, 5})
    for (int trial = 0; trial < 3; ++trial) {
      const auto phi = detail::random_qubit(rng);
      for (std::size_t pattern = 0; pattern < (std::size_t{1} << (n - 1)); ++pattern) {
        std::vector<int> s(n - 1);
        for (std::size_t j = 0; j + 1 < n; ++j) s[j] = static_cast<int>((pattern >> j) & 1U);
        min_oracle = std::min(min_oracle, std::norm(phi.dot(bookkeeping_oracle(phi, n, s))));
      }
    }
  const double secs = sw.seconds();
  const bool ok = min_fid >= 1 - 1e-6 && min_oracle >= 1 - 1e-12 && secs < 300;
  return {10, "dissipative state transfer", ok,
          "min fidelity 1-" + detail::num(1 - min_fid) + " (>= 1-1e-6), oracle 1-" + detail::num(1 - min_oracle) + ", " +
              detail::num(secs) + " s (limit 300)"};
}

/// 11: timer-triggered single stage (amplitude damping of |1>) with an N = 2 timer.
inline Result criterion_11() {
  const double omega = 1.0, gamma = omega / 50;
  QubitRegister reg({"p"});
  Liouvillian damp(reg);
  damp.add({reg, {"p"}, std::sqrt(omega) * qubit::flip(0, 1), "damp"});
  const std::vector<Stage> stages{{"damp", damp}};
  const auto rho0 = DensityMatrix::basis(reg, std::vector<int>{1});
  const double early = trace_distance(run_timer_triggered(stages, {2}, gamma, rho0, 0.2 / gamma), rho0);
  const double late =
      trace_distance(run_timer_triggered(stages, {2}, gamma, rho0, 5.0 / gamma), run_sequential(stages, rho0).rho);
  return {11, "timer-triggered composite", early <= 0.05 && late <= 0.05,
          "change before 0.2/gamma " + detail::num(early) + " (<= 0.05), mismatch at 5/gamma " + detail::num(late) +
              " (<= 0.05)"};
}

inline std::vector<std::function<Result()>> criteria() {
  return {[] { return criterion_1(); }, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
          criterion_7, criterion_8, criterion_9, [] { return criterion_10(); }, criterion_11};
}

}  // namespace dqt::acceptance

#endif  // DQT_ACCEPTANCE_HPP
