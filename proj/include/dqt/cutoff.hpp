#ifndef DQT_CUTOFF_HPP
#define DQT_CUTOFF_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dqt/classical.hpp"
#include "dqt/special.hpp"

namespace dqt {

// ---------------------------------------------------------------------------
// Cutoff profile of the timer.
// ---------------------------------------------------------------------------

struct CutoffSample {
  double x;
  double t;          // t_N(x) = (N + x sqrt(N)) / gamma, clamped at 0
  double deviation;  // 1 - <0_N| tr_{N-1} e^{tL}(phi_0) |0_N>
  double gaussian;   // 1 - Phi(x)
  double remainder;  // |deviation - gaussian|
};

struct CutoffProfile {
  std::size_t N = 0;
  double gamma = 1.0;
  std::vector<CutoffSample> samples;
  double sup_remainder = 0;      // over samples with |x| <= 3
  double scaled_remainder = 0;   // sqrt(N) * sup_remainder
};

inline double cutoff_time(std::size_t N, double gamma, double x) {
  const double n = static_cast<double>(N);
  return std::max(0.0, (n + x * std::sqrt(n)) / gamma);
}

inline CutoffProfile cutoff_profile(std::size_t N, double gamma, const std::vector<double>& xs) {
  TimerConfig{N, gamma}.validate();
  CutoffProfile p{N, gamma, {}, 0.0, 0.0};
  for (double x : xs) {
    const double t = cutoff_time(N, gamma, x);
    const double dev = special::regularized_gamma_upper(static_cast<double>(N - 1), t * gamma);
    const double g = special::normal_cdf(-x);
    p.samples.push_back({x, t, dev, g, std::abs(dev - g)});
    if (std::abs(x) <= 3.0) p.sup_remainder = std::max(p.sup_remainder, std::abs(dev - g));
  }
  p.scaled_remainder = std::sqrt(static_cast<double>(N)) * p.sup_remainder;
  return p;
}

/// Uniform grid lo, lo+step, ..., up to hi (inclusive within rounding).
inline std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0) || hi < lo) throw std::invalid_argument("grid: need step > 0 and hi >= lo");
  std::vector<double> g;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) g.push_back(lo + static_cast<double>(i) * step);
  return g;
}

/// Timer occupation at c times the cutoff time N/gamma.
inline double sharp_threshold(double c, std::size_t N, double gamma) {
  if (!(c > 0)) throw std::invalid_argument("sharp_threshold: c must be positive");
  return timer_occupation(N, c * static_cast<double>(N) / gamma, gamma);
}

// ---------------------------------------------------------------------------
// Tricomi's bound Gamma(a, x) < e^{-x} x^a / (x - a + 1).
// ---------------------------------------------------------------------------

struct TricomiBound {
  double log_bound;
  double log_exact;  // log of the non-regularized Gamma(a, x)
  double bound, exact;
  double margin;           // bound - exact
  double relative_margin;  // 1 - exact / bound
};

inline TricomiBound tricomi_bound(double a, double x) {
  if (!(a > 0)) throw std::domain_error("tricomi_bound: a must be positive");
  if (!(x > a - 1)) throw std::domain_error("tricomi_bound: requires x > a - 1");
  const double lb = -x + a * std::log(x) - std::log(x - a + 1.0);
  const double le = special::log_upper_incomplete_gamma(a, x);
  const double b = std::exp(lb), e = std::exp(le);
  return {lb, le, b, e, b - e, -std::expm1(le - lb)};
}

// ---------------------------------------------------------------------------
// Concatenated trigger schedule.
// ---------------------------------------------------------------------------

struct TriggerSchedule {
  std::size_t L = 1, N = 2;
  double gamma = 1.0;

  double t1(std::size_t l) const { return static_cast<double>(N) * (static_cast<double>(l) - 0.5) / gamma; }
  double t2(std::size_t l) const { return static_cast<double>(N) * (static_cast<double>(l) + 0.5) / gamma; }

  /// Windows [t1(l), t2(l)] touch but never overlap.
  bool windows_ordered() const {
    for (std::size_t l = 1; l < L; ++l)
      if (!(t1(l) < t2(l) && t2(l) <= t1(l + 1))) return false;
    return true;
  }
};

inline double alpha_rate(double l, double gamma) { return (0.5 - l * std::log1p(0.5 / l)) / gamma; }
inline double beta_rate(double l, double gamma) { return -(0.5 + l * std::log1p(-0.5 / l)) / gamma; }

struct ConcatenationError {
  std::size_t l, N;
  double early;  // gamma(Nl, N(l-1/2)) / Gamma(Nl)
  double late;   // Gamma(Nl, N(l+1/2)) / Gamma(Nl)
  double alpha, beta;
  // Smallest d in {0, 1, 2} with tail <= e^{-gamma rate N} (N l)^d, or -1.
  int early_degree, late_degree;
};

namespace detail {
inline int certify_degree(double tail, double exponent, double N, double l) {
  if (tail == 0.0) return 0;
  const double lt = std::log(tail);
  for (int d = 0; d <= 2; ++d)
    if (lt <= -exponent * N + d * std::log(N * l) + 1e-12) return d;
  return -1;
}
}  // namespace detail

/// Mis-trigger tails for step l. The tails depend on gamma only through
/// gamma * t, so the bounds are checked with gamma * alpha(l) and gamma * beta(l).
inline ConcatenationError concatenation_error(std::size_t l, std::size_t N, double gamma) {
  if (l < 1) throw std::invalid_argument("concatenation_error: l must be >= 1");
  TimerConfig{N, gamma}.validate();
  const double n = static_cast<double>(N), ld = static_cast<double>(l);
  const double a = n * ld;
  ConcatenationError e{l, N, special::regularized_gamma_lower(a, n * (ld - 0.5)),
                       special::regularized_gamma_upper(a, n * (ld + 0.5)), alpha_rate(ld, gamma), beta_rate(ld, gamma),
                       0, 0};
  e.early_degree = detail::certify_degree(e.early, gamma * e.beta, n, ld);
  e.late_degree = detail::certify_degree(e.late, gamma * e.alpha, n, ld);
  return e;
}

/// Union bound over the L steps of a schedule.
inline double total_mistrigger(const TriggerSchedule& s) {
  double total = 0;
  for (std::size_t l = 1; l <= s.L; ++l) {
    const auto e = concatenation_error(l, s.N, s.gamma);
    total += e.early + e.late;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Initializer overlap for truncated-normal inputs.
// ---------------------------------------------------------------------------

struct TruncatedNormalOverlap {
  double numeric, log_numeric;
  double bound, log_bound;
  double z1, z2;
  std::string regime;  // "z2>0" or "z2<=0"
  double quadrature_error;  // estimated relative error of the quadrature
};

/// int_0^N phi^tr_{0,N}((x - alpha N)/sqrt(beta N)) xi^{-x} dx with
/// xi = 1 + Gamma/omega, the t -> infinity overlap with phi^1_0 of a
/// truncated-normal excitation count.
inline TruncatedNormalOverlap truncated_normal_overlap(std::size_t N, double alpha, double beta, double omega,
                                                       double Gamma) {
  if (N < 1) throw std::invalid_argument("truncated_normal_overlap: N must be >= 1");
  if (!(alpha > 0 && alpha <= 1)) throw std::invalid_argument("truncated_normal_overlap: alpha must lie in (0, 1]");
  if (!(beta > 0)) throw std::invalid_argument("truncated_normal_overlap: beta must be positive");
  if (!(omega > 0) || !(Gamma > 0)) throw std::invalid_argument("truncated_normal_overlap: rates must be positive");
  const double n = static_cast<double>(N);
  const double lxi = std::log1p(Gamma / omega);
  const double sigma = std::sqrt(beta * n);
  const double z1 = n * (alpha - beta * lxi), z2 = n * (2 * alpha - beta * lxi);
  const double s = std::sqrt(n / beta);
  const double log_ztr = std::log(special::normal_cdf((1 - alpha) * s) - special::normal_cdf(-alpha * s));

  // Completing the square: the integrand is e^{-(lxi/2) z2} times a Gaussian
  // of width sigma centred at z1.
  const double peak = std::clamp(z1, 0.0, n);
  auto shifted = [&](double x) {
    const double u = (x - z1) / sigma, v = (peak - z1) / sigma;
    return std::exp(-0.5 * (u * u - v * v));
  };
  const double lo = std::max(0.0, z1 - 12 * sigma);
  const double hi = std::min(n, std::max(z1, 0.0) + 12 * sigma);
  double err = 0;
  double integral = 0;
  if (hi > lo)
    integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(shifted, lo, hi, 15, 1e-13, &err);
  const double v = (peak - z1) / sigma;
  const double log_numeric = -0.5 * lxi * z2 - 0.5 * v * v + std::log(integral) -
                             std::log(sigma * std::sqrt(2 * std::numbers::pi)) - log_ztr;

  double log_bound;
  std::string regime;
  if (z2 > 0) {
    regime = "z2>0";
    log_bound = -0.5 * lxi * z2 - log_ztr;
  } else {
    regime = "z2<=0";
    log_bound = 0.5 * std::log(beta) - 0.5 * std::log(n) - std::log(std::abs(alpha - beta * lxi)) -
                n * alpha * alpha / (2 * beta) - log_ztr;
  }
  return {std::exp(log_numeric), log_numeric, std::exp(log_bound), log_bound, z1, z2, regime,
          integral > 0 ? err / integral : 0.0};
}

// ---------------------------------------------------------------------------
// Timer started from an imperfectly initialized product state.
// ---------------------------------------------------------------------------

struct ImperfectInitShift {
  double baseline;      // occupation from phi
  double perturbed;     // occupation from phi(eps)
  double shift;         // perturbed - baseline
  double first_order;   // N eps
  double derivative;    // d shift / d eps at eps = 0
  double residual;      // shift - eps * derivative
};

namespace detail {
// P(last timer bit = 0) for a distribution over N-bit strings.
inline double last_bit_zero(const Eigen::VectorXd& p) {
  double s = 0;
  for (Eigen::Index i = 0; i < p.size(); i += 2) s += p(i);
  return s;
}
}  // namespace detail

/// Input phi(eps): qubit 1 is |0> with prob 1-eps, the others |1> with prob
/// 1-eps, independently. Evolved exactly on the 2^N bit-string chain.
inline ImperfectInitShift imperfect_init_shift(std::size_t N, double eps, double t, double gamma) {
  if (!(eps >= 0 && eps <= 0.1)) throw std::invalid_argument("imperfect_init_shift: eps must lie in [0, 0.1]");
  if (t < 0) throw std::invalid_argument("imperfect_init_shift: negative time");
  const auto gen = timer_bitstring_generator(N, gamma);
  const std::size_t dim = std::size_t{1} << N;
  const std::size_t good = (std::size_t{1} << (N - 1)) - 1;  // 0 1 1 ... 1
  auto occ_from = [&](const Eigen::VectorXd& p0) { return detail::last_bit_zero(evolve_classical(gen, p0, t)); };
  auto delta = [&](std::size_t s) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    p(static_cast<Eigen::Index>(s)) = 1.0;
    return p;
  };
  Eigen::VectorXd p0(static_cast<Eigen::Index>(dim));
  for (std::size_t s = 0; s < dim; ++s) {
    const int flips = std::popcount(s ^ good);
    p0(static_cast<Eigen::Index>(s)) = std::pow(eps, flips) * std::pow(1 - eps, static_cast<int>(N) - flips);
  }
  const double base = occ_from(delta(good));
  double deriv = 0;
  for (std::size_t j = 0; j < N; ++j) deriv += occ_from(delta(good ^ (std::size_t{1} << j))) - base;
  const double pert = occ_from(p0);
  const double shift = pert - base;
  return {base, pert, shift, static_cast<double>(N) * eps, deriv, shift - eps * deriv};
}

}  // namespace dqt

#endif  // DQT_CUTOFF_HPP
