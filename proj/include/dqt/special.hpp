#ifndef DQT_SPECIAL_HPP
#define DQT_SPECIAL_HPP

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dqt::special {

namespace detail {

// log(1+u) - u, accurate near u = 0.
inline double log1pmx(double u) {
  if (std::abs(u) < 0.1) {
    // -u^2/2 + u^3/3 - u^4/4 + ...
    double term = u, sum = 0.0;
    for (int k = 2; k < 60; ++k) {
      term *= -u;
      const double t = term / k;
      sum += t;
      if (std::abs(t) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::log1p(u) - u;
}

// lgamma(a+1) - [(a+1/2) ln a - a + ln sqrt(2 pi)]  (Stirling remainder)
inline double stirling_error(double a) {
  if (a < 15.0) return std::lgamma(a + 1.0) - (a + 0.5) * std::log(a) + a - 0.5 * std::log(2.0 * std::numbers::pi);
  const double r = 1.0 / a, r2 = r * r;
  return r * (1.0 / 12 - r2 * (1.0 / 360 - r2 * (1.0 / 1260 - r2 * (1.0 / 1680 - r2 / 1188))));
}

}  // namespace detail

/// log( x^a e^{-x} / Gamma(a+1) ), computed without the cancellation between
/// a ln x, x and lgamma(a+1) that plagues the naive form for large a.
inline double log_gamma_prefix(double a, double x) {
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  if (a < 10.0) return a * std::log(x) - x - std::lgamma(a + 1.0);
  const double u = (x - a) / a;
  return a * detail::log1pmx(u) - detail::stirling_error(a) - 0.5 * std::log(2.0 * std::numbers::pi * a);
}

/// Poisson probability mass e^{-x} x^k / k!.
inline double poisson_pmf(double k, double x) {
  if (x == 0.0) return k == 0.0 ? 1.0 : 0.0;
  if (k == 0.0) return std::exp(-x);
  return std::exp(log_gamma_prefix(k, x));
}

namespace detail {

struct GammaPair {
  double p, q;
};

inline GammaPair regularized_gamma(double a, double x) {
  if (!(a > 0) || !(x >= 0) || std::isnan(a) || std::isnan(x))
    throw std::domain_error("regularized gamma: requires a > 0 and x >= 0");
  if (x == 0.0) return {0.0, 1.0};
  if (std::isinf(x)) return {1.0, 0.0};
  const double lpre = log_gamma_prefix(a, x);
  constexpr double eps = 1e-17;
  if (x < a + 1.0) {
    // P = D(a,x) * (1 + x/(a+1) + x^2/((a+1)(a+2)) + ...)
    double term = 1.0, sum = 1.0;
    for (long n = 1; n < 10'000'000; ++n) {
      term *= x / (a + static_cast<double>(n));
      sum += term;
      if (term < eps * sum) break;
    }
    const double p = std::exp(lpre + std::log(sum));
    return {p, 1.0 - p};
  }
  // Q = a D(a,x) * CF, modified Lentz evaluation of the continued fraction.
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (long i = 1; i < 10'000'000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  const double q = std::exp(lpre + std::log(a) + std::log(h));
  return {1.0 - q, q};
}

}  // namespace detail

/// P(a, x) = gamma(a, x) / Gamma(a).
inline double regularized_gamma_lower(double a, double x) { return detail::regularized_gamma(a, x).p; }

/// Q(a, x) = Gamma(a, x) / Gamma(a).
inline double regularized_gamma_upper(double a, double x) { return detail::regularized_gamma(a, x).q; }

/// log Gamma(a, x) (non-regularized upper incomplete gamma).
inline double log_upper_incomplete_gamma(double a, double x) {
  return std::log(regularized_gamma_upper(a, x)) + std::lgamma(a);
}

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Standard normal density.
inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace dqt::special

#endif  // DQT_SPECIAL_HPP
