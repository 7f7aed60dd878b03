#ifndef DQT_RECURRENCE_HPP
#define DQT_RECURRENCE_HPP

// Coefficients of (L^ini)^m(phi^1_k) = (-Gamma)^m sum_j f^k_m(j) phi^1_j in
// the omega = Gamma regime. Every entry is an integer, so the table is kept in
// arbitrary precision and only rounded on request.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace dqt {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;
using wide_float = boost::multiprecision::cpp_bin_float_100;

/// table[m][j] = f^k_m(j) for m = 0..m_max, j = 0..k.
class RecurrenceTable {
 public:
  RecurrenceTable(std::size_t k, std::size_t m_max) : k_(k) {
    rows_.reserve(m_max + 1);
    std::vector<cpp_int> row(k + 1, 0);
    row[k] = 1;
    rows_.push_back(row);
    extend(m_max);
  }

  std::size_t k() const { return k_; }
  std::size_t m_max() const { return rows_.size() - 1; }

  /// Grow the table up to order m_max.
  void extend(std::size_t m_max) {
    while (rows_.size() <= m_max) {
      const auto& prev = rows_.back();
      std::vector<cpp_int> next(k_ + 1, 0);
      for (std::size_t j = 0; j <= k_; ++j) {
        if (j + 1 <= k_) next[j] -= cpp_int(j + 1) * prev[j + 1];
        next[j] += cpp_int(2 * j) * prev[j];
      }
      rows_.push_back(std::move(next));
    }
  }

  const cpp_int& operator()(std::size_t m, std::size_t j) const { return rows_.at(m).at(j); }

 private:
  std::size_t k_;
  std::vector<std::vector<cpp_int>> rows_;
};

inline RecurrenceTable recurrence_f(std::size_t k, std::size_t m_max) { return {k, m_max}; }

/// Rounds to double, throwing if the value is not representable.
inline double to_double_checked(const cpp_int& v) {
  const double d = v.convert_to<double>();
  if (!std::isfinite(d)) throw std::overflow_error("recurrence coefficient exceeds double range");
  return d;
}

namespace detail {
inline cpp_int binomial(std::size_t n, std::size_t r) {
  cpp_int b = 1;
  for (std::size_t i = 1; i <= r; ++i) b = b * (n - r + i) / i;
  return b;
}
inline cpp_int factorial(std::size_t n) {
  cpp_int f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}
inline cpp_int ipow(const cpp_int& b, std::size_t e) {
  cpp_int r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= b;
  return r;
}
}  // namespace detail

/// Binomial-sum closed form of f^k_m(j), evaluated exactly. For j >= 1 each
/// term carries the sign (-1)^{l+j}; the sum runs over l >= j.
inline cpp_rational f_closed_form(std::size_t k, std::size_t m, std::size_t j) {
  if (j > k) return 0;
  cpp_rational sum = 0;
  if (j == 0) {
    for (std::size_t l = 0; l <= k; ++l) {
      cpp_int term = detail::binomial(k, l) * (l == 0 && m == 0 ? cpp_int(1) : detail::ipow(cpp_int(2 * l), m));
      sum += (l % 2 ? -1 : 1) * cpp_rational(term);
    }
  } else {
    for (std::size_t l = j; l <= k; ++l) {
      cpp_rational term(detail::binomial(k, l) * detail::ipow(cpp_int(2 * l), m + 1) * detail::factorial(l - 1) *
                        detail::ipow(cpp_int(2), j - 1));
      term /= cpp_rational(detail::factorial(l - j) * detail::factorial(j));
      sum += ((l + j) % 2 ? -1 : 1) * term;
    }
  }
  return sum / cpp_rational(detail::ipow(cpp_int(2), k));
}

struct SeriesResult {
  double value;
  std::size_t terms;
  double tail_bound;
};

/// sum_m (-Gamma t)^m f^k_m(0) / m!, accumulated in 100-digit floating point.
/// Stops once the bound sum_{m' > m} (2k Gamma t)^{m'}/m'! on the tail is
/// below tail_tol (|f^k_m(0)| <= (2k)^m).
inline SeriesResult overlap_series(std::size_t k, double gamma_t, double tail_tol = 1e-12, std::size_t max_terms = 4000) {
  if (!(gamma_t >= 0)) throw std::invalid_argument("overlap_series: Gamma t must be >= 0");
  RecurrenceTable table(k, 0);
  const wide_float x(gamma_t);
  const double r = 2.0 * static_cast<double>(k) * gamma_t;
  wide_float sum = 0, pw = 1;  // pw = (-x)^m / m!
  double bound_term = 1.0;     // r^m / m!
  for (std::size_t m = 0; m < max_terms; ++m) {
    if (m > 0) {
      pw *= -x / static_cast<double>(m);
      bound_term *= r / static_cast<double>(m);
      table.extend(m);
    }
    sum += pw * wide_float(table(m, 0));
    // Geometric tail estimate valid once the ratio r/(m+2) < 1.
    const double ratio = r / static_cast<double>(m + 2);
    if (ratio < 0.5) {
      const double tail = bound_term * r / static_cast<double>(m + 1) / (1.0 - ratio);
      if (tail < tail_tol) return {sum.convert_to<double>(), m + 1, tail};
    }
  }
  throw std::runtime_error("overlap_series: did not converge");
}

}  // namespace dqt

#endif  // DQT_RECURRENCE_HPP
