#ifndef DQT_CLASSICAL_HPP
#define DQT_CLASSICAL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

#include "dqt/density.hpp"
#include "dqt/gadgets.hpp"
#include "dqt/special.hpp"

namespace dqt {

// ---------------------------------------------------------------------------
// Continuous-time Markov chains.
// ---------------------------------------------------------------------------

/// Rate matrix Q with dp/dt = Q p: Q(i, j) >= 0 is the rate j -> i and every
/// column sums to zero.
class ClassicalGenerator {
 public:
  struct Transition {
    std::size_t from, to;
    double rate;
  };

  ClassicalGenerator(std::size_t n, const std::vector<Transition>& transitions) : n_(n), exit_(n, 0.0) {
    std::vector<Eigen::Triplet<double>> trips;
    for (const auto& t : transitions) {
      if (t.from >= n || t.to >= n) throw std::out_of_range("transition outside the state space");
      if (!(t.rate >= 0) || !std::isfinite(t.rate)) throw std::invalid_argument("transition rates must be finite and >= 0");
      if (t.rate == 0.0 || t.from == t.to) continue;
      trips.emplace_back(static_cast<int>(t.to), static_cast<int>(t.from), t.rate);
      exit_[t.from] += t.rate;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (exit_[i] > 0) trips.emplace_back(static_cast<int>(i), static_cast<int>(i), -exit_[i]);
    q_ = Eigen::SparseMatrix<double>(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    q_.setFromTriplets(trips.begin(), trips.end());
    q_.makeCompressed();
  }

  std::size_t size() const { return n_; }
  const Eigen::SparseMatrix<double>& rates() const { return q_; }
  double max_exit_rate() const { return n_ ? *std::max_element(exit_.begin(), exit_.end()) : 0.0; }
  double exit_rate(std::size_t i) const { return exit_.at(i); }

  /// Largest |column sum|; zero up to rounding for a valid generator.
  double conservation_defect() const {
    Eigen::RowVectorXd ones = Eigen::RowVectorXd::Ones(static_cast<Eigen::Index>(n_));
    return (ones * q_).cwiseAbs().maxCoeff();
  }

 private:
  std::size_t n_;
  std::vector<double> exit_;
  Eigen::SparseMatrix<double> q_;
};

/// p(t) = exp(tQ) p0 by uniformization. Poisson weights are generated from
/// the mode outward and normalized, so large Lambda*t does not underflow.
inline Eigen::VectorXd evolve_classical(const ClassicalGenerator& gen, const Eigen::VectorXd& p0, double t,
                                        double trunc_tol = 1e-12) {
  if (t < 0) throw std::invalid_argument("evolve_classical: negative time");
  if (static_cast<std::size_t>(p0.size()) != gen.size()) throw std::invalid_argument("evolve_classical: size mismatch");
  const double lambda = gen.max_exit_rate();
  if (t == 0.0 || lambda == 0.0) return p0;
  const double x = lambda * t;
  const auto mode = static_cast<long>(std::floor(x));
  // Unnormalized weights relative to the mode.
  const long span = static_cast<long>(std::ceil(12.0 * std::sqrt(x + 1.0) + 40.0));
  const long lo = std::max(0L, mode - span);
  const long hi = mode + span;
  std::vector<double> w(static_cast<std::size_t>(hi - lo + 1), 0.0);
  w[static_cast<std::size_t>(mode - lo)] = 1.0;
  for (long k = mode; k < hi; ++k)
    w[static_cast<std::size_t>(k + 1 - lo)] = w[static_cast<std::size_t>(k - lo)] * x / static_cast<double>(k + 1);
  for (long k = mode; k > lo; --k)
    w[static_cast<std::size_t>(k - 1 - lo)] = w[static_cast<std::size_t>(k - lo)] * static_cast<double>(k) / x;
  double total = 0;
  for (double v : w) total += v;
  // Right truncation: stop once the remaining mass is below trunc_tol.
  long right = hi;
  {
    double tail = 0;
    for (long k = hi; k > mode; --k) {
      tail += w[static_cast<std::size_t>(k - lo)] / total;
      if (tail > trunc_tol) {
        right = k;
        break;
      }
    }
  }
  const Eigen::SparseMatrix<double>& q = gen.rates();
  Eigen::VectorXd v = p0;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(p0.size());
  for (long k = 0; k <= right; ++k) {
    if (k >= lo) acc += (w[static_cast<std::size_t>(k - lo)] / total) * v;
    if (k < right) v += (q * v) / lambda;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Initializer in the symmetrized basis phi^a_k = |a_c><a_c| (x) P_k.
// ---------------------------------------------------------------------------

/// Probabilities p[a][k] over central value a and auxiliary excitation count k.
struct SymmetrizedState {
  std::size_t M = 0;
  Eigen::VectorXd p;  // index a * (M + 1) + k

  static std::size_t index(std::size_t M, int a, std::size_t k) { return static_cast<std::size_t>(a) * (M + 1) + k; }
  double operator()(int a, std::size_t k) const { return p(static_cast<Eigen::Index>(index(M, a, k))); }
  double& operator()(int a, std::size_t k) { return p(static_cast<Eigen::Index>(index(M, a, k))); }

  /// Probability that the central qubit is |a>.
  double central(int a) const {
    double s = 0;
    for (std::size_t k = 0; k <= M; ++k) s += (*this)(a, k);
    return s;
  }

  static SymmetrizedState zero(std::size_t M) { return {M, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * (M + 1)))}; }
};

inline double total_variation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return 0.5 * (a - b).cwiseAbs().sum(); }

/// Project the diagonal of an initializer-register state onto (a, k).
inline SymmetrizedState symmetrize(const DensityMatrix& rho) {
  const std::size_t M = rho.reg().size() - 1;
  if (rho.reg().size() < 2 || rho.reg() != initializer_register(M))
    throw register_mismatch("symmetrize: register is not an initializer register");
  auto s = SymmetrizedState::zero(M);
  const std::size_t aux_mask = (std::size_t{1} << M) - 1;
  for (std::size_t i = 0; i < rho.dim(); ++i) {
    const int a = static_cast<int>((i >> M) & 1U);
    const auto k = static_cast<std::size_t>(std::popcount(i & aux_mask));
    s(a, k) += rho.population(i);
  }
  return s;
}

/// Reduced chain: (1,k) -> (0,k) at k Gamma, (a,k) -> (a,k-1) at k omega.
inline ClassicalGenerator initializer_generator(std::size_t M, double omega, double Gamma) {
  InitializerConfig{M, omega, Gamma}.validate();
  std::vector<ClassicalGenerator::Transition> tr;
  for (std::size_t k = 1; k <= M; ++k) {
    const double kd = static_cast<double>(k);
    tr.push_back({SymmetrizedState::index(M, 1, k), SymmetrizedState::index(M, 0, k), kd * Gamma});
    tr.push_back({SymmetrizedState::index(M, 1, k), SymmetrizedState::index(M, 1, k - 1), kd * omega});
    tr.push_back({SymmetrizedState::index(M, 0, k), SymmetrizedState::index(M, 0, k - 1), kd * omega});
  }
  return ClassicalGenerator(2 * (M + 1), tr);
}

inline SymmetrizedState evolve_classical(const ClassicalGenerator& gen, const SymmetrizedState& s0, double t) {
  return {s0.M, evolve_classical(gen, s0.p, t)};
}

/// <phi^1_0| e^{tL}(phi^1_k) |phi^1_0> = ((1 - e^{-t(omega+Gamma)}) omega/(omega+Gamma))^k.
inline double overlap_formula(std::size_t k, double t, double omega, double Gamma) {
  if (t < 0 || !(omega > 0) || !(Gamma > 0)) throw std::invalid_argument("overlap_formula: invalid arguments");
  const double base = -std::expm1(-t * (omega + Gamma)) * omega / (omega + Gamma);
  return std::pow(base, static_cast<double>(k));
}

/// Stationary limit of the reduced chain: the mass of (1,k) ends at (1,0)
/// with probability xi^k, the rest at (0,0).
inline SymmetrizedState initializer_limit(const SymmetrizedState& s0, double omega, double Gamma) {
  const double xi = omega / (omega + Gamma);
  auto out = SymmetrizedState::zero(s0.M);
  double stay = 0;
  for (std::size_t k = 0; k <= s0.M; ++k) stay += s0(1, k) * std::pow(xi, static_cast<double>(k));
  out(1, 0) = stay;
  out(0, 0) = 1.0 - stay;
  return out;
}

/// Product input: central qubit |1>, auxiliary j excited with probability q[j].
/// The excitation count is Poisson-binomial.
inline SymmetrizedState product_input(const std::vector<double>& q) {
  const std::size_t M = q.size();
  std::vector<double> dist(M + 1, 0.0);
  dist[0] = 1.0;
  for (std::size_t j = 0; j < M; ++j)
    for (std::size_t k = j + 2; k-- > 0;) dist[k] = dist[k] * (1.0 - q[j]) + (k ? dist[k - 1] * q[j] : 0.0);
  auto s = SymmetrizedState::zero(M);
  for (std::size_t k = 0; k <= M; ++k) s(1, k) = dist[k];
  return s;
}

struct EtaBound {
  double two_qubit_formula;  // e^{-t omega}(2 + e^{-t Gamma} omega/(omega+Gamma))
  double two_qubit_exhaustive;  // sup over probability vectors of ||(e^{t Lambda} - T_inf) p||_1
  double global_bound;       // 3 M e^{-t omega}
};

/// Both the closed-form two-qubit eta and an exhaustive maximization over the
/// 4-state chain (c, a), whose sup is attained at a vertex of the simplex.
inline EtaBound eta_bound(double t, std::size_t M, double omega, double Gamma) {
  if (t < 0) throw std::invalid_argument("eta_bound: negative time");
  InitializerConfig{M, omega, Gamma}.validate();
  // states: 0=(c0,a0) 1=(c0,a1) 2=(c1,a0) 3=(c1,a1); columns are "from"
  Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
  q(0, 1) = omega;
  q(1, 3) = Gamma;
  q(2, 3) = omega;
  for (int j = 0; j < 4; ++j) q(j, j) = -q.col(j).sum() + q(j, j);
  const Eigen::Matrix4d e = (t * q).exp();
  const double xi = omega / (omega + Gamma);
  Eigen::Matrix4d tinf = Eigen::Matrix4d::Zero();
  tinf(0, 0) = 1;
  tinf(0, 1) = 1;
  tinf(2, 2) = 1;
  tinf(2, 3) = xi;
  tinf(0, 3) = 1 - xi;
  const double exhaustive = (e - tinf).cwiseAbs().colwise().sum().maxCoeff();
  return {std::exp(-t * omega) * (2.0 + std::exp(-t * Gamma) * xi), exhaustive,
          3.0 * static_cast<double>(M) * std::exp(-t * omega)};
}

struct InitCertificate {
  double bound;  // M (3 e^{-t omega} + e^{-mu M})
  double mu;
};

/// mu = -(1/M) ln max_k s_k with s_k = (1-delta)^{max(cM - k, 0)} xi^k.
inline InitCertificate theorem1_certificate(const InitializerConfig& cfg, double delta, double c, double t) {
  cfg.validate();
  if (!(delta > 0 && delta <= 1)) throw std::invalid_argument("init certificate: delta must lie in (0, 1]");
  if (!(c > 0 && c <= 1)) throw std::invalid_argument("init certificate: c must lie in (0, 1]");
  const double M = static_cast<double>(cfg.M);
  const double lxi = std::log(cfg.omega / (cfg.omega + cfg.Gamma));
  const double l1d = delta == 1.0 ? -std::numeric_limits<double>::infinity() : std::log1p(-delta);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= cfg.M; ++k) {
    const double kd = static_cast<double>(k);
    const double rest = std::max(c * M - kd, 0.0);
    const double ls = (rest > 0 ? rest * l1d : 0.0) + kd * lxi;
    best = std::max(best, ls);
  }
  const double mu = -best / M;
  return {M * (3.0 * std::exp(-t * cfg.omega) + std::exp(-mu * M)), mu};
}

// ---------------------------------------------------------------------------
// Timer in the classical picture.
// ---------------------------------------------------------------------------

/// <0_N| tr_{N-1} e^{tL^cut}(phi_0) |0_N> = P(N-1, t gamma).
inline double timer_occupation(std::size_t N, double t, double gamma) {
  TimerConfig{N, gamma}.validate();
  if (t < 0) throw std::invalid_argument("timer_occupation: negative time");
  return special::regularized_gamma_lower(static_cast<double>(N - 1), t * gamma);
}

/// Weights of phi_0..phi_{N-2} (truncated Poisson) followed by the absorbing
/// all-zero mass.
inline std::vector<double> timer_distribution(std::size_t N, double t, double gamma) {
  TimerConfig{N, gamma}.validate();
  if (t < 0) throw std::invalid_argument("timer_distribution: negative time");
  const double x = t * gamma;
  std::vector<double> w(N);
  for (std::size_t k = 0; k + 1 < N; ++k) w[k] = special::poisson_pmf(static_cast<double>(k), x);
  w[N - 1] = timer_occupation(N, t, gamma);
  return w;
}

/// Birth chain phi_k -> phi_{k+1} at rate gamma on the states reachable from phi_0.
inline ClassicalGenerator timer_chain_generator(std::size_t N, double gamma) {
  TimerConfig{N, gamma}.validate();
  std::vector<ClassicalGenerator::Transition> tr;
  for (std::size_t k = 0; k + 1 < N; ++k) tr.push_back({k, k + 1, gamma});
  return ClassicalGenerator(N, tr);
}

/// Full classical timer on all 2^N bit strings (site 1 is the MSB): bit j+1
/// drops 1 -> 0 at rate gamma while bit j is 0.
inline ClassicalGenerator timer_bitstring_generator(std::size_t N, double gamma) {
  TimerConfig{N, gamma}.validate();
  if (N > 20) throw std::length_error("timer_bitstring_generator: N too large");
  const std::size_t n = std::size_t{1} << N;
  std::vector<ClassicalGenerator::Transition> tr;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t j = 0; j + 1 < N; ++j) {
      const std::size_t bj = N - 1 - j, bnext = N - 2 - j;
      if (((s >> bj) & 1U) == 0 && ((s >> bnext) & 1U) == 1) tr.push_back({s, s & ~(std::size_t{1} << bnext), gamma});
    }
  return ClassicalGenerator(n, tr);
}

}  // namespace dqt

#endif  // DQT_CLASSICAL_HPP
