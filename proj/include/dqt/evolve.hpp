#ifndef DQT_EVOLVE_HPP
#define DQT_EVOLVE_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dqt/liouvillian.hpp"

namespace dqt {

class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Generators whose support spans at most this many qubits are propagated
/// through a dense local superoperator; wider ones are stepped matrix-free.
inline constexpr std::size_t kLocalPropagatorQubits = 4;

namespace detail {

inline double induced_one_norm(const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

// exp(h*G) by Taylor series summed until the terms stop contributing.
inline Matrix taylor_exp(const Matrix& g, double h) {
  const auto n = g.rows();
  Matrix acc = Matrix::Identity(n, n);
  Matrix term = acc;
  for (int k = 1; k < 80; ++k) {
    term = (h / k) * (g * term);
    acc += term;
    if (induced_one_norm(term) <= 1e-18 * induced_one_norm(acc)) break;
  }
  return acc;
}

inline Matrix taylor_step(const Liouvillian& L, const Matrix& rho, double h) {
  Matrix acc = rho;
  Matrix term = rho;
  for (int k = 1; k < 80; ++k) {
    term = (h / k) * L.apply(term);
    acc += term;
    const double tn = term.norm();
    if (tn <= 1e-17 * acc.norm() || tn == 0.0) break;
  }
  return acc;
}

inline Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace detail

/// The map rho -> exp(dt L)(rho) for a fixed generator and time step.
///
/// The step count is refined by doubling until two successive refinements
/// agree to `tol` (trace-norm bound); the finer result is returned.
class Propagator {
 public:
  Propagator(const Liouvillian& L, double dt, double tol = -1.0, int max_doublings = 30)
      : L_(L), dt_(dt), tol_(tol < 0 ? default_tolerance(L.reg().dim()) : tol), max_doublings_(max_doublings) {
    if (!(dt >= 0.0) || !std::isfinite(dt)) throw std::invalid_argument("propagation time must be finite and >= 0");
    const auto sites = L.support();
    if (dt == 0.0 || sites.empty()) {
      mode_ = Mode::identity;
      return;
    }
    if (sites.size() <= kLocalPropagatorQubits) {
      mode_ = Mode::local;
      build_local(sites);
    } else {
      mode_ = Mode::full;
      const double nb = L.norm_bound();
      steps_ = std::max<long>(1, static_cast<long>(std::ceil(dt * nb / 0.5)));
    }
  }

  double dt() const { return dt_; }
  bool is_local() const { return mode_ == Mode::local; }
  const Liouvillian& generator() const { return L_; }

  Matrix apply(const Matrix& rho) const {
    switch (mode_) {
      case Mode::identity:
        return rho;
      case Mode::local:
        return detail::hermitize(apply_local(rho, E_));
      case Mode::full:
        break;
    }
    long s = steps_;
    Matrix coarse = run_full(rho, s);
    for (int i = 0; i < max_doublings_; ++i) {
      s *= 2;
      Matrix fine = run_full(rho, s);
      if (trace_norm_bound(fine - coarse) < tol_) return detail::hermitize(fine);
      coarse = std::move(fine);
    }
    throw convergence_error("evolve: step doubling did not converge");
  }

  DensityMatrix apply(const DensityMatrix& rho) const {
    if (rho.reg() != L_.reg()) throw register_mismatch("propagator: register mismatch");
    return DensityMatrix(rho.reg(), apply(rho.matrix()), 10 * tol_ + 1e-12);
  }

  /// Generator applied through the same local machinery (cheap for wide registers).
  Matrix generator_action(const Matrix& rho) const {
    if (mode_ == Mode::local) return apply_local(rho, G_);
    return L_.apply(rho);
  }

 private:
  enum class Mode { identity, local, full };

  void build_local(const std::vector<std::string>& sites) {
    const auto bits = detail::bits_for(L_.reg(), sites);
    const auto ebits = detail::complement_bits(L_.reg(), bits);
    ds_ = std::size_t{1} << bits.size();
    de_ = std::size_t{1} << ebits.size();
    off_s_.resize(ds_);
    off_e_.resize(de_);
    for (std::size_t i = 0; i < ds_; ++i) off_s_[i] = detail::deposit_bits(i, bits);
    for (std::size_t i = 0; i < de_; ++i) off_e_[i] = detail::deposit_bits(i, ebits);

    G_ = local_superoperator(L_, sites);
    const double gn = detail::induced_one_norm(G_);
    int p = gn * dt_ > 0.5 ? static_cast<int>(std::ceil(std::log2(gn * dt_ / 0.5))) : 0;
    Matrix coarse = power_exp(p);
    for (int i = 0; i < max_doublings_; ++i) {
      ++p;
      Matrix fine = power_exp(p);
      if (detail::induced_one_norm(fine - coarse) * static_cast<double>(ds_) < tol_) {
        E_ = std::move(fine);
        return;
      }
      coarse = std::move(fine);
    }
    throw convergence_error("evolve: local propagator did not converge under step doubling");
  }

  // exp(dt G) using 2^p Taylor substeps combined by repeated squaring.
  Matrix power_exp(int p) const {
    Matrix e = detail::taylor_exp(G_, std::ldexp(dt_, -p));
    for (int i = 0; i < p; ++i) e = e * e;
    return e;
  }

  Matrix apply_local(const Matrix& rho, const Matrix& super) const {
    const std::size_t ds = ds_, de = de_;
    Matrix r(ds * ds, de * de);
    for (std::size_t ep = 0; ep < de; ++ep)
      for (std::size_t e = 0; e < de; ++e) {
        const auto col = static_cast<Eigen::Index>(e + ep * de);
        for (std::size_t sp = 0; sp < ds; ++sp)
          for (std::size_t s = 0; s < ds; ++s)
            r(static_cast<Eigen::Index>(s + sp * ds), col) = rho(off_s_[s] | off_e_[e], off_s_[sp] | off_e_[ep]);
      }
    Matrix r2 = super * r;
    Matrix out(rho.rows(), rho.cols());
    for (std::size_t ep = 0; ep < de; ++ep)
      for (std::size_t e = 0; e < de; ++e) {
        const auto col = static_cast<Eigen::Index>(e + ep * de);
        for (std::size_t sp = 0; sp < ds; ++sp)
          for (std::size_t s = 0; s < ds; ++s)
            out(off_s_[s] | off_e_[e], off_s_[sp] | off_e_[ep]) = r2(static_cast<Eigen::Index>(s + sp * ds), col);
      }
    return out;
  }

  Matrix run_full(const Matrix& rho, long steps) const {
    const double h = dt_ / static_cast<double>(steps);
    Matrix x = rho;
    for (long i = 0; i < steps; ++i) x = detail::taylor_step(L_, x, h);
    return x;
  }

  Liouvillian L_;
  double dt_;
  double tol_;
  int max_doublings_;
  Mode mode_ = Mode::identity;
  long steps_ = 1;
  std::size_t ds_ = 1, de_ = 1;
  std::vector<std::size_t> off_s_, off_e_;
  Matrix G_, E_;
};

/// exp(t L)(rho0).
inline DensityMatrix evolve(const Liouvillian& L, const DensityMatrix& rho0, double t, double tol = -1.0) {
  if (t < 0) throw std::invalid_argument("evolve: negative time");
  if (L.reg() != rho0.reg()) throw register_mismatch("evolve: register mismatch");
  if (t == 0.0) return rho0;
  return Propagator(L, t, tol).apply(rho0);
}

}  // namespace dqt

#endif  // DQT_EVOLVE_HPP
