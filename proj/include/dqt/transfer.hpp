#ifndef DQT_TRANSFER_HPP
#define DQT_TRANSFER_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dqt/evolve.hpp"
#include "dqt/gadgets.hpp"

namespace dqt {

// ---------------------------------------------------------------------------
// Pure-state bookkeeping.
// ---------------------------------------------------------------------------

inline void require_normalized(const Vector& psi, double tol = 1e-10) {
  if (std::abs(psi.norm() - 1.0) > tol) throw std::invalid_argument("state vector is not normalized");
}

/// Single-qubit state cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
inline Vector bloch_state(double theta, double phi) {
  Vector v(2);
  v << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi);
  return v;
}

/// CZ_{j,j+1} applied along the chain to phi_in (x) |+>^{n-1}.
inline Vector prepare_cluster(const Vector& phi_in, std::size_t n) {
  if (phi_in.size() != 2) throw std::invalid_argument("prepare_cluster: phi_in must be a single-qubit state");
  if (n < 1) throw std::invalid_argument("prepare_cluster: n must be >= 1");
  require_normalized(phi_in);
  Vector psi = phi_in;
  for (std::size_t j = 1; j < n; ++j) psi = kron(psi, qubit::plus());
  // Site j (0-based) is bit n-1-j.
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const std::size_t a = n - 1 - j, b = n - 2 - j;
    for (Eigen::Index i = 0; i < psi.size(); ++i)
      if (((static_cast<std::size_t>(i) >> a) & 1U) && ((static_cast<std::size_t>(i) >> b) & 1U)) psi(i) = -psi(i);
  }
  return psi;
}

struct Byproduct {
  int gx = 0;  // parity of s_2, s_4, ...
  int gz = 0;  // parity of s_1, s_3, ...
};

/// phi_out = X^{gx} Z^{gz} phi_in for X-basis outcomes s_1..s_{n-1} (1 = "-").
inline Byproduct byproduct_parities(const std::vector<int>& outcomes) {
  Byproduct b;
  for (std::size_t j = 0; j < outcomes.size(); ++j) {
    if (outcomes[j] != 0 && outcomes[j] != 1) throw std::invalid_argument("outcomes must be 0 or 1");
    if (j % 2 == 0)
      b.gz ^= outcomes[j];
    else
      b.gx ^= outcomes[j];
  }
  return b;
}

/// Ideal projective X measurements on sites 1..n-1 of the cluster with the
/// given outcomes, followed by the Pauli correction. Returns the corrected,
/// normalized state of site n.
inline Vector bookkeeping_oracle(const Vector& phi_in, std::size_t n, const std::vector<int>& outcomes) {
  if (n < 3 || n % 2 == 0) throw std::invalid_argument("bookkeeping_oracle: n must be odd and >= 3");
  if (outcomes.size() != n - 1) throw std::invalid_argument("bookkeeping_oracle: need n-1 outcomes");
  Vector psi = prepare_cluster(phi_in, n);
  Vector bra = Vector::Ones(1);
  for (int s : outcomes) bra = kron(bra, s ? qubit::minus() : qubit::plus());
  // Contract the first n-1 sites with the outcome bra.
  Vector out = Vector::Zero(2);
  const auto rest = static_cast<Eigen::Index>(bra.size());
  for (Eigen::Index i = 0; i < rest; ++i)
    for (Eigen::Index q = 0; q < 2; ++q) out(q) += std::conj(bra(i)) * psi(2 * i + q);
  const double nrm = out.norm();
  if (nrm < 1e-12) throw std::runtime_error("bookkeeping_oracle: outcome pattern has zero probability");
  out /= nrm;
  const auto bp = byproduct_parities(outcomes);
  Matrix corr = qubit::identity();
  if (bp.gx) corr = qubit::pauli_x() * corr;
  if (bp.gz) corr = qubit::pauli_z() * corr;
  return corr * out;
}

// ---------------------------------------------------------------------------
// Staged dissipative evolution.
// ---------------------------------------------------------------------------

struct StageOptions {
  double eq_tol = 1e-9;        // generator trace-norm bound that counts as equilibrium
  double budget_factor = 100;  // time budget per stage, in units of 1/min_rate
  double chunk_factor = 1.0;   // evolution chunk, in units of 1/min_rate
  double evolve_tol = -1;      // per-chunk propagator tolerance (default for the dimension)
};

struct SequentialResult {
  DensityMatrix rho;
  std::vector<double> times;  // convergence time of each stage
};

/// Evolve under each stage until sqrt(d) ||L(rho)||_F <= eq_tol, a bound on
/// the trace norm of the generator output.
inline SequentialResult run_sequential(const std::vector<Stage>& stages, const DensityMatrix& rho0,
                                       const StageOptions& opt = {}) {
  if (!(opt.eq_tol > 0)) throw std::invalid_argument("run_sequential: eq_tol must be positive");
  Matrix rho = rho0.matrix();
  std::vector<double> times;
  for (const auto& st : stages) {
    if (st.generator.reg() != rho0.reg()) throw register_mismatch("run_sequential: stage '" + st.name + "' register differs");
    const double rate = st.generator.min_rate();
    if (rate == 0) {
      times.push_back(0);
      continue;
    }
    const double chunk = opt.chunk_factor / rate, budget = opt.budget_factor / rate;
    Propagator prop(st.generator, chunk, opt.evolve_tol);
    double t = 0;
    while (trace_norm_bound(prop.generator_action(rho)) > opt.eq_tol) {
      if (t >= budget) throw convergence_error("run_sequential: stage '" + st.name + "' did not equilibrate");
      rho = prop.apply(rho);
      t += chunk;
    }
    times.push_back(t);
  }
  return {DensityMatrix(rho0.reg(), std::move(rho), 1e-6), std::move(times)};
}

struct TransferRun {
  std::size_t n = 3;
  Vector phi_in;
  std::vector<std::string> stage_names;
  double eq_tol = 1e-9;
  std::vector<double> stage_times;
  std::string output;
  DensityMatrix rho_final;
  double fidelity = 0;
};

/// <phi_in| tr_{all but output}(rho_final) |phi_in>.
inline double transfer_fidelity(const TransferRun& run) {
  const std::vector<std::string> keep{run.output};
  return fidelity_with_pure(partial_trace(run.rho_final, keep), run.phi_in / run.phi_in.norm());
}

namespace detail {
inline TransferRun execute(std::size_t n, const Vector& phi_in, const QubitRegister& reg, const std::vector<Stage>& stages,
                           const std::string& output, const StageOptions& opt) {
  // Logical sites come first, ancillas start in |0>.
  Vector psi = prepare_cluster(phi_in, n);
  psi = kron(psi, qubit::basis_vector(reg.size() - n, 0));
  const auto rho0 = DensityMatrix::pure(reg, psi);
  auto res = run_sequential(stages, rho0, opt);
  TransferRun run{n, phi_in, {}, opt.eq_tol, std::move(res.times), output, std::move(res.rho), 0.0};
  for (const auto& s : stages) run.stage_names.push_back(s.name);
  run.fidelity = transfer_fidelity(run);
  return run;
}
}  // namespace detail

/// Three-qubit protocol: stage A then stage B (or reversed, as a negative control).
inline TransferRun run_transfer_3qubit(const Vector& phi_in, double omega = 1.0, const StageOptions& opt = {},
                                       bool reversed = false) {
  auto t = build_transfer_3qubit(omega);
  std::vector<Stage> stages{t.A, t.B};
  if (reversed) std::swap(stages[0], stages[1]);
  return detail::execute(3, phi_in, t.reg, stages, "q3", opt);
}

/// Odd-n protocol on either layout (build_transfer_nqubit or build_transfer_compressed).
inline TransferRun run_transfer(const TransferN& proto, const Vector& phi_in, const StageOptions& opt = {}) {
  if (proto.reg.size() > kMaxDenseQubits)
    throw std::length_error("run_transfer: register of " + std::to_string(proto.reg.size()) + " qubits exceeds the dense cap");
  return detail::execute(proto.n, phi_in, proto.reg, proto.stages, proto.output, opt);
}

// ---------------------------------------------------------------------------
// Clock-triggered composite.
// ---------------------------------------------------------------------------

struct TriggeredComposite {
  QubitRegister reg;     // protocol sites followed by timer sites T{i}_1..T{i}_N
  Liouvillian generator;
  DensityMatrix initial;
};

/// Stage i is conditioned on the last qubit of timer i being |0>; all timers
/// share the rate gamma.
inline TriggeredComposite build_timer_triggered(const std::vector<Stage>& stages, const std::vector<std::size_t>& timer_lengths,
                                                double gamma, const DensityMatrix& rho0) {
  if (stages.size() != timer_lengths.size()) throw std::invalid_argument("timer_triggered: one timer per stage");
  QubitRegister reg = rho0.reg();
  std::vector<std::string> prefixes;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    prefixes.push_back("T" + std::to_string(i + 1) + "_");
    reg = reg.concat(timer_register(timer_lengths[i], prefixes.back()));
  }
  if (reg.size() > kMaxDenseQubits) throw std::length_error("timer_triggered: composite register too large");
  Liouvillian L(reg);
  DensityMatrix init = rho0;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (stages[i].generator.reg() != rho0.reg()) throw register_mismatch("timer_triggered: stage register differs");
    const TimerConfig cfg{timer_lengths[i], gamma};
    L = L + build_timer(cfg, prefixes[i]).lift(reg);
    const auto trigger = prefixes[i] + std::to_string(timer_lengths[i]);
    L = L + build_conditional(stages[i].generator.lift(reg), trigger, 0);
    init = tensor(init, timer_initial_state(timer_lengths[i], prefixes[i]));
  }
  if (init.reg() != reg) throw std::logic_error("timer_triggered: register assembly mismatch");
  return {reg, std::move(L), std::move(init)};
}

/// The composite evolved once to time t, timers traced out.
inline DensityMatrix run_timer_triggered(const std::vector<Stage>& stages, const std::vector<std::size_t>& timer_lengths,
                                         double gamma, const DensityMatrix& rho0, double t, double tol = -1.0) {
  const auto c = build_timer_triggered(stages, timer_lengths, gamma, rho0);
  const auto rho_t = evolve(c.generator, c.initial, t, tol);
  return partial_trace(rho_t, std::span<const std::string>(rho0.reg().labels()));
}

}  // namespace dqt

#endif  // DQT_TRANSFER_HPP
