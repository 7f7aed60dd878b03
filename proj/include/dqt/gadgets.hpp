#ifndef DQT_GADGETS_HPP
#define DQT_GADGETS_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dqt/liouvillian.hpp"

namespace dqt {

/// Single-qubit building blocks.
namespace qubit {
inline Matrix outer(const Vector& a, const Vector& b) { return a * b.adjoint(); }
inline Vector ket0() { return Vector::Unit(2, 0); }
inline Vector ket1() { return Vector::Unit(2, 1); }
inline Vector plus() { return (ket0() + ket1()) / std::sqrt(2.0); }
inline Vector minus() { return (ket0() - ket1()) / std::sqrt(2.0); }
inline Vector ket(int b) { return b ? ket1() : ket0(); }
inline Matrix identity() { return Matrix::Identity(2, 2); }
inline Matrix pauli_x() { Matrix m(2, 2); m << 0, 1, 1, 0; return m; }
inline Matrix pauli_z() { Matrix m(2, 2); m << 1, 0, 0, -1; return m; }
inline Matrix hadamard() { Matrix m(2, 2); m << 1, 1, 1, -1; return m / std::sqrt(2.0); }
/// |a><b| on one qubit.
inline Matrix flip(int a, int b) { return outer(ket(a), ket(b)); }
/// Computational basis vector of `k` qubits with value `v` (MSB first).
inline Vector basis_vector(std::size_t k, std::size_t v) { return Vector::Unit(static_cast<Eigen::Index>(std::size_t{1} << k), static_cast<Eigen::Index>(v)); }
}  // namespace qubit

inline Matrix kron(const Matrix& a, const Matrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }
inline Vector kron(const Vector& a, const Vector& b) { return Eigen::kroneckerProduct(a, b).eval(); }

// ---------------------------------------------------------------------------
// Initializer: star of M auxiliary qubits around a central qubit c.
// ---------------------------------------------------------------------------

struct InitializerConfig {
  std::size_t M = 1;
  double omega = 1.0;  // amplitude damping on the auxiliaries
  double Gamma = 1.0;  // conditional preparation of c

  void validate() const {
    if (M < 1) throw std::invalid_argument("initializer: M must be >= 1");
    if (!(omega > 0) || !(Gamma > 0)) throw std::invalid_argument("initializer: rates must be positive");
  }
};

inline QubitRegister initializer_register(std::size_t M) {
  std::vector<std::string> l{"c"};
  for (std::size_t k = 1; k <= M; ++k) l.push_back("a" + std::to_string(k));
  return QubitRegister(std::move(l));
}

/// L^ad_k = sqrt(omega)|0_k><1_k| and L^cp_k = sqrt(Gamma)|0_c><1_c| (x) |1_k><1_k|.
inline Liouvillian build_initializer(const InitializerConfig& cfg) {
  cfg.validate();
  const auto reg = initializer_register(cfg.M);
  Liouvillian L(reg);
  for (std::size_t k = 1; k <= cfg.M; ++k) {
    const auto a = "a" + std::to_string(k);
    L.add({reg, {a}, std::sqrt(cfg.omega) * qubit::flip(0, 1), "ad_" + std::to_string(k)});
  }
  for (std::size_t k = 1; k <= cfg.M; ++k) {
    const auto a = "a" + std::to_string(k);
    L.add({reg, {"c", a}, std::sqrt(cfg.Gamma) * kron(qubit::flip(0, 1), qubit::flip(1, 1)), "cp_" + std::to_string(k)});
  }
  return L;
}

// ---------------------------------------------------------------------------
// Timer: line of N qubits; qubit j+1 decays when qubit j is |0>.
// ---------------------------------------------------------------------------

struct TimerConfig {
  std::size_t N = 2;
  double gamma = 1.0;

  void validate() const {
    if (N < 2) throw std::invalid_argument("timer: N must be >= 2");
    if (!(gamma > 0)) throw std::invalid_argument("timer: gamma must be positive");
  }
};

inline std::vector<std::string> timer_labels(std::size_t N, const std::string& prefix = "t") {
  std::vector<std::string> l;
  for (std::size_t j = 1; j <= N; ++j) l.push_back(prefix + std::to_string(j));
  return l;
}

inline QubitRegister timer_register(std::size_t N, const std::string& prefix = "t") {
  return QubitRegister(timer_labels(N, prefix));
}

/// L^cut_j = sqrt(gamma)|0_j><0_j| (x) |0_{j+1}><1_{j+1}|, j = 1..N-1.
inline Liouvillian build_timer(const TimerConfig& cfg, const std::string& prefix = "t") {
  cfg.validate();
  const auto reg = timer_register(cfg.N, prefix);
  const auto l = reg.labels();
  Liouvillian L(reg);
  for (std::size_t j = 0; j + 1 < cfg.N; ++j)
    L.add({reg, {l[j], l[j + 1]}, std::sqrt(cfg.gamma) * kron(qubit::flip(0, 0), qubit::flip(0, 1)),
           "cut_" + std::to_string(j + 1)});
  return L;
}

/// |0> (x) |1>^(N-1).
inline DensityMatrix timer_initial_state(std::size_t N, const std::string& prefix = "t") {
  if (N < 2) throw std::invalid_argument("timer: N must be >= 2");
  std::vector<int> bits(N, 1);
  bits[0] = 0;
  return DensityMatrix::basis(timer_register(N, prefix), bits);
}

// ---------------------------------------------------------------------------
// Dissipative measurement and conditioning.
// ---------------------------------------------------------------------------

/// Projective measurement of `sites` in the orthonormal `basis`, with outcome k
/// written to the registry as computational basis state k. Realized by the
/// jump operators sqrt(rate) |xi_k><xi_k| (x) |k><r| for every registry state r,
/// whose generator is  sum_k (P_k (x) |k><k|) tr_reg(rho) (P_k (x) |k><k|) - rho.
inline Liouvillian build_measurement(const QubitRegister& reg, const std::vector<std::string>& sites,
                                     const std::vector<Vector>& basis, const std::vector<std::string>& registry,
                                     double rate = 1.0) {
  const std::size_t ds = std::size_t{1} << sites.size();
  const std::size_t dr = std::size_t{1} << registry.size();
  if (sites.empty() || registry.empty()) throw std::invalid_argument("measurement: empty subsystem or registry");
  if (basis.size() != ds) throw std::invalid_argument("measurement: basis is incomplete");
  for (std::size_t i = 0; i < ds; ++i) {
    if (static_cast<std::size_t>(basis[i].size()) != ds) throw std::invalid_argument("measurement: basis vector has wrong size");
    for (std::size_t j = 0; j < ds; ++j) {
      const complex g = basis[i].dot(basis[j]);
      if (std::abs(g - complex(i == j ? 1.0 : 0.0)) > 1e-10) throw std::invalid_argument("measurement: basis is not orthonormal");
    }
  }
  if (dr < basis.size()) throw std::invalid_argument("measurement: registry too small for the number of outcomes");
  if (!(rate > 0)) throw std::invalid_argument("measurement: rate must be positive");
  std::vector<std::string> support = sites;
  support.insert(support.end(), registry.begin(), registry.end());
  Liouvillian L(reg);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const Matrix proj = basis[k] * basis[k].adjoint();
    for (std::size_t r = 0; r < dr; ++r) {
      const Matrix rec = qubit::basis_vector(registry.size(), k) * qubit::basis_vector(registry.size(), r).adjoint();
      L.add({reg, support, std::sqrt(rate) * kron(proj, rec), "meas_" + std::to_string(k) + "_from_" + std::to_string(r)});
    }
  }
  return L;
}

/// `target` (x) |s><s| on `trigger_site`: the operator only acts while the
/// trigger qubit is in |s>.
inline LindbladOperator build_conditional(const LindbladOperator& target, const std::string& trigger_site, int trigger_state) {
  if (!target.reg().contains(trigger_site)) throw register_mismatch("conditional: trigger site not in register");
  const auto& sup = target.support();
  if (std::find(sup.begin(), sup.end(), trigger_site) != sup.end())
    throw std::invalid_argument("conditional: trigger site overlaps the target support");
  if (trigger_state != 0 && trigger_state != 1) throw std::invalid_argument("conditional: trigger state must be 0 or 1");
  std::vector<std::string> support{trigger_site};
  support.insert(support.end(), sup.begin(), sup.end());
  return {target.reg(), std::move(support), kron(qubit::flip(trigger_state, trigger_state), target.local()),
          target.tag() + "|" + trigger_site + "=" + std::to_string(trigger_state)};
}

/// Every operator of `L` conditioned on `trigger_site` being |s>.
inline Liouvillian build_conditional(const Liouvillian& L, const std::string& trigger_site, int trigger_state) {
  Liouvillian out(L.reg());
  for (const auto& op : L.ops()) out.add(build_conditional(op, trigger_site, trigger_state));
  return out;
}

// ---------------------------------------------------------------------------
// Measurement-based state transfer.
// ---------------------------------------------------------------------------

struct Stage {
  std::string name;
  Liouvillian generator;
};

/// Three logical qubits q1..q3 and registry r4, r5. Stage A measures q1, q2 in
/// the X basis into r4, r5; stage B undoes the Pauli byproduct on q3 and
/// resets the registry. With S_j = CZ the byproduct for outcomes (s1, s2) is
/// X^{s2} Z^{s1}, so registry |0,1> is corrected by X and |1,0> by Z.
struct Transfer3 {
  QubitRegister reg;
  Stage A;
  Stage B;
};

inline Transfer3 build_transfer_3qubit(double omega) {
  if (!(omega > 0)) throw std::invalid_argument("transfer: omega must be positive");
  QubitRegister reg({"q1", "q2", "q3", "r4", "r5"});
  const double s = std::sqrt(omega);
  using namespace qubit;
  Liouvillian A(reg);
  for (int j = 1; j <= 2; ++j) {
    const auto q = "q" + std::to_string(j), r = "r" + std::to_string(j + 3);
    A.add({reg, {q, r}, s * kron(outer(plus(), plus()), flip(0, 1)), "A1_" + std::to_string(j)});
    A.add({reg, {q, r}, s * kron(outer(minus(), minus()), flip(1, 0)), "A2_" + std::to_string(j)});
  }
  auto reset_from = [](int a, int b) { return kron(flip(0, a), flip(0, b)); };
  Liouvillian B(reg);
  B.add({reg, {"q3", "r4", "r5"}, s * kron(pauli_x(), reset_from(0, 1)), "B1"});
  B.add({reg, {"q3", "r4", "r5"}, s * kron(pauli_z(), reset_from(1, 0)), "B2"});
  B.add({reg, {"q3", "r4", "r5"}, s * kron(pauli_z() * pauli_x(), reset_from(1, 1)), "B3"});
  return {reg, {"A", std::move(A)}, {"B", std::move(B)}};
}

/// Layout of the odd-n protocol: logical l1..ln, measurement m1..mn, and two
/// bus rows b1_1..b1_{n-1} (parity of odd-step outcomes, the Z byproduct) and
/// b2_1..b2_{n-1} (parity of even-step outcomes, the X byproduct).
struct TransferN {
  std::size_t n = 3;
  QubitRegister reg;
  std::vector<Stage> stages;  // executed in order
  std::string output;         // label of the logical output qubit
  std::string parity_z, parity_x;  // bus sites read by the recovery stage
};

namespace detail {

inline Liouvillian x_measurement(const QubitRegister& reg, const std::string& q, const std::string& m, double s) {
  using namespace qubit;
  Liouvillian L(reg);
  L.add({reg, {q, m}, s * kron(outer(plus(), plus()), flip(0, 1)), "m1_" + q});
  L.add({reg, {q, m}, s * kron(outer(minus(), minus()), flip(1, 0)), "m3_" + q});
  return L;
}

inline Liouvillian recovery(const QubitRegister& reg, const std::string& out, const std::string& bz, const std::string& bx,
                            double s) {
  using namespace qubit;
  auto reset_from = [](int z, int x) { return kron(flip(0, z), flip(0, x)); };
  Liouvillian L(reg);
  L.add({reg, {out, bz, bx}, s * kron(pauli_x(), reset_from(0, 1)), "B1"});
  L.add({reg, {out, bz, bx}, s * kron(pauli_z(), reset_from(1, 0)), "B2"});
  L.add({reg, {out, bz, bx}, s * kron(pauli_z() * pauli_x(), reset_from(1, 1)), "B3"});
  return L;
}

}  // namespace detail

inline TransferN build_transfer_nqubit(std::size_t n, double omega) {
  if (n < 3 || n % 2 == 0) throw std::invalid_argument("transfer: n must be odd and >= 3");
  if (!(omega > 0)) throw std::invalid_argument("transfer: omega must be positive");
  using namespace qubit;
  auto lab = [](const char* p, std::size_t j) { return std::string(p) + std::to_string(j); };
  std::vector<std::string> labels;
  for (std::size_t j = 1; j <= n; ++j) labels.push_back(lab("l", j));
  for (std::size_t j = 1; j <= n; ++j) labels.push_back(lab("m", j));
  for (std::size_t j = 1; j < n; ++j) labels.push_back(lab("b1_", j));
  for (std::size_t j = 1; j < n; ++j) labels.push_back(lab("b2_", j));
  QubitRegister reg(labels);
  const double s = std::sqrt(omega);

  TransferN t{n, reg, {}, lab("l", n), lab("b1_", n - 1), lab("b2_", n - 1)};
  for (std::size_t j = 1; j < n; ++j) {
    const auto m = lab("m", j);
    t.stages.push_back({"measure " + std::to_string(j), detail::x_measurement(reg, lab("l", j), m, s)});
    const auto bus = j % 2 == 1 ? lab("b1_", j) : lab("b2_", j);
    Liouvillian upd(reg);
    upd.add({reg, {m, bus}, s * kron(flip(0, 1), pauli_x()), "mt_" + std::to_string(j)});
    t.stages.push_back({"update " + std::to_string(j), std::move(upd)});
    if (j >= 2) {
      for (const char* row : {"b1_", "b2_"}) {
        const auto prev = lab(row, j - 1), cur = lab(row, j);
        Liouvillian sh(reg);
        // XOR-merge the running parity at j-1 into position j.
        sh.add({reg, {prev, cur}, s * kron(flip(0, 1), flip(1, 0)), "shift10_" + cur});
        sh.add({reg, {prev, cur}, s * kron(flip(0, 1), flip(0, 1)), "shift11_" + cur});
        t.stages.push_back({std::string("shift ") + row + std::to_string(j), std::move(sh)});
      }
    }
  }
  t.stages.push_back({"recover", detail::recovery(reg, t.output, t.parity_z, t.parity_x, s)});
  return t;
}

/// Compressed odd-n layout that fits dense simulation for n = 5: logical
/// l1..ln, a single reused measurement qubit m, and one parity qubit per
/// byproduct (pz, px) updated by XOR directly.
inline TransferN build_transfer_compressed(std::size_t n, double omega) {
  if (n < 3 || n % 2 == 0) throw std::invalid_argument("transfer: n must be odd and >= 3");
  if (!(omega > 0)) throw std::invalid_argument("transfer: omega must be positive");
  using namespace qubit;
  std::vector<std::string> labels;
  for (std::size_t j = 1; j <= n; ++j) labels.push_back("l" + std::to_string(j));
  labels.insert(labels.end(), {"m", "pz", "px"});
  QubitRegister reg(labels);
  const double s = std::sqrt(omega);
  TransferN t{n, reg, {}, "l" + std::to_string(n), "pz", "px"};
  for (std::size_t j = 1; j < n; ++j) {
    t.stages.push_back({"measure " + std::to_string(j), detail::x_measurement(reg, "l" + std::to_string(j), "m", s)});
    Liouvillian upd(reg);
    upd.add({reg, {"m", j % 2 == 1 ? "pz" : "px"}, s * kron(flip(0, 1), pauli_x()), "mt_" + std::to_string(j)});
    t.stages.push_back({"update " + std::to_string(j), std::move(upd)});
  }
  t.stages.push_back({"recover", detail::recovery(reg, t.output, "pz", "px", s)});
  return t;
}

}  // namespace dqt

#endif  // DQT_GADGETS_HPP
