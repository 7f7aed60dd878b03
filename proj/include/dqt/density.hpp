#ifndef DQT_DENSITY_HPP
#define DQT_DENSITY_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dqt {

using complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Maximum number of qubits a register may label.
inline constexpr std::size_t kMaxRegisterQubits = 24;
/// Maximum number of qubits for which dense density matrices are formed.
inline constexpr std::size_t kMaxDenseQubits = 12;

/// Default numerical tolerance for a register of dimension `dim`.
inline double default_tolerance(std::size_t dim) { return dim <= 256 ? 1e-10 : 1e-8; }

class register_mismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ordered set of qubit labels. Site 0 is the most significant bit of a
/// computational basis index, i.e. operators compose as kron(site0, site1, ...).
class QubitRegister {
 public:
  QubitRegister() = default;
  explicit QubitRegister(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() > kMaxRegisterQubits)
      throw std::invalid_argument("register exceeds " + std::to_string(kMaxRegisterQubits) + " qubits");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_)
      if (!seen.insert(l).second) throw std::invalid_argument("duplicate register label '" + l + "'");
  }

  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return std::size_t{1} << labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

  bool contains(const std::string& label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
  }

  std::size_t index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw std::out_of_range("label '" + label + "' not in register");
    return static_cast<std::size_t>(it - labels_.begin());
  }

  /// Bit position (from the least significant end) of a site in a basis index.
  std::size_t bit_of(const std::string& label) const { return size() - 1 - index_of(label); }

  /// Register with `other`'s labels appended (labels must stay unique).
  QubitRegister concat(const QubitRegister& other) const {
    auto l = labels_;
    l.insert(l.end(), other.labels_.begin(), other.labels_.end());
    return QubitRegister(std::move(l));
  }

  friend bool operator==(const QubitRegister&, const QubitRegister&) = default;

 private:
  std::vector<std::string> labels_;
};

namespace detail {

// Scatter the bits of `local` (MSB first over `bits`) into a full index.
inline std::size_t deposit_bits(std::size_t local, std::span<const std::size_t> bits) {
  std::size_t out = 0;
  const std::size_t k = bits.size();
  for (std::size_t i = 0; i < k; ++i)
    if ((local >> (k - 1 - i)) & 1U) out |= std::size_t{1} << bits[i];
  return out;
}

inline std::size_t extract_bits(std::size_t full, std::span<const std::size_t> bits) {
  std::size_t out = 0;
  for (std::size_t b : bits) out = (out << 1) | ((full >> b) & 1U);
  return out;
}

inline std::vector<std::size_t> bits_for(const QubitRegister& reg, std::span<const std::string> labels) {
  std::vector<std::size_t> bits;
  bits.reserve(labels.size());
  for (const auto& l : labels) bits.push_back(reg.bit_of(l));
  return bits;
}

// Bits of `reg` not in `bits`, ordered MSB first.
inline std::vector<std::size_t> complement_bits(const QubitRegister& reg, std::span<const std::size_t> bits) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < reg.size(); ++i) {
    std::size_t b = reg.size() - 1 - i;
    if (std::find(bits.begin(), bits.end(), b) == bits.end()) out.push_back(b);
  }
  return out;
}

inline double hermitian_defect(const Matrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

}  // namespace detail

/// Trace-one Hermitian operator on a register. Positivity is checked on
/// demand (min_eigenvalue) since it needs a full eigendecomposition.
class DensityMatrix {
 public:
  DensityMatrix(QubitRegister reg, Matrix m, double tol = -1.0) : reg_(std::move(reg)), m_(std::move(m)) {
    if (reg_.size() > kMaxDenseQubits)
      throw std::length_error("density matrix register exceeds " + std::to_string(kMaxDenseQubits) + " qubits");
    const auto d = static_cast<Eigen::Index>(reg_.dim());
    if (m_.rows() != d || m_.cols() != d) throw register_mismatch("density matrix shape does not match register");
    if (tol < 0) tol = 1e3 * default_tolerance(reg_.dim());
    if (detail::hermitian_defect(m_) > tol) throw std::invalid_argument("density matrix is not Hermitian");
    if (std::abs(m_.trace() - complex(1.0)) > tol) throw std::invalid_argument("density matrix trace is not 1");
  }

  static DensityMatrix pure(QubitRegister reg, const Vector& psi) {
    return DensityMatrix(std::move(reg), psi * psi.adjoint());
  }

  /// Computational basis state given as one bit per site (site 0 first).
  static DensityMatrix basis(QubitRegister reg, std::span<const int> bits) {
    if (bits.size() != reg.size()) throw register_mismatch("bit pattern length differs from register size");
    std::size_t idx = 0;
    for (int b : bits) idx = (idx << 1) | static_cast<std::size_t>(b != 0);
    Matrix m = Matrix::Zero(reg.dim(), reg.dim());
    m(idx, idx) = 1.0;
    return DensityMatrix(std::move(reg), std::move(m));
  }

  static DensityMatrix maximally_mixed(QubitRegister reg) {
    const auto d = reg.dim();
    return DensityMatrix(std::move(reg), Matrix::Identity(d, d) / static_cast<double>(d));
  }

  const QubitRegister& reg() const { return reg_; }
  const Matrix& matrix() const { return m_; }
  std::size_t dim() const { return reg_.dim(); }

  double trace_error() const { return std::abs(m_.trace() - complex(1.0)); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m_ + m_.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  double purity() const { return (m_ * m_).trace().real(); }

  /// Population of a computational basis index.
  double population(std::size_t idx) const { return m_(idx, idx).real(); }

 private:
  QubitRegister reg_;
  Matrix m_;
};

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  const auto da = a.dim(), db = b.dim();
  Matrix m(da * db, da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j) m.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
  return DensityMatrix(a.reg().concat(b.reg()), std::move(m));
}

/// Trace norm of a Hermitian matrix.
inline double trace_norm_hermitian(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

/// Cheap upper bound on the trace norm: ||X||_1 <= sqrt(d) ||X||_F.
inline double trace_norm_bound(const Matrix& x) {
  return std::sqrt(static_cast<double>(x.rows())) * x.norm();
}

inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.reg() != sigma.reg()) throw register_mismatch("trace_distance: registers differ");
  return std::min(1.0, 0.5 * trace_norm_hermitian(rho.matrix() - sigma.matrix()));
}

/// Reduced state on `keep` (kept labels ordered as in the original register).
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::string> keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  const auto& reg = rho.reg();
  std::vector<std::string> kept;
  for (const auto& l : reg.labels())
    if (std::find(keep.begin(), keep.end(), l) != keep.end()) kept.push_back(l);
  for (const auto& l : keep)
    if (!reg.contains(l)) throw std::out_of_range("partial_trace: label '" + l + "' not in register");
  QubitRegister out_reg(kept);
  auto kbits = detail::bits_for(reg, kept);
  auto ebits = detail::complement_bits(reg, kbits);
  const std::size_t dk = std::size_t{1} << kbits.size();
  const std::size_t de = std::size_t{1} << ebits.size();
  std::vector<std::size_t> koff(dk), eoff(de);
  for (std::size_t i = 0; i < dk; ++i) koff[i] = detail::deposit_bits(i, kbits);
  for (std::size_t i = 0; i < de; ++i) eoff[i] = detail::deposit_bits(i, ebits);
  Matrix out = Matrix::Zero(dk, dk);
  const Matrix& m = rho.matrix();
  for (std::size_t e = 0; e < de; ++e)
    for (std::size_t c = 0; c < dk; ++c)
      for (std::size_t r = 0; r < dk; ++r) out(r, c) += m(koff[r] | eoff[e], koff[c] | eoff[e]);
  return DensityMatrix(std::move(out_reg), std::move(out));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<std::string> keep) {
  std::vector<std::string> k(keep);
  return partial_trace(rho, std::span<const std::string>(k));
}

/// <psi|rho|psi> for a normalized state vector psi.
inline double fidelity_with_pure(const DensityMatrix& rho, const Vector& psi, double tol = 1e-10) {
  if (static_cast<std::size_t>(psi.size()) != rho.dim()) throw register_mismatch("fidelity_with_pure: dimension mismatch");
  if (std::abs(psi.norm() - 1.0) > tol) throw std::invalid_argument("fidelity_with_pure: psi is not normalized");
  double f = (psi.adjoint() * rho.matrix() * psi)(0, 0).real();
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace dqt

#endif  // DQT_DENSITY_HPP
