#ifndef DQT_LIOUVILLIAN_HPP
#define DQT_LIOUVILLIAN_HPP

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>

#include "dqt/density.hpp"

namespace dqt {

using SparseMatrix = Eigen::SparseMatrix<complex>;

/// Largest superoperator dimension we build densely (register of 6 qubits).
inline constexpr std::size_t kMaxDenseSuperoperatorDim = std::size_t{1} << 12;

/// A jump operator L with its rate folded in (L = sqrt(rate) * A). Stored as a
/// small dense matrix on its support plus the embedding into the full register.
class LindbladOperator {
 public:
  LindbladOperator(QubitRegister reg, std::vector<std::string> support, Matrix local, std::string tag = {})
      : reg_(std::move(reg)), support_(std::move(support)), local_(std::move(local)), tag_(std::move(tag)) {
    if (support_.empty()) throw std::invalid_argument("Lindblad operator needs a nonempty support");
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << support_.size());
    if (local_.rows() != d || local_.cols() != d)
      throw std::invalid_argument("local operator shape does not match support size");
    if (!local_.allFinite()) throw std::invalid_argument("Lindblad operator has non-finite entries");
    for (const auto& s : support_)
      if (!reg_.contains(s)) throw register_mismatch("support site '" + s + "' not in register");
    QubitRegister check(support_);  // rejects duplicate support labels
    (void)check;
    if (reg_.size() <= kMaxDenseQubits) build_full();
  }

  const QubitRegister& reg() const { return reg_; }
  const std::vector<std::string>& support() const { return support_; }
  const Matrix& local() const { return local_; }
  /// Embedding into the full register (only formed for registers that fit
  /// dense density matrices).
  const SparseMatrix& matrix() const {
    if (reg_.size() > kMaxDenseQubits) throw std::length_error("register too large for a full operator matrix");
    return full_;
  }
  const std::string& tag() const { return tag_; }

  /// Squared spectral norm, i.e. the largest jump rate this operator induces.
  double rate() const {
    Eigen::JacobiSVD<Matrix> svd(local_);
    double s = svd.singularValues()(0);
    return s * s;
  }

  /// Same operator embedded in a register that contains all support labels.
  LindbladOperator lift(const QubitRegister& larger) const { return {larger, support_, local_, tag_}; }

 private:
  void build_full() {
    const auto bits = detail::bits_for(reg_, support_);
    const auto ebits = detail::complement_bits(reg_, bits);
    const std::size_t dl = std::size_t{1} << bits.size();
    const std::size_t de = std::size_t{1} << ebits.size();
    std::vector<Eigen::Triplet<complex>> trips;
    for (std::size_t c = 0; c < dl; ++c)
      for (std::size_t r = 0; r < dl; ++r) {
        const complex v = local_(r, c);
        if (v == complex(0.0)) continue;
        const std::size_t ro = detail::deposit_bits(r, bits), co = detail::deposit_bits(c, bits);
        for (std::size_t e = 0; e < de; ++e) {
          const std::size_t eo = detail::deposit_bits(e, ebits);
          trips.emplace_back(static_cast<int>(ro | eo), static_cast<int>(co | eo), v);
        }
      }
    full_ = SparseMatrix(reg_.dim(), reg_.dim());
    full_.setFromTriplets(trips.begin(), trips.end());
    full_.makeCompressed();
  }

  QubitRegister reg_;
  std::vector<std::string> support_;
  Matrix local_;
  std::string tag_;
  SparseMatrix full_;
};

/// Purely dissipative generator  L(rho) = sum_j L_j rho L_j^+ - 1/2 {L_j^+ L_j, rho}.
class Liouvillian {
 public:
  explicit Liouvillian(QubitRegister reg, std::vector<LindbladOperator> ops = {}) : reg_(std::move(reg)) {
    for (auto& op : ops) add(std::move(op));
  }

  void add(LindbladOperator op) {
    if (op.reg() != reg_) throw register_mismatch("Lindblad operator '" + op.tag() + "' lives on a different register");
    ops_.push_back(std::move(op));
    cache_.reset();
  }

  const QubitRegister& reg() const { return reg_; }
  const std::vector<LindbladOperator>& ops() const { return ops_; }
  bool empty() const { return ops_.empty(); }
  std::size_t size() const { return ops_.size(); }

  /// Union of operator supports, in register order.
  std::vector<std::string> support() const {
    std::vector<std::string> out;
    for (const auto& l : reg_.labels())
      for (const auto& op : ops_)
        if (std::find(op.support().begin(), op.support().end(), l) != op.support().end()) {
          out.push_back(l);
          break;
        }
    return out;
  }

  double max_rate() const {
    double r = 0;
    for (const auto& op : ops_) r = std::max(r, op.rate());
    return r;
  }
  double min_rate() const {
    double r = 0;
    for (const auto& op : ops_) {
      const double x = op.rate();
      if (x > 0 && (r == 0 || x < r)) r = x;
    }
    return r;
  }

  /// Upper bound on the induced trace-norm of the generator.
  double norm_bound() const {
    double s = 0;
    for (const auto& op : ops_) s += op.rate();
    return 2.0 * s;
  }

  Liouvillian lift(const QubitRegister& larger) const {
    Liouvillian out(larger);
    for (const auto& op : ops_) out.add(op.lift(larger));
    return out;
  }

  Matrix apply(const Matrix& rho) const {
    const auto& c = cached();
    Matrix out = -0.5 * (c.k * rho + rho * c.k);
    for (std::size_t j = 0; j < ops_.size(); ++j) {
      Matrix lr = c.l[j] * rho;
      out.noalias() += (c.l[j] * lr.adjoint()).adjoint();  // L rho L^+
    }
    return out;
  }

 private:
  struct Cache {
    std::vector<SparseMatrix> l, ladj;
    SparseMatrix k;
  };
  const Cache& cached() const {
    if (!cache_) {
      auto c = std::make_shared<Cache>();
      c->k = SparseMatrix(reg_.dim(), reg_.dim());
      for (const auto& op : ops_) {
        c->l.push_back(op.matrix());
        c->ladj.push_back(SparseMatrix(op.matrix().adjoint()));
        c->k += c->ladj.back() * c->l.back();
      }
      c->k.makeCompressed();
      cache_ = std::move(c);
    }
    return *cache_;
  }

  QubitRegister reg_;
  std::vector<LindbladOperator> ops_;
  mutable std::shared_ptr<const Cache> cache_;
};

/// Combine two generators on the same register.
inline Liouvillian operator+(const Liouvillian& a, const Liouvillian& b) {
  if (a.reg() != b.reg()) throw register_mismatch("cannot add generators on different registers");
  Liouvillian out = a;
  for (const auto& op : b.ops()) out.add(op);
  return out;
}

inline Matrix apply_generator(const Liouvillian& L, const DensityMatrix& rho, double herm_tol = -1.0) {
  if (L.reg() != rho.reg()) throw register_mismatch("apply_generator: register mismatch");
  if (herm_tol < 0) herm_tol = 1e3 * default_tolerance(rho.dim());
  if (detail::hermitian_defect(rho.matrix()) > herm_tol) throw std::invalid_argument("apply_generator: input not Hermitian");
  return L.apply(rho.matrix());
}

/// Dense superoperator of `ops` restricted to the sites `sites` (column-major
/// vectorization: vec(A X B) = (B^T kron A) vec(X)).
inline Matrix local_superoperator(const Liouvillian& L, const std::vector<std::string>& sites) {
  const std::size_t k = sites.size();
  const std::size_t d = std::size_t{1} << k;
  if (d * d > kMaxDenseSuperoperatorDim) throw std::length_error("superoperator exceeds dense cap");
  QubitRegister sub(sites);
  Matrix s = Matrix::Zero(d * d, d * d);
  const Matrix id = Matrix::Identity(d, d);
  for (const auto& op : L.ops()) {
    const Matrix a = LindbladOperator(sub, op.support(), op.local()).matrix();
    const Matrix kk = a.adjoint() * a;
    s += Eigen::kroneckerProduct(a.conjugate(), a).eval();
    s -= 0.5 * Eigen::kroneckerProduct(id, kk).eval();
    s -= 0.5 * Eigen::kroneckerProduct(kk.transpose(), id).eval();
  }
  return s;
}

inline Matrix superoperator(const Liouvillian& L) { return local_superoperator(L, L.reg().labels()); }

}  // namespace dqt

#endif  // DQT_LIOUVILLIAN_HPP
