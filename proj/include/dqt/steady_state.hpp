#ifndef DQT_STEADY_STATE_HPP
#define DQT_STEADY_STATE_HPP

#include <stdexcept>
#include <vector>

#include <Eigen/SVD>

#include "dqt/liouvillian.hpp"

namespace dqt {

struct SteadyStateOptions {
  double sv_threshold = 1e-9;  // relative to the largest singular value
  std::size_t max_kernel_dim = 64;
};

class degenerate_kernel_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Projector onto the stationary space, built from left and right kernels of
/// the superoperator: P0 = X (Y^+ X)^{-1} Y^+.
struct StationaryProjector {
  Matrix right;   // columns: vec of kernel elements
  Matrix left;    // columns: vec of conserved quantities
  Matrix gram_inv;

  Vector project(const Vector& v) const { return right * (gram_inv * (left.adjoint() * v)); }
  std::size_t dim() const { return static_cast<std::size_t>(right.cols()); }
};

inline StationaryProjector stationary_projector(const Liouvillian& L, const SteadyStateOptions& opt = {}) {
  if (L.empty()) throw std::invalid_argument("steady_state: generator has no operators");
  const Matrix s = superoperator(L);
  Eigen::BDCSVD<Matrix> svd(s, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = opt.sv_threshold * std::max(1.0, sv(0));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= cut) ++k;
  if (static_cast<std::size_t>(k) > opt.max_kernel_dim)
    throw degenerate_kernel_error("steady_state: kernel dimension " + std::to_string(k) + " exceeds cap");
  StationaryProjector p;
  p.right = svd.matrixV().rightCols(k);
  p.left = svd.matrixU().rightCols(k);
  p.gram_inv = (p.left.adjoint() * p.right).inverse();
  return p;
}

/// Basis of the stationary space made of valid density matrices. Candidates
/// (basis projectors first, then |i>+|j> and |i>+i|j> superpositions) are
/// pushed through the stationary projector and kept when linearly independent.
inline std::vector<DensityMatrix> steady_state(const Liouvillian& L, const SteadyStateOptions& opt = {}) {
  const auto proj = stationary_projector(L, opt);
  const std::size_t d = L.reg().dim();
  const std::size_t k = proj.dim();
  std::vector<DensityMatrix> out;
  std::vector<Vector> ortho;

  auto try_candidate = [&](const Vector& psi) {
    Matrix rho = psi * psi.adjoint();
    Vector v = Eigen::Map<Vector>(rho.data(), rho.size());
    Vector pv = proj.project(v);
    Vector r = pv;
    for (const auto& q : ortho) r -= q * q.dot(r);
    if (r.norm() < 1e-6 * std::max(1.0, pv.norm())) return;
    ortho.push_back(r.normalized());
    Matrix m = Eigen::Map<Matrix>(pv.data(), static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    m = 0.5 * (m + m.adjoint());
    m /= m.trace().real();
    out.emplace_back(L.reg(), std::move(m), 1e-6);
  };

  for (std::size_t i = 0; i < d && out.size() < k; ++i) try_candidate(Vector::Unit(d, i));
  const double r2 = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < d && out.size() < k; ++i)
    for (std::size_t j = i + 1; j < d && out.size() < k; ++j) {
      Vector a = Vector::Zero(d);
      a(i) = r2;
      a(j) = r2;
      try_candidate(a);
      if (out.size() >= k) break;
      a(j) = complex(0.0, r2);
      try_candidate(a);
    }
  return out;
}

}  // namespace dqt

#endif  // DQT_STEADY_STATE_HPP
