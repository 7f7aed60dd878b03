#include <cmath>
#include <random>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "dqt/dqt.hpp"

using namespace dqt;

namespace {

// Independent superoperator: sum_j conj(L)⊗L - 1/2 I⊗(L^+L) - 1/2 (L^+L)^T⊗I.
Matrix reference_superoperator(const Liouvillian& L) {
  const auto d = static_cast<Eigen::Index>(L.reg().dim());
  const Matrix id = Matrix::Identity(d, d);
  Matrix s = Matrix::Zero(d * d, d * d);
  for (const auto& op : L.ops()) {
    const Matrix a = Matrix(op.matrix());
    const Matrix k = a.adjoint() * a;
    s += kron(a.conjugate(), a) - 0.5 * kron(id, k) - 0.5 * kron(k.transpose(), id);
  }
  return s;
}

Matrix reference_evolve(const Liouvillian& L, const Matrix& rho, double t) {
  const Matrix e = (t * reference_superoperator(L)).exp();
  const Vector v = e * Eigen::Map<const Vector>(rho.data(), rho.size());
  return Eigen::Map<const Matrix>(v.data(), rho.rows(), rho.cols());
}

Matrix random_operator(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(dim, dim);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = complex(g(rng), g(rng)) * 0.5;
  return m;
}

DensityMatrix random_state(const QubitRegister& reg, std::mt19937_64& rng) {
  const Matrix a = random_operator(reg.dim(), rng);
  Matrix r = a * a.adjoint();
  r /= r.trace();
  return {reg, r};
}

Liouvillian random_liouvillian(const QubitRegister& reg, std::mt19937_64& rng, std::size_t nops) {
  Liouvillian L(reg);
  const auto& labels = reg.labels();
  for (std::size_t j = 0; j < nops; ++j) {
    const std::size_t a = j % labels.size(), b = (j + 1) % labels.size();
    if (a == b)
      L.add({reg, {labels[a]}, random_operator(2, rng), "r" + std::to_string(j)});
    else
      L.add({reg, {labels[a], labels[b]}, random_operator(4, rng), "r" + std::to_string(j)});
  }
  return L;
}

Liouvillian damping(double omega) {
  QubitRegister reg({"q"});
  Liouvillian L(reg);
  L.add({reg, {"q"}, std::sqrt(omega) * qubit::flip(0, 1), "ad"});
  return L;
}

}  // namespace

TEST(QubitRegister, RejectsDuplicateLabels) { EXPECT_THROW(QubitRegister({"a", "a"}), std::invalid_argument); }

TEST(QubitRegister, DimensionAndBitOrder) {
  QubitRegister r({"x", "y", "z"});
  EXPECT_EQ(r.dim(), 8U);
  EXPECT_EQ(r.bit_of("x"), 2U);
  EXPECT_EQ(r.bit_of("z"), 0U);
  EXPECT_THROW(r.index_of("w"), std::out_of_range);
}

TEST(DensityMatrix, ValidatesInput) {
  QubitRegister r({"q"});
  Matrix m = Matrix::Identity(2, 2);
  EXPECT_THROW(DensityMatrix(r, m), std::invalid_argument);  // trace 2
  Matrix nh(2, 2);
  nh << 0.5, 0.3, 0.0, 0.5;
  EXPECT_THROW(DensityMatrix(r, nh), std::invalid_argument);
  EXPECT_THROW(DensityMatrix(r, Matrix::Identity(4, 4) / 4.0), register_mismatch);
  std::vector<std::string> many;
  for (int i = 0; i < 13; ++i) many.push_back("q" + std::to_string(i));
  EXPECT_THROW(DensityMatrix(QubitRegister(many), Matrix(2, 2)), std::length_error);
}

TEST(LindbladOperator, RejectsLabelsOutsideRegister) {
  QubitRegister r({"a", "b"});
  EXPECT_THROW(LindbladOperator(r, {"c"}, qubit::flip(0, 1), "x"), register_mismatch);
}

TEST(ApplyGenerator, EmptyGeneratorGivesZero) {
  QubitRegister r({"a", "b"});
  std::mt19937_64 rng(1);
  EXPECT_EQ(apply_generator(Liouvillian(r), random_state(r, rng)).norm(), 0.0);
}

TEST(ApplyGenerator, AmplitudeDampingOnExcitedState) {
  const double omega = 0.7;
  const auto L = damping(omega);
  const auto rho = DensityMatrix::basis(L.reg(), std::vector<int>{1});
  Matrix expect(2, 2);
  expect << omega, 0, 0, -omega;
  EXPECT_LT((apply_generator(L, rho) - expect).norm(), 1e-15);
}

TEST(ApplyGenerator, MatchesReferenceSuperoperatorAndIsTraceless) {
  std::mt19937_64 rng(7);
  QubitRegister r({"a", "b", "c"});
  const auto L = random_liouvillian(r, rng, 4);
  const auto rho = random_state(r, rng);
  const Matrix out = apply_generator(L, rho);
  const Vector ref = reference_superoperator(L) * Eigen::Map<const Vector>(rho.matrix().data(), rho.matrix().size());
  EXPECT_LT((Eigen::Map<const Vector>(out.data(), out.size()) - ref).norm(), 1e-12);
  EXPECT_LT(std::abs(out.trace()), 1e-12);
  EXPECT_LT((superoperator(L) - reference_superoperator(L)).norm(), 1e-12);
}

TEST(ApplyGenerator, Errors) {
  const auto L = damping(1.0);
  EXPECT_THROW(apply_generator(L, DensityMatrix::maximally_mixed(QubitRegister({"p"}))), register_mismatch);
}

TEST(Evolve, ZeroTimeIsIdentity) {
  std::mt19937_64 rng(2);
  QubitRegister r({"a", "b"});
  const auto rho = random_state(r, rng);
  EXPECT_EQ((evolve(random_liouvillian(r, rng, 2), rho, 0.0).matrix() - rho.matrix()).norm(), 0.0);
}

TEST(Evolve, AmplitudeDampingDecay) {
  const auto L = damping(1.3);
  const auto rho = DensityMatrix::basis(L.reg(), std::vector<int>{1});
  for (double t : {0.1, 1.0, 5.0}) EXPECT_NEAR(evolve(L, rho, t).population(1), std::exp(-1.3 * t), 1e-12);
}

TEST(Evolve, RejectsNegativeTimeAndMismatch) {
  const auto L = damping(1.0);
  EXPECT_THROW(evolve(L, DensityMatrix::basis(L.reg(), std::vector<int>{0}), -1.0), std::invalid_argument);
  EXPECT_THROW(evolve(L, DensityMatrix::basis(QubitRegister({"z"}), std::vector<int>{0}), 1.0), register_mismatch);
}

TEST(Evolve, MatchesDenseExponentialLocalAndMatrixFree) {
  std::mt19937_64 rng(11);
  // 3 qubits uses the local propagator, 5 qubits the matrix-free stepper.
  for (std::size_t n : {3, 5}) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back("s" + std::to_string(i));
    QubitRegister r(labels);
    const auto L = random_liouvillian(r, rng, n);
    const auto rho = random_state(r, rng);
    for (double t : {0.3, 1.5}) {
      const Matrix ref = reference_evolve(L, rho.matrix(), t);
      const auto out = evolve(L, rho, t);
      EXPECT_LT(trace_norm_hermitian(out.matrix() - ref), 1e-9) << "n=" << n << " t=" << t;
      EXPECT_LT(out.trace_error(), 1e-9);
      EXPECT_GT(out.min_eigenvalue(), -1e-9);
    }
  }
}

TEST(Evolve, ConditionalDecayOfMixedInput) {
  // L^cond = sqrt(g)|0><1| (x) |1><1| on (1-e)|1,0><1,0| + e|1,1><1,1|.
  // Brute-force superoperator exponential gives
  // (1-e)|10><10| + e e^{-gt}|11><11| + e(1-e^{-gt})|01><01|.
  QubitRegister r({"a", "b"});
  const double g = 0.8, e = 0.1, t = 1.7;
  Liouvillian L(r);
  L.add({r, {"a", "b"}, std::sqrt(g) * kron(qubit::flip(0, 1), qubit::flip(1, 1)), "cond"});
  Matrix rho = Matrix::Zero(4, 4);
  rho(2, 2) = 1 - e;
  rho(3, 3) = e;
  const auto out = evolve(L, DensityMatrix(r, rho), t);
  Matrix expect = Matrix::Zero(4, 4);
  expect(2, 2) = 1 - e;
  expect(3, 3) = e * std::exp(-g * t);
  expect(1, 1) = e * (1 - std::exp(-g * t));
  EXPECT_LT((out.matrix() - expect).norm(), 1e-12);
  EXPECT_LT((expect - reference_evolve(L, rho, t)).norm(), 1e-12);
}

TEST(EvolveProperties, SemigroupTracePositivityContractivity) {
  std::mt19937_64 rng(5);
  QubitRegister r({"a", "b", "c"});
  for (int trial = 0; trial < 4; ++trial) {
    const auto L = random_liouvillian(r, rng, 3);
    const auto rho = random_state(r, rng), sigma = random_state(r, rng);
    const double s = 0.4, t = 0.9, tol = default_tolerance(r.dim());
    const auto two = evolve(L, evolve(L, rho, s), t);
    const auto one = evolve(L, rho, s + t);
    EXPECT_LE(trace_distance(two, one), 10 * tol);
    EXPECT_LE(one.trace_error(), 10 * tol);
    EXPECT_GE(one.min_eigenvalue(), -10 * tol);
    EXPECT_LE(trace_distance(one, evolve(L, sigma, s + t)), trace_distance(rho, sigma) + 10 * tol);
  }
}

TEST(SteadyState, AmplitudeDampingUniqueGroundState) {
  const auto ss = steady_state(damping(1.0));
  ASSERT_EQ(ss.size(), 1U);
  EXPECT_NEAR(ss[0].population(0), 1.0, 1e-10);
}

TEST(SteadyState, InitializerFamily) {
  // The kernel is 4-dimensional: X_c (x) |00><00| for any 2x2 X_c. Its
  // diagonal part is the rho_beta (x) |00><00| family.
  const auto L = build_initializer({2, 1.0, 1.5});
  const auto ss = steady_state(L);
  EXPECT_EQ(ss.size(), 4U);
  for (const auto& rho : ss) {
    const auto aux = partial_trace(rho, {"a1", "a2"});
    EXPECT_NEAR(aux.population(0), 1.0, 1e-9);
    EXPECT_LE(apply_generator(L, rho).cwiseAbs().maxCoeff(), 1e-9);
  }
  for (double beta : {0.0, 0.3, 1.0}) {
    Matrix m = Matrix::Zero(8, 8);
    m(0, 0) = beta;
    m(4, 4) = 1 - beta;
    EXPECT_LT(apply_generator(L, DensityMatrix(L.reg(), m)).norm(), 1e-14);
  }
}

TEST(SteadyState, TimerThreeQubits) {
  // Kernel of the 64x64 superoperator: all operators on span{000, 100, 110, 111}.
  const auto L = build_timer({3, 1.0});
  EXPECT_EQ(stationary_projector(L).dim(), 16U);
  for (int idx : {0, 4, 6, 7}) {
    Matrix m = Matrix::Zero(8, 8);
    m(idx, idx) = 1;
    EXPECT_LT(apply_generator(L, DensityMatrix(L.reg(), m)).norm(), 1e-14);
  }
  for (const auto& rho : steady_state(L)) EXPECT_LE(apply_generator(L, rho).norm(), 1e-9);
}

TEST(SteadyState, KernelCapAndEmptyGenerator) {
  EXPECT_THROW(stationary_projector(build_timer({3, 1.0}), {1e-9, 8}), degenerate_kernel_error);
  EXPECT_THROW(steady_state(Liouvillian(QubitRegister({"a"}))), std::invalid_argument);
}

TEST(TraceDistance, Examples) {
  QubitRegister r({"q"});
  const auto z0 = DensityMatrix::basis(r, std::vector<int>{0}), z1 = DensityMatrix::basis(r, std::vector<int>{1});
  EXPECT_NEAR(trace_distance(z0, z0), 0.0, 1e-15);
  EXPECT_NEAR(trace_distance(z0, z1), 1.0, 1e-15);
  EXPECT_NEAR(trace_distance(z0, DensityMatrix::maximally_mixed(r)), 0.5, 1e-15);
  EXPECT_THROW(trace_distance(z0, DensityMatrix::basis(QubitRegister({"p"}), std::vector<int>{0})), register_mismatch);
}

TEST(TraceDistance, Symmetric) {
  std::mt19937_64 rng(3);
  QubitRegister r({"a", "b"});
  const auto a = random_state(r, rng), b = random_state(r, rng);
  EXPECT_NEAR(trace_distance(a, b), trace_distance(b, a), 1e-14);
  EXPECT_LE(trace_distance(a, b), 1.0);
}

TEST(PartialTrace, ProductAndBell) {
  std::mt19937_64 rng(4);
  const auto a = random_state(QubitRegister({"a"}), rng), b = random_state(QubitRegister({"b"}), rng);
  EXPECT_LT((partial_trace(tensor(a, b), {"a"}).matrix() - a.matrix()).norm(), 1e-14);
  EXPECT_LT((partial_trace(tensor(a, b), {"b"}).matrix() - b.matrix()).norm(), 1e-14);
  Vector bell = Vector::Zero(4);
  bell(0) = bell(3) = 1 / std::sqrt(2.0);
  const auto rho = DensityMatrix::pure(QubitRegister({"x", "y"}), bell);
  EXPECT_LT((partial_trace(rho, {"y"}).matrix() - Matrix::Identity(2, 2) / 2.0).norm(), 1e-15);
  const std::vector<std::string> none;
  EXPECT_THROW(partial_trace(rho, none), std::invalid_argument);
}

TEST(PartialTrace, ClusterStateMatchesIndexContraction) {
  const Vector psi = prepare_cluster(bloch_state(0.9, 0.4), 3);
  const auto rho = DensityMatrix::pure(QubitRegister({"1", "2", "3"}), psi);
  // rho_1[i][j] = sum_{b,c} psi[i b c] conj(psi[j b c])
  Matrix ref = Matrix::Zero(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) ref(i, j) += psi(4 * i + 2 * b + c) * std::conj(psi(4 * j + 2 * b + c));
  EXPECT_LT((partial_trace(rho, {"1"}).matrix() - ref).norm(), 1e-15);
  // Keeping {3, 1} returns sites in register order (1, 3).
  const auto r13 = partial_trace(rho, {"3", "1"});
  EXPECT_EQ(r13.reg().labels(), (std::vector<std::string>{"1", "3"}));
}

TEST(Fidelity, Examples) {
  QubitRegister r({"q"});
  const Vector psi = bloch_state(1.2, 0.5);
  Vector perp(2);
  perp << -std::conj(psi(1)), std::conj(psi(0));
  EXPECT_NEAR(fidelity_with_pure(DensityMatrix::pure(r, psi), psi), 1.0, 1e-15);
  EXPECT_NEAR(fidelity_with_pure(DensityMatrix::pure(r, perp), psi), 0.0, 1e-15);
  EXPECT_NEAR(fidelity_with_pure(DensityMatrix::maximally_mixed(r), psi), 0.5, 1e-15);
  EXPECT_THROW(fidelity_with_pure(DensityMatrix::maximally_mixed(r), Vector(2 * psi)), std::invalid_argument);
}

TEST(Serialization, RoundTrip) {
  std::mt19937_64 rng(9);
  QubitRegister r({"a", "b"});
  const auto rho = random_state(r, rng);
  const auto back = density_from_json(json::parse(to_json(rho).dump()));
  EXPECT_EQ(back.reg(), r);
  EXPECT_LT((back.matrix() - rho.matrix()).norm(), 1e-15);

  const auto L = build_initializer({2, 1.0, 2.0});
  const auto L2 = liouvillian_from_json(json::parse(to_json(L).dump()));
  ASSERT_EQ(L2.size(), L.size());
  EXPECT_LT((superoperator(L2) - superoperator(L)).norm(), 1e-15);
  const auto op = lindblad_from_json(to_json(L.ops()[3]));
  EXPECT_EQ(op.tag(), L.ops()[3].tag());
  EXPECT_EQ(op.support(), L.ops()[3].support());
  EXPECT_THROW(density_from_json(json::parse(R"({"labels":["a"],"matrix":[[[1,0]]]})")), register_mismatch);
}
