#include <cmath>

#include <gtest/gtest.h>

#include "dqt/dqt.hpp"

using namespace dqt;

namespace {

std::size_t max_support(const Liouvillian& L) {
  std::size_t m = 0;
  for (const auto& op : L.ops()) m = std::max(m, op.support().size());
  return m;
}

// Basis permutation that swaps two sites.
Matrix swap_sites(const QubitRegister& reg, const std::string& a, const std::string& b) {
  const auto ba = reg.bit_of(a), bb = reg.bit_of(b);
  const auto d = static_cast<Eigen::Index>(reg.dim());
  Matrix p = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < reg.dim(); ++i) {
    std::size_t j = i & ~((std::size_t{1} << ba) | (std::size_t{1} << bb));
    j |= ((i >> ba) & 1U) << bb;
    j |= ((i >> bb) & 1U) << ba;
    p(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1;
  }
  return p;
}

}  // namespace

TEST(Initializer, OperatorCountAndSupport) {
  const auto L = build_initializer({4, 1.0, 2.0});
  EXPECT_EQ(L.size(), 8U);
  EXPECT_EQ(max_support(L), 2U);
  EXPECT_EQ(L.reg().labels().front(), "c");
  EXPECT_NEAR(L.ops()[0].rate(), 1.0, 1e-15);
  EXPECT_NEAR(L.ops()[4].rate(), 2.0, 1e-15);
  EXPECT_THROW(build_initializer({0, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(build_initializer({2, 0.0, 1.0}), std::invalid_argument);
}

TEST(Initializer, AuxiliaryPermutationCovariance) {
  const auto L = build_initializer({3, 0.8, 1.7});
  const Matrix p = swap_sites(L.reg(), "a1", "a3");
  Matrix r = Matrix::Zero(16, 16);
  for (int i = 0; i < 16; ++i) r(i, i) = (i + 1) / 136.0;
  r(3, 12) = r(12, 3) = 0.01;
  const DensityMatrix rho(L.reg(), r);
  const DensityMatrix swapped(L.reg(), p * r * p.adjoint());
  EXPECT_LT((apply_generator(L, swapped) - p * apply_generator(L, rho) * p.adjoint()).norm(), 1e-14);
}

TEST(Timer, StructureAndInitialState) {
  const auto L = build_timer({5, 0.3});
  EXPECT_EQ(L.size(), 4U);
  EXPECT_EQ(max_support(L), 2U);
  EXPECT_EQ(L.reg().labels().back(), "t5");
  const auto rho = timer_initial_state(5);
  EXPECT_DOUBLE_EQ(rho.population(0b01111), 1.0);
  EXPECT_THROW(build_timer({1, 1.0}), std::invalid_argument);
  EXPECT_EQ(build_timer({3, 1.0}, "T1_").reg().labels().front(), "T1_1");
}

TEST(Timer, StatesWithLeadingZerosAreStationary) {
  // phi_k: first k+1 qubits |0>, the rest |1>.
  const auto L = build_timer({4, 1.0});
  for (std::size_t k = 0; k < 4; ++k) {
    Matrix m = Matrix::Zero(16, 16);
    const std::size_t idx = (std::size_t{1} << (3 - k)) - 1;
    m(idx, idx) = 1;
    const Matrix out = apply_generator(L, DensityMatrix(L.reg(), m));
    if (k == 3)
      EXPECT_EQ(out.norm(), 0.0);
    else
      EXPECT_GT(out.norm(), 0.0);  // phi_k moves on to phi_{k+1}
  }
}

TEST(Measurement, LongTimeLimitIsDephasedAndRecorded) {
  QubitRegister reg({"s", "r"});
  const auto L = build_measurement(reg, {"s"}, {qubit::plus(), qubit::minus()}, {"r"}, 2.0);
  EXPECT_EQ(L.size(), 4U);
  const Vector phi = bloch_state(1.1, 0.5);
  const auto rho0 = DensityMatrix::pure(reg, kron(phi, qubit::ket0()));
  const auto out = evolve(L, rho0, 30.0);
  Matrix expect = Matrix::Zero(4, 4);
  const std::vector<Vector> basis{qubit::plus(), qubit::minus()};
  for (int k = 0; k < 2; ++k) {
    const Matrix pk = basis[k] * basis[k].adjoint();
    expect += kron(Matrix(pk * phi * phi.adjoint() * pk), qubit::flip(k, k));
  }
  EXPECT_LT((out.matrix() - expect).norm(), 1e-9);
  EXPECT_LT(apply_generator(L, DensityMatrix(reg, expect)).norm(), 1e-14);
}

TEST(Measurement, RejectsBadInput) {
  QubitRegister reg({"s", "r"});
  EXPECT_THROW(build_measurement(reg, {"s"}, {qubit::plus()}, {"r"}), std::invalid_argument);
  EXPECT_THROW(build_measurement(reg, {"s"}, {qubit::plus(), qubit::ket0()}, {"r"}), std::invalid_argument);
  EXPECT_THROW(build_measurement(reg, {"s"}, {qubit::plus(), qubit::minus()}, {"r"}, 0.0), std::invalid_argument);
  EXPECT_THROW(build_measurement(reg, {"s"}, {qubit::plus(), qubit::minus()}, {}), std::invalid_argument);
}

TEST(Conditional, ActsOnlyOnTriggerState) {
  QubitRegister reg({"p", "g"});
  const LindbladOperator damp(reg, {"p"}, qubit::flip(0, 1), "d");
  const auto c = build_conditional(damp, "g", 1);
  EXPECT_EQ(c.support(), (std::vector<std::string>{"g", "p"}));
  Liouvillian L(reg);
  L.add(c);
  // p = 1, g = 0: frozen. p = 1, g = 1: decays.
  EXPECT_EQ(apply_generator(L, DensityMatrix::basis(reg, std::vector<int>{1, 0})).norm(), 0.0);
  EXPECT_GT(apply_generator(L, DensityMatrix::basis(reg, std::vector<int>{1, 1})).norm(), 0.0);
  EXPECT_THROW(build_conditional(damp, "p", 1), std::invalid_argument);
  EXPECT_THROW(build_conditional(damp, "g", 2), std::invalid_argument);
  EXPECT_THROW(build_conditional(damp, "x", 0), register_mismatch);
}

TEST(TransferBuilders, Shapes) {
  const auto t3 = build_transfer_3qubit(1.0);
  EXPECT_EQ(t3.reg.size(), 5U);
  EXPECT_EQ(t3.A.generator.size(), 4U);
  EXPECT_EQ(t3.B.generator.size(), 3U);
  EXPECT_LE(max_support(t3.B.generator), 3U);

  const auto chain = build_transfer_nqubit(3, 1.0);
  EXPECT_EQ(chain.reg.size(), 10U);
  EXPECT_EQ(chain.stages.size(), 7U);
  EXPECT_EQ(chain.output, "l3");
  for (const auto& s : chain.stages) EXPECT_LE(max_support(s.generator), 3U) << s.name;

  const auto comp = build_transfer_compressed(5, 1.0);
  EXPECT_EQ(comp.reg.size(), 8U);
  EXPECT_EQ(comp.stages.size(), 9U);
  EXPECT_THROW(build_transfer_compressed(4, 1.0), std::invalid_argument);
  EXPECT_THROW(build_transfer_3qubit(-1.0), std::invalid_argument);
}

TEST(TransferBuilders, RecoveryFixesEachBranch) {
  // Registry (r4, r5) = (s1, s2) holds X^{s2} Z^{s1} phi; stage B restores phi
  // and resets the registry.
  const auto t = build_transfer_3qubit(1.0);
  const Vector phi = bloch_state(2.0, 1.0);
  const std::vector<std::string> keep{"q3"};
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2) {
      Vector q = phi;
      if (s1) q = qubit::pauli_z() * q;
      if (s2) q = qubit::pauli_x() * q;
      Vector psi = kron(kron(qubit::basis_vector(2, 0), q), kron(qubit::ket(s1), qubit::ket(s2)));
      const auto out = evolve(t.B.generator, DensityMatrix::pure(t.reg, psi), 40.0);
      EXPECT_NEAR(fidelity_with_pure(partial_trace(out, std::span<const std::string>(keep)), phi), 1.0, 1e-9);
      EXPECT_NEAR(partial_trace(out, {"r4", "r5"}).population(0), 1.0, 1e-9);
    }
}
