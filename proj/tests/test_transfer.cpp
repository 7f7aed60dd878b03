#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dqt/acceptance.hpp"
#include "dqt/dqt.hpp"

using namespace dqt;

namespace {

Matrix projector(const Vector& v) { return v * v.adjoint(); }

double overlap(const Vector& a, const Vector& b) { return std::norm(a.dot(b)); }

}  // namespace

TEST(Cluster, SmallExamples) {
  const Vector phi = bloch_state(0.8, 1.1);
  EXPECT_LT((prepare_cluster(phi, 1) - phi).norm(), 1e-15);
  // CZ (|+> (x) |+>) = (|0+> + |1->)/sqrt 2
  const Vector c = prepare_cluster(qubit::plus(), 2);
  const Vector ref = (kron(qubit::ket0(), qubit::plus()) + kron(qubit::ket1(), qubit::minus())) / std::sqrt(2.0);
  EXPECT_LT((c - ref).norm(), 1e-15);
  EXPECT_NEAR(prepare_cluster(phi, 5).norm(), 1.0, 1e-14);
  EXPECT_THROW(prepare_cluster(Vector(2 * phi), 3), std::invalid_argument);
}

TEST(Bookkeeping, ByproductParities) {
  const auto a = byproduct_parities({1, 0});
  EXPECT_EQ(a.gz, 1);
  EXPECT_EQ(a.gx, 0);
  const auto b = byproduct_parities({0, 1, 1, 1});
  EXPECT_EQ(b.gz, 1);
  EXPECT_EQ(b.gx, 0);
  EXPECT_THROW(byproduct_parities({2}), std::invalid_argument);
}

TEST(Bookkeeping, CorrectedOutputEqualsInputForEveryPattern) {
  const Vector phi = bloch_state(2.1, -0.7);
  for (std::size_t n : {3, 5, 7})
    for (unsigned mask = 0; mask < (1U << (n - 1)); ++mask) {
      std::vector<int> s(n - 1);
      for (std::size_t j = 0; j + 1 < n; ++j) s[j] = static_cast<int>((mask >> j) & 1U);
      EXPECT_NEAR(overlap(phi, bookkeeping_oracle(phi, n, s)), 1.0, 1e-12) << "n=" << n << " mask=" << mask;
    }
  EXPECT_THROW(bookkeeping_oracle(phi, 4, {0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(bookkeeping_oracle(phi, 3, {0}), std::invalid_argument);
}

TEST(RunSequential, DampingStageEquilibrates) {
  QubitRegister reg({"q"});
  Liouvillian L(reg);
  L.add({reg, {"q"}, std::sqrt(2.0) * qubit::flip(0, 1), "ad"});
  StageOptions opt;
  const auto res = run_sequential({{"damp", L}}, DensityMatrix::basis(reg, std::vector<int>{1}), opt);
  ASSERT_EQ(res.times.size(), 1U);
  // First chunk boundary (multiples of 1/2) where sqrt(2) ||L rho||_F <= 1e-9.
  const double t = res.times[0];
  EXPECT_NEAR(2 * t, std::round(2 * t), 1e-9);
  EXPECT_LE(std::sqrt(2.0) * 2 * std::sqrt(2.0) * std::exp(-2 * t), 1e-9);
  EXPECT_GT(std::sqrt(2.0) * 2 * std::sqrt(2.0) * std::exp(-2 * (t - 0.5)), 1e-9);
  EXPECT_NEAR(res.rho.population(0), 1.0, 1e-9);
  opt.budget_factor = 1;
  EXPECT_THROW(run_sequential({{"damp", L}}, DensityMatrix::basis(reg, std::vector<int>{1}), opt), convergence_error);
}

TEST(Transfer3, StageABranchesCarryByproducts) {
  const Vector phi = bloch_state(1.3, 0.9);
  const auto t = build_transfer_3qubit(1.0);
  const Vector psi = kron(prepare_cluster(phi, 3), qubit::basis_vector(2, 0));
  const auto afterA = run_sequential({t.A}, DensityMatrix::pure(t.reg, psi)).rho;
  const auto sub = partial_trace(afterA, {"q3", "r4", "r5"});
  for (int r = 0; r < 4; ++r) {
    const int s1 = r >> 1, s2 = r & 1;  // r4 = s1, r5 = s2
    Matrix block(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) block(a, b) = sub.matrix()(a * 4 + r, b * 4 + r);
    EXPECT_NEAR(block.trace().real(), 0.25, 1e-9) << "branch " << r;
    Vector expect = phi;
    if (s1) expect = qubit::pauli_z() * expect;
    if (s2) expect = qubit::pauli_x() * expect;
    EXPECT_LT((block / block.trace() - projector(expect)).norm(), 1e-8) << "branch " << r;
  }
  // No coherence between different registry values.
  for (Eigen::Index i = 0; i < 8; ++i)
    for (Eigen::Index j = 0; j < 8; ++j)
      if (i % 4 != j % 4) EXPECT_LT(std::abs(sub.matrix()(i, j)), 1e-9);
}

TEST(Transfer3, FidelityOverRandomInputs) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 5; ++i) {
    const Vector phi = acceptance::detail::random_qubit(rng);
    const auto run = run_transfer_3qubit(phi);
    EXPECT_GE(run.fidelity, 1 - 1e-6);
    EXPECT_EQ(run.stage_names, (std::vector<std::string>{"A", "B"}));
    EXPECT_GT(run.stage_times[0], 0.0);
  }
}

TEST(Transfer3, GlobalPhaseDoesNotMatter) {
  const Vector phi = bloch_state(0.6, 2.0);
  const Vector rotated = std::polar(1.0, 1.234) * phi;
  EXPECT_NEAR(run_transfer_3qubit(phi).fidelity, run_transfer_3qubit(rotated).fidelity, 1e-10);
}

TEST(Transfer3, ReversedStagesLeaveUncorrectedMixture) {
  // Recovery first sees an empty registry; the output is the uniform mixture
  // over phi, X phi, Z phi, XZ phi, whose fidelity with phi is exactly 1/2.
  for (const Vector& phi : {bloch_state(1.0, 0.4), bloch_state(2.5, -1.0)})
    EXPECT_NEAR(run_transfer_3qubit(phi, 1.0, {}, true).fidelity, 0.5, 1e-6);
}

TEST(TransferN, CompressedFiveQubits) {
  const Vector phi = bloch_state(2.2, 0.3);
  const auto run = run_transfer(build_transfer_compressed(5, 1.0), phi);
  EXPECT_GE(run.fidelity, 1 - 1e-6);
  EXPECT_EQ(run.output, "l5");
}

TEST(TransferN, ChainLayoutThreeQubitsWithBusParity) {
  const Vector phi = bloch_state(0.7, -2.4);
  const auto proto = build_transfer_nqubit(3, 1.0);
  const auto run = run_transfer(proto, phi);
  EXPECT_GE(run.fidelity, 1 - 1e-6);
  // Recovery resets the parity qubits.
  EXPECT_NEAR(partial_trace(run.rho_final, {proto.parity_z, proto.parity_x}).population(0), 1.0, 1e-6);
}

TEST(TransferN, RegisterCap) {
  EXPECT_THROW(run_transfer(build_transfer_nqubit(5, 1.0), bloch_state(1, 1)), std::length_error);
}

TEST(TimerTriggered, MatchesClassicalSchedule) {
  // Damping of |1> switched on when the last timer qubit reaches |0>. The
  // population of |1> follows a 2N-state chain (timer count, p).
  const std::size_t N = 3;
  const double omega = 1.0, gamma = 0.5;
  QubitRegister reg({"p"});
  Liouvillian d(reg);
  d.add({reg, {"p"}, std::sqrt(omega) * qubit::flip(0, 1), "damp"});
  const auto rho0 = DensityMatrix::basis(reg, std::vector<int>{1});
  // state index 2k + p, k = number of completed timer steps
  std::vector<ClassicalGenerator::Transition> tr;
  for (std::size_t k = 0; k + 1 < N; ++k)
    for (std::size_t p = 0; p < 2; ++p) tr.push_back({2 * k + p, 2 * (k + 1) + p, gamma});
  tr.push_back({2 * (N - 1) + 1, 2 * (N - 1), omega});
  ClassicalGenerator chain(2 * N, tr);
  Eigen::VectorXd p0 = Eigen::VectorXd::Zero(2 * N);
  p0(1) = 1;
  for (double t : {0.5, 3.0, 10.0}) {
    const auto pc = evolve_classical(chain, p0, t);
    double one = 0;
    for (std::size_t k = 0; k < N; ++k) one += pc(static_cast<Eigen::Index>(2 * k + 1));
    EXPECT_NEAR(run_timer_triggered({{"damp", d}}, {N}, gamma, rho0, t).population(1), one, 1e-9) << "t=" << t;
  }
}

TEST(TimerTriggered, Errors) {
  const auto t = build_transfer_3qubit(1.0);
  const auto rho0 = DensityMatrix::maximally_mixed(t.reg);
  EXPECT_THROW(build_timer_triggered({t.A, t.B}, {3}, 1.0, rho0), std::invalid_argument);
  EXPECT_THROW(build_timer_triggered({t.A, t.B}, {4, 4}, 1.0, rho0), std::length_error);
  const auto c = build_timer_triggered({t.A}, {2}, 1.0, rho0);
  EXPECT_EQ(c.reg.size(), 7U);
  EXPECT_EQ(c.generator.size(), t.A.generator.size() + 1);
}
