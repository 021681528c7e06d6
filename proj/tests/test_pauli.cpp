#include <gtest/gtest.h>

#include "qcaf/exactdiag.hpp"
#include "qcaf/pauli.hpp"
#include "qcaf/cholesky.hpp"
#include "qcaf/statevector.hpp"
#include "support/oracles.hpp"

using namespace qcaf;

TEST(PauliString, LettersAndCommutation) {
  PauliString xx{0b11, 0b00}, zi{0b00, 0b01}, yi{0b01, 0b01};
  EXPECT_EQ(xx.to_string(2), "XX");
  EXPECT_EQ(zi.to_string(2), "ZI");
  EXPECT_EQ(yi.to_string(2), "YI");
  EXPECT_FALSE(commutes(xx, zi));
  EXPECT_TRUE(commutes(xx, PauliString{0b00, 0b11}));  // XX vs ZZ
  EXPECT_TRUE(commutes(zi, zi));
}

TEST(JordanWigner, NumberOperatorForIdentityH) {
  SpinBlockedIntegrals si;
  si.n_orbitals = 1;
  si.e_nuclear = 0.0;
  si.h_a = si.h_b = Mat::Identity(1, 1);
  si.v_aa = si.v_ab = si.v_bb = Tensor4(1);
  auto op = jordan_wigner(si);
  // n_alpha + n_beta = (I - Z0)/2 + (I - Z1)/2 = I - Z0/2 - Z1/2
  ASSERT_EQ(op.terms.size(), 3u);
  std::map<std::string, double> got;
  for (const auto& [c, p] : op.terms) got[p.to_string(2)] = c.real();
  EXPECT_NEAR(got["II"], 1.0, 1e-14);
  EXPECT_NEAR(got["ZI"], -0.5, 1e-14);
  EXPECT_NEAR(got["IZ"], -0.5, 1e-14);
}

TEST(JordanWigner, H2TermCountAndEigenvalue) {
  auto mi = lowdin_integrals(build_h_chain_bohr(2, 1.4));
  auto res = rhf(mi, 2);
  auto op = jordan_wigner(res.mo_ints);
  EXPECT_EQ(op.terms.size(), 15u);
  EXPECT_LT(hermiticity_residual(op), 1e-12);

  // restrict the dense operator to the (1,1) sector and compare with FCI
  auto dense = oracles::dense_pauli_matrix(op);
  SectorBasis basis(2, 1, 1);
  Mat sector(basis.size(), basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j)
      sector(i, j) =
          dense(basis.statevector_index(i), basis.statevector_index(j)).real();
  Eigen::SelfAdjointEigenSolver<Mat> es(sector);
  auto fci = fci_ground_state(res.mo_ints, 1, 1);
  EXPECT_NEAR(es.eigenvalues()(0), fci.energy, 1e-9);
}

TEST(JordanWigner, SectorEigenvalueMatchesFciH4) {
  auto mi = lowdin_integrals(build_h_chain(4, 1.1));
  auto op = jordan_wigner(mi);
  EXPECT_LT(hermiticity_residual(op), 1e-12);
  auto dense = oracles::dense_pauli_matrix(op);
  SectorBasis basis(4, 2, 2);
  Mat sector(basis.size(), basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j)
      sector(i, j) =
          dense(basis.statevector_index(i), basis.statevector_index(j)).real();
  Eigen::SelfAdjointEigenSolver<Mat> es(sector);
  EXPECT_NEAR(es.eigenvalues()(0), fci_ground_state(mi, 2, 2).energy, 1e-9);
}

TEST(JordanWigner, CrossRepresentationEnergyIdentity) {
  // Pauli-sum expectation on a scattered sector state equals the
  // sector-restricted Hamiltonian expectation.
  auto mi = lowdin_integrals(build_h_chain(4, 1.5));
  auto op = jordan_wigner(mi);
  SectorBasis basis(4, 2, 2);
  SectorHamiltonian h(as_spin_blocked(mi), basis);
  auto rng = oracles::test_rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    VecC v = oracles::random_state(basis.size(), rng);
    auto sv = scatter_sector(v, basis);
    cplx e_pauli = expectation_pauli(sv, op);
    double e_sector = h.expectation(v);
    EXPECT_NEAR(e_pauli.imag(), 0.0, 1e-10);
    EXPECT_NEAR(e_pauli.real(), e_sector, 1e-9);
  }
}

TEST(JordanWigner, SpinBlockedConsistency) {
  // rotating both spin blocks by the same orthogonal matrix must preserve
  // the sector spectrum
  auto mi = lowdin_integrals(build_h_chain(2, 1.0));
  auto ures = uhf(mi, 1, 1, true);
  auto blocked = rotate_to_uhf_basis(mi, ures);
  auto op = jordan_wigner(blocked);
  auto dense = oracles::dense_pauli_matrix(op);
  SectorBasis basis(2, 1, 1);
  Mat sector(basis.size(), basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j)
      sector(i, j) =
          dense(basis.statevector_index(i), basis.statevector_index(j)).real();
  Eigen::SelfAdjointEigenSolver<Mat> es(sector);
  EXPECT_NEAR(es.eigenvalues()(0), fci_ground_state(mi, 1, 1).energy, 1e-9);
}

TEST(GroupCommuting, AllZOneGroup) {
  PauliOperator op;
  op.n_qubits = 3;
  op.terms = {{1.0, {0, 0b001}}, {0.5, {0, 0b011}}, {-0.25, {0, 0b111}}};
  auto g = group_commuting(op);
  EXPECT_EQ(g.n_groups(), 1u);
  EXPECT_EQ(g.n_terms(), 3u);
}

TEST(GroupCommuting, AnticommutingPairSplits) {
  PauliOperator op;
  op.n_qubits = 2;
  op.terms = {{1.0, {0b11, 0}}, {1.0, {0, 0b01}}};  // XX, ZI
  auto g = group_commuting(op);
  EXPECT_EQ(g.n_groups(), 2u);
}

TEST(GroupCommuting, H4PairwiseCommutesAndDeterministic) {
  auto mi = lowdin_integrals(build_h_chain(4, 1.2));
  auto op = jordan_wigner(mi);
  auto g1 = group_commuting(op);
  auto g2 = group_commuting(op);
  ASSERT_EQ(g1.n_groups(), g2.n_groups());
  EXPECT_EQ(g1.n_terms() + 1, op.terms.size());  // identity term excluded
  for (std::size_t gi = 0; gi < g1.n_groups(); ++gi) {
    ASSERT_EQ(g1.groups[gi].size(), g2.groups[gi].size());
    for (std::size_t t = 0; t < g1.groups[gi].size(); ++t) {
      EXPECT_TRUE(g1.groups[gi][t].second == g2.groups[gi][t].second);
      for (std::size_t u = t + 1; u < g1.groups[gi].size(); ++u)
        EXPECT_TRUE(commutes(g1.groups[gi][t].second, g1.groups[gi][u].second));
    }
  }
}

TEST(Cholesky, DiagonalCase) {
  Tensor4 v(2);
  v(0, 0, 0, 0) = 1.0;
  v(1, 1, 1, 1) = 4.0;
  auto f = cholesky_factorize(v, 1e-12);
  EXPECT_EQ(f.n_aux(), 2);
  EXPECT_LT(cholesky_max_error(f, v), 1e-12);
}

TEST(Cholesky, H4BoundAndReconstruction) {
  auto mi = lowdin_integrals(build_h_chain(4, 1.2));
  auto f = cholesky_factorize(mi.v, 1e-8);
  EXPECT_LE(f.n_aux(), 10);  // N(N+1)/2
  EXPECT_LT(cholesky_max_error(f, mi.v), 1e-8);
  // convention check: sum_g L_pq L_rs = 2 (pq|rs)
  double acc = 0.0;
  for (const auto& l : f.l) acc += l(0, 1) * l(2, 3);
  EXPECT_NEAR(acc, 2.0 * mi.v(0, 1, 2, 3), 1e-7);
}

TEST(Cholesky, TruncationMonotonicity) {
  auto mi = lowdin_integrals(build_h_chain(6, 1.0));
  auto loose = cholesky_factorize(mi.v, 1e-4);
  auto tight = cholesky_factorize(mi.v, 1e-8);
  EXPECT_LE(loose.n_aux(), tight.n_aux());
  EXPECT_LT(cholesky_max_error(tight, mi.v), 1e-8);
  // pivot trace decreases monotonically
  for (std::size_t i = 1; i < tight.pivot_trace.size(); ++i)
    EXPECT_LE(tight.pivot_trace[i], tight.pivot_trace[i - 1] + 1e-14);
}

TEST(Cholesky, IndefiniteRejected) {
  Tensor4 v(2);
  v(0, 0, 0, 0) = -1.0;
  EXPECT_THROW(cholesky_factorize(v, 1e-8), Error);
}

TEST(Cholesky, SaveLoadRoundTrip) {
  auto mi = lowdin_integrals(build_h_chain(4, 1.4));
  auto f = cholesky_factorize(mi.v, 1e-8);
  std::string path = ::testing::TempDir() + "chol_cache.bin";
  save_cholesky(path, f);
  auto g = load_cholesky(path);
  ASSERT_EQ(g.n_aux(), f.n_aux());
  for (int i = 0; i < f.n_aux(); ++i)
    EXPECT_LT((f.l[i] - g.l[i]).cwiseAbs().maxCoeff(), 1e-15);
}
