#include <gtest/gtest.h>

#include "qcaf/integrals.hpp"
#include "qcaf/scf.hpp"
#include "qcaf/trial.hpp"
#include "qcaf/vqe.hpp"
#include "support/oracles.hpp"

using namespace qcaf;

TEST(ExtractMsd, ReferenceStateIsOneDeterminant) {
  auto sv = prepare_reference(4, 0b0011, 0b0011);
  auto t = extract_msd(sv, 2, 2);
  ASSERT_EQ(t.n_dets(), 1u);
  EXPECT_EQ(t.dets[0].alpha, 0b0011u);
  EXPECT_EQ(t.dets[0].beta, 0b0011u);
  EXPECT_NEAR(std::abs(t.dets[0].coeff), 1.0, 1e-12);
}

TEST(ExtractMsd, LosslessRoundTripAboveFloor) {
  auto mi = lowdin_integrals(build_h_chain(4, 1.3));
  auto fci = fci_ground_state(mi, 2, 2);
  SectorBasis basis(4, 2, 2);
  auto sv = scatter_sector(fci.vector, basis);
  auto t = extract_msd(sv, 2, 2, 1e-15);
  VecC rec = reconstruct_sector(t, basis);
  EXPECT_GT(fidelity(rec, gather_sector(sv, basis)), 1.0 - 1e-10);
  // extract -> reconstruct -> extract is idempotent
  auto t2 = extract_msd(rec, basis, 1e-15);
  ASSERT_EQ(t2.n_dets(), t.n_dets());
  for (std::size_t i = 0; i < t.n_dets(); ++i) {
    EXPECT_EQ(t2.dets[i].alpha, t.dets[i].alpha);
    EXPECT_EQ(t2.dets[i].beta, t.dets[i].beta);
    EXPECT_LT(std::abs(t2.dets[i].coeff - t.dets[i].coeff), 1e-12);
  }
}

TEST(ExtractMsd, SortedByMagnitudeAndNormalized) {
  auto mi = lowdin_integrals(build_h_chain(4, 1.8));
  auto fci = fci_ground_state(mi, 2, 2);
  SectorBasis basis(4, 2, 2);
  auto t = extract_msd(fci.vector, basis);
  EXPECT_NEAR(t.norm2(), 1.0, 1e-10);
  for (std::size_t i = 1; i < t.n_dets(); ++i)
    EXPECT_LE(std::norm(t.dets[i].coeff), std::norm(t.dets[i - 1].coeff) + 1e-15);
}

TEST(ExtractMsd, EmptyAfterMaskingIsError) {
  Statevector sv = Statevector::zero(4);
  sv.amps[0] = 1.0;  // vacuum: no (1,1) amplitude
  EXPECT_THROW(extract_msd(sv, 1, 1), Error);
}

TEST(Truncate, IdentityAndDominant) {
  auto mi = lowdin_integrals(build_h_chain(4, 1.5));
  auto fci = fci_ground_state(mi, 2, 2);
  SectorBasis basis(4, 2, 2);
  auto t = extract_msd(fci.vector, basis);
  auto full = truncate(t, t.n_dets());
  ASSERT_EQ(full.n_dets(), t.n_dets());
  for (std::size_t i = 0; i < t.n_dets(); ++i)
    EXPECT_LT(std::abs(full.dets[i].coeff - t.dets[i].coeff), 1e-12);
  auto one = truncate(t, 1);
  ASSERT_EQ(one.n_dets(), 1u);
  EXPECT_NEAR(std::abs(one.dets[0].coeff), 1.0, 1e-12);
  EXPECT_THROW(truncate(t, 0), Error);
  EXPECT_THROW(truncate(t, t.n_dets() + 1), Error);
}

TEST(Truncate, FidelityNonDecreasingInK) {
  auto mi = lowdin_integrals(build_h_chain(4, 1.8));
  auto fci = fci_ground_state(mi, 2, 2);
  SectorBasis basis(4, 2, 2);
  auto t = extract_msd(fci.vector, basis);
  VecC full = reconstruct_sector(t, basis);
  double prev = -1.0;
  for (std::size_t k = 1; k <= t.n_dets(); ++k) {
    double f = fidelity(reconstruct_sector(truncate(t, k), basis), full);
    EXPECT_GE(f, prev - 1e-12) << "K=" << k;
    prev = f;
  }
  EXPECT_NEAR(prev, 1.0, 1e-12);
}

TEST(Metrics, FciTrialIsPerfect) {
  auto mi = lowdin_integrals(build_h_chain(4, 1.2));
  auto fci = fci_ground_state(mi, 2, 2);
  SectorBasis basis(4, 2, 2);
  SectorHamiltonian h(as_spin_blocked(mi), basis);
  auto t = extract_msd(fci.vector, basis);
  auto m = trial_metrics(t, fci.vector, h);
  EXPECT_NEAR(m.fidelity, 1.0, 1e-10);
  EXPECT_NEAR(m.spin_projected_fidelity, 1.0, 1e-10);
  EXPECT_NEAR(m.variational_energy, fci.energy, 1e-9);
  EXPECT_NEAR(m.s_squared, 0.0, 1e-8);
}

TEST(Metrics, ProjectedFidelityAtLeastUnprojected) {
  auto mi = lowdin_integrals(build_h_chain(4, 1.6));
  auto fci = fci_ground_state(mi, 2, 2);
  SectorBasis basis(4, 2, 2);
  SectorHamiltonian h(as_spin_blocked(mi), basis);
  auto rng = oracles::test_rng(51);
  for (int trial = 0; trial < 10; ++trial) {
    VecC v = oracles::random_state(basis.size(), rng);
    auto t = extract_msd(v, basis);
    auto m = trial_metrics(t, fci.vector, h);
    EXPECT_GE(m.spin_projected_fidelity, m.fidelity - 1e-12);
  }
  // spin-pure trial: projected equals unprojected
  auto t = extract_msd(fci.vector, basis);
  auto m = trial_metrics(t, fci.vector, h);
  EXPECT_NEAR(m.spin_projected_fidelity, m.fidelity, 1e-10);
}

TEST(Metrics, TrialEnergyMatchesSourceStatevector) {
  auto mi = lowdin_integrals(build_h_chain(4, 1.1));
  auto res = rhf(mi, 4);
  VqeProblem prob(as_spin_blocked(res.mo_ints), 2, 2);
  auto built = build_uccsd(4, 2, 2);
  Vec params = Vec::Constant(built.circuit.n_params, 0.05);
  auto sv = evaluate(built.circuit, params);
  double e_sv = energy(sv, prob.pauli_hamiltonian());
  auto t = extract_msd(sv, 2, 2);
  auto fci = fci_ground_state(res.mo_ints, 2, 2);
  auto m = trial_metrics(t, fci.vector, *prob.h);
  EXPECT_NEAR(m.variational_energy, e_sv, 1e-9);
}

TEST(RotateTrial, BackRotationPreservesEnergyAndState) {
  auto mi = lowdin_integrals(build_h_chain(4, 2.0));
  auto res = rhf(mi, 4);
  const auto& mo = res.mo_ints;
  auto ures = uhf(mo, 2, 2, true);
  auto blocked = rotate_to_uhf_basis(mo, ures);
  auto fci_rot = fci_ground_state(blocked, 2, 2);
  auto fci_plain = fci_ground_state(mo, 2, 2);

  SectorBasis basis(4, 2, 2);
  auto t_rot = extract_msd(fci_rot.vector, basis);
  // orbitals chi'_p = sum_q C_qp chi_q: the re-expansion matrix is C itself
  auto t_back = rotate_trial(t_rot, ures.c_alpha, ures.c_beta);
  SectorHamiltonian h_plain(as_spin_blocked(mo), basis);
  auto m = trial_metrics(t_back, fci_plain.vector, h_plain);
  EXPECT_NEAR(m.variational_energy, fci_rot.energy, 1e-9);
  EXPECT_NEAR(m.fidelity, 1.0, 1e-9);
}

TEST(RotateTrial, IdentityRotationIsNoop) {
  auto mi = lowdin_integrals(build_h_chain(4, 1.4));
  auto fci = fci_ground_state(mi, 2, 2);
  SectorBasis basis(4, 2, 2);
  auto t = extract_msd(fci.vector, basis);
  auto t2 = rotate_trial(t, Mat::Identity(4, 4), Mat::Identity(4, 4));
  VecC a = reconstruct_sector(t, basis), b = reconstruct_sector(t2, basis);
  EXPECT_GT(fidelity(a, b), 1.0 - 1e-12);
}

TEST(TrialIo, SaveLoadRoundTrip) {
  auto mi = lowdin_integrals(build_h_chain(4, 1.5));
  auto fci = fci_ground_state(mi, 2, 2);
  SectorBasis basis(4, 2, 2);
  auto t = extract_msd(fci.vector, basis);
  t.source = "h4 test";
  std::string path = ::testing::TempDir() + "trial_roundtrip.bin";
  save_trial(path, t);
  auto u = load_trial(path);
  ASSERT_EQ(u.n_dets(), t.n_dets());
  EXPECT_EQ(u.source, t.source);
  for (std::size_t i = 0; i < t.n_dets(); ++i) {
    EXPECT_EQ(u.dets[i].alpha, t.dets[i].alpha);
    EXPECT_EQ(u.dets[i].beta, t.dets[i].beta);
    EXPECT_EQ(u.dets[i].coeff, t.dets[i].coeff);
  }
}

TEST(TrialIo, CorruptionDetected) {
  auto mi = lowdin_integrals(build_h_chain(2, 1.0));
  auto fci = fci_ground_state(mi, 1, 1);
  SectorBasis basis(2, 1, 1);
  auto t = extract_msd(fci.vector, basis);
  std::string path = ::testing::TempDir() + "trial_corrupt.bin";
  save_trial(path, t);
  std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
  char c;
  f.seekg(-3, std::ios::end);
  f.get(c);
  c ^= 0x40;
  f.seekp(-3, std::ios::end);
  f.put(c);
  f.close();
  EXPECT_THROW(load_trial(path), Error);
}

TEST(TrialIo, ListingShowsTopDeterminants) {
  auto mi = lowdin_integrals(build_h_chain(4, 1.5));
  auto fci = fci_ground_state(mi, 2, 2);
  SectorBasis basis(4, 2, 2);
  auto t = extract_msd(fci.vector, basis);
  std::ostringstream os;
  write_trial_listing(os, t, 5);
  std::string s = os.str();
  EXPECT_NE(s.find("determinants"), std::string::npos);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 7);  // 2 header + 5 rows
}
