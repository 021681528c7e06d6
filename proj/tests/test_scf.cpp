#include <gtest/gtest.h>

#include "qcaf/exactdiag.hpp"
#include "qcaf/integrals.hpp"
#include "qcaf/mp2.hpp"
#include "qcaf/scf.hpp"
#include "support/oracles.hpp"
#include "support/reference_values.hpp"

using namespace qcaf;

namespace {
MolecularIntegrals h_chain_ints(int n, double r_ang) {
  return lowdin_integrals(build_h_chain(n, r_ang));
}
}  // namespace

TEST(Rhf, H2Energy) {
  auto mi = lowdin_integrals(build_h_chain_bohr(2, 1.4));
  auto res = rhf(mi, 2);
  EXPECT_TRUE(res.scf.converged);
  EXPECT_NEAR(res.scf.energy, refval::kH2R14BohrRhf, 1e-8);
}

TEST(Rhf, FockDiagonalInMoBasis) {
  auto mi = h_chain_ints(4, 1.0);
  auto res = rhf(mi, 4);
  // rebuild the Fock matrix from MO-basis integrals and the MO-basis density
  const int n = 4, nocc = 2;
  Mat d = Mat::Zero(n, n);
  for (int i = 0; i < nocc; ++i) d(i, i) = 2.0;
  Mat f = res.mo_ints.h;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      double acc = 0.0;
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
          acc += d(r, s) * (res.mo_ints.v(p, q, r, s) - 0.5 * res.mo_ints.v(p, s, r, q));
      f(p, q) += acc;
    }
  for (int p = 0; p < n; ++p) {
    EXPECT_NEAR(f(p, p), res.scf.eps_alpha(p), 1e-8);
    for (int q = 0; q < n; ++q)
      if (p != q) EXPECT_NEAR(f(p, q), 0.0, 1e-8);
  }
}

TEST(Rhf, TraceFormulaConsistency) {
  auto mi = h_chain_ints(4, 1.3);
  auto res = rhf(mi, 4);
  const int n = 4;
  Mat cocc = res.scf.c_alpha.leftCols(2);
  Mat d = 2.0 * cocc * cocc.transpose();
  Mat f = mi.h;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      double acc = 0.0;
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
          acc += d(r, s) * (mi.v(p, q, r, s) - 0.5 * mi.v(p, s, r, q));
      f(p, q) += acc;
    }
  double e = 0.5 * (d.array() * (mi.h + f).array()).sum() + mi.e_nuclear;
  EXPECT_NEAR(e, res.scf.energy, 1e-10);
}

TEST(Rhf, RejectsOddElectrons) {
  auto mi = h_chain_ints(4, 1.0);
  EXPECT_THROW(rhf(mi, 3), Error);
}

TEST(Uhf, SymmetricGuessReturnsRestricted) {
  auto mi = h_chain_ints(4, 1.0);
  auto rres = rhf(mi, 4);
  auto ures = uhf(mi, 2, 2, /*break_symmetry=*/false);
  EXPECT_NEAR(ures.energy, rres.scf.energy, 1e-8);
  // orbitals may differ by column sign only
  Mat ov = ures.c_alpha.transpose() * ures.c_beta;
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(ov(i, i)), 1.0, 1e-8);
  EXPECT_NEAR(uhf_s_squared(ures), 0.0, 1e-10);
}

TEST(Uhf, BrokenSymmetryLowersStretchedChain) {
  auto mi = h_chain_ints(4, 2.0);
  auto rres = rhf(mi, 4);
  auto ures = uhf(mi, 2, 2, true);
  EXPECT_LT(ures.energy, rres.scf.energy - 1e-3);
  EXPECT_GT(uhf_s_squared(ures), 0.1);
}

TEST(Uhf, EnergyNeverAboveRhf) {
  for (double r : {0.8, 1.2, 1.6, 2.4}) {
    auto mi = h_chain_ints(4, r);
    auto rres = rhf(mi, 4);
    auto ures = uhf(mi, 2, 2, true);
    EXPECT_LE(ures.energy, rres.scf.energy + 1e-9) << "R = " << r;
  }
}

TEST(Mp2, H2SingleAmplitude) {
  auto mi = lowdin_integrals(build_h_chain_bohr(2, 1.4));
  auto res = rhf(mi, 2);
  auto amp = mp2_t2(res.mo_ints, res.scf);
  EXPECT_LT(amp.e_mp2, 0.0);
  int nonzero = 0;
  double mag = -1.0;
  const int nso = 4;
  for (int i = 0; i < nso; ++i)
    for (int j = 0; j < nso; ++j)
      for (int a = 0; a < nso; ++a)
        for (int b = 0; b < nso; ++b) {
          double t = amp.at(i, j, a, b);
          if (t != 0.0) {
            ++nonzero;
            if (mag < 0) mag = std::abs(t);
            EXPECT_NEAR(std::abs(t), mag, 1e-12);
          }
        }
  EXPECT_EQ(nonzero, 4);  // one independent alpha-beta amplitude
}

TEST(Mp2, MatchesBruteForcePt2) {
  auto mi = h_chain_ints(4, 1.0);
  auto res = rhf(mi, 4);
  auto amp = mp2_t2(res.mo_ints, res.scf);
  EXPECT_NEAR(amp.e_mp2, refval::kH4R10Mp2Corr, 1e-8);

  SectorBasis basis(4, 2, 2);
  SectorHamiltonian h(as_spin_blocked(res.mo_ints), basis);
  double e2 = oracles::brute_force_pt2(h, res.scf.eps_alpha, res.scf.eps_beta,
                                       0b0011, 0b0011);
  EXPECT_NEAR(amp.e_mp2, e2, 1e-8);
}

TEST(Mp2, StretchedAmplitudesGrow) {
  auto r10 = rhf(h_chain_ints(4, 1.0), 4);
  auto r24 = rhf(h_chain_ints(4, 2.4), 4);
  auto a10 = mp2_t2(r10.mo_ints, r10.scf);
  auto a24 = mp2_t2(r24.mo_ints, r24.scf);
  auto maxabs = [](const Amplitudes2& a) {
    double m = 0.0;
    for (double t : a.t) m = std::max(m, std::abs(t));
    return m;
  };
  EXPECT_GT(maxabs(a24), maxabs(a10));
}

TEST(Mp2, SignFlipInvariance) {
  auto mi = h_chain_ints(4, 1.2);
  auto res = rhf(mi, 4);
  auto amp = mp2_t2(res.mo_ints, res.scf);
  // flip sign of an orbital column: MO integrals change sign pattern but the
  // MP2 energy is invariant
  ScfSolution flipped = res.scf;
  flipped.c_alpha.col(1) *= -1.0;
  flipped.c_beta.col(1) *= -1.0;
  MolecularIntegrals mo2;
  mo2.n_orbitals = 4;
  mo2.e_nuclear = mi.e_nuclear;
  mo2.h = flipped.c_alpha.transpose() * mi.h * flipped.c_alpha;
  mo2.v = transform_eri(mi.v, flipped.c_alpha);
  auto amp2 = mp2_t2(mo2, flipped);
  EXPECT_NEAR(amp.e_mp2, amp2.e_mp2, 1e-10);
}

TEST(RotateBasis, RestrictedInputGivesEqualBlocks) {
  auto mi = h_chain_ints(4, 1.0);
  auto res = rhf(mi, 4);
  auto blocked = rotate_to_uhf_basis(mi, res.scf);
  EXPECT_LT((blocked.h_a - blocked.h_b).cwiseAbs().maxCoeff(), 1e-12);
  double dmax = 0.0;
  for (std::size_t i = 0; i < blocked.v_aa.data().size(); ++i) {
    dmax = std::max(dmax, std::abs(blocked.v_aa.data()[i] - blocked.v_bb.data()[i]));
    dmax = std::max(dmax, std::abs(blocked.v_aa.data()[i] - blocked.v_ab.data()[i]));
  }
  EXPECT_LT(dmax, 1e-12);
}

TEST(RotateBasis, ReferenceDeterminantEnergyEqualsUhf) {
  auto mi = h_chain_ints(4, 2.0);
  auto ures = uhf(mi, 2, 2, true);
  auto blocked = rotate_to_uhf_basis(mi, ures);
  EXPECT_NEAR(reference_determinant_energy(blocked, 2, 2), ures.energy, 1e-9);
}

TEST(RotateBasis, FciInvariance) {
  auto mi = h_chain_ints(4, 2.0);
  auto e_plain = fci_ground_state(mi, 2, 2).energy;
  auto ures = uhf(mi, 2, 2, true);
  auto blocked = rotate_to_uhf_basis(mi, ures);
  auto e_rot = fci_ground_state(blocked, 2, 2).energy;
  EXPECT_NEAR(e_plain, e_rot, 1e-9);
}

TEST(RotateBasis, RejectsNonOrthogonalRotation) {
  auto mi = h_chain_ints(2, 1.0);
  ScfSolution bad;
  bad.c_alpha = Mat::Identity(2, 2) * 1.5;
  bad.c_beta = Mat::Identity(2, 2);
  bad.n_alpha = bad.n_beta = 1;
  EXPECT_THROW(rotate_to_basis(mi, bad), Error);
}
