#include <gtest/gtest.h>

#include "qcaf/exactdiag.hpp"
#include "qcaf/integrals.hpp"
#include "qcaf/scf.hpp"
#include "support/oracles.hpp"
#include "support/reference_values.hpp"

using namespace qcaf;

namespace {
MolecularIntegrals h_chain_ints(int n, double r_ang) {
  return lowdin_integrals(build_h_chain(n, r_ang));
}
}  // namespace

TEST(Fci, OneElectronTwoOrbitals) {
  MolecularIntegrals mi;
  mi.n_orbitals = 2;
  mi.e_nuclear = 0.0;
  mi.h = Mat::Zero(2, 2);
  mi.h(0, 0) = -0.3;
  mi.h(1, 1) = -0.9;
  mi.v = Tensor4(2);
  auto res = fci_ground_state(mi, 1, 0);
  EXPECT_NEAR(res.energy, -0.9, 1e-12);
}

TEST(Fci, H2Energy) {
  auto mi = lowdin_integrals(build_h_chain_bohr(2, 1.4));
  auto res = fci_ground_state(mi, 1, 1);
  EXPECT_NEAR(res.energy, refval::kH2R14BohrFci, 1e-8);
}

TEST(Fci, H4H6AgainstIndependentReference) {
  EXPECT_NEAR(fci_ground_state(h_chain_ints(4, 1.0), 2, 2).energy,
              refval::kH4R10Fci, 2e-8);
  EXPECT_NEAR(fci_ground_state(h_chain_ints(4, 1.8), 2, 2).energy,
              refval::kH4R18Fci, 2e-8);
  EXPECT_NEAR(fci_ground_state(h_chain_ints(6, 1.0), 3, 3).energy,
              refval::kH6R10Fci, 2e-8);
}

TEST(Fci, DavidsonMatchesDenseExhaustively) {
  // every sector of H2 and H4, plus the half-filled H6 sector
  FciOptions dense_opt;  // default: dense below 2000
  FciOptions dav_opt;
  dav_opt.dense_limit = 1;  // force Davidson
  for (int n : {2, 4}) {
    auto mi = h_chain_ints(n, 1.3);
    for (int na = 0; na <= n; ++na)
      for (int nb = 0; nb <= na; ++nb) {
        if (na + nb == 0) continue;
        auto d = fci_ground_state(mi, na, nb, dense_opt);
        auto v = fci_ground_state(mi, na, nb, dav_opt);
        EXPECT_NEAR(d.energy, v.energy, 1e-8) << n << " " << na << " " << nb;
        if (!d.degenerate)
          EXPECT_NEAR(fidelity(d.vector, v.vector), 1.0, 1e-7)
              << n << " " << na << " " << nb;
      }
  }
  auto mi6 = h_chain_ints(6, 1.3);
  auto d6 = fci_ground_state(mi6, 3, 3, dense_opt);
  auto v6 = fci_ground_state(mi6, 3, 3, dav_opt);
  EXPECT_NEAR(d6.energy, v6.energy, 1e-8);
  EXPECT_NEAR(fidelity(d6.vector, v6.vector), 1.0, 1e-7);
}

TEST(Fci, DavidsonResidualBound) {
  FciOptions opt;
  opt.dense_limit = 1;
  auto mi = h_chain_ints(6, 1.0);
  auto res = fci_ground_state(mi, 3, 3, opt);
  EXPECT_LE(res.residual, opt.residual_tol);
}

TEST(Fci, InvariantUnderOrbitalRotation) {
  auto mi = h_chain_ints(4, 1.4);
  auto rng = oracles::test_rng(7);
  Mat q = oracles::random_orthogonal(4, rng);
  MolecularIntegrals rot;
  rot.n_orbitals = 4;
  rot.e_nuclear = mi.e_nuclear;
  rot.h = q.transpose() * mi.h * q;
  rot.v = transform_eri(mi.v, q);
  EXPECT_NEAR(fci_ground_state(mi, 2, 2).energy, fci_ground_state(rot, 2, 2).energy,
              1e-9);
}

TEST(Fci, GroundStateOfEvenChainIsSinglet) {
  for (double r : {1.0, 1.8}) {
    auto mi = h_chain_ints(4, r);
    auto res = fci_ground_state(mi, 2, 2);
    SectorBasis basis(4, 2, 2);
    EXPECT_NEAR(s_squared(basis, res.vector), 0.0, 1e-8) << r;
  }
}

TEST(SSquared, ClosedShellDeterminant) {
  SectorBasis basis(4, 2, 2);
  VecC v = VecC::Zero(basis.size());
  v(basis.index(0b0011, 0b0011)) = 1.0;
  EXPECT_NEAR(s_squared(basis, v), 0.0, 1e-12);
}

TEST(SSquared, SingleAlphaElectron) {
  SectorBasis basis(2, 1, 0);
  VecC v = VecC::Zero(basis.size());
  v(0) = 1.0;
  EXPECT_NEAR(s_squared(basis, v), 0.75, 1e-12);
}

TEST(SSquared, TripletValue) {
  // two same-spin electrons: S = 1
  SectorBasis basis(2, 2, 0);
  VecC v = VecC::Zero(basis.size());
  v(0) = 1.0;
  EXPECT_NEAR(s_squared(basis, v), 2.0, 1e-12);

  // Sz = 0 triplet combination in the (1,1) sector
  SectorBasis b11(2, 1, 1);
  VecC t = VecC::Zero(b11.size());
  // find the combination with S^2 = 2 among |0a 1b> +/- |1a 0b>
  VecC x = VecC::Zero(b11.size()), y = VecC::Zero(b11.size());
  x(b11.index(0b01, 0b10)) = 1.0;
  y(b11.index(0b10, 0b01)) = 1.0;
  VecC plus = (x + y) / std::sqrt(2.0), minus = (x - y) / std::sqrt(2.0);
  double sp = s_squared(b11, plus), sm = s_squared(b11, minus);
  EXPECT_NEAR(std::max(sp, sm), 2.0, 1e-12);
  EXPECT_NEAR(std::min(sp, sm), 0.0, 1e-12);
}

TEST(SpinProject, SingletFixedPoint) {
  auto mi = h_chain_ints(4, 1.2);
  auto res = fci_ground_state(mi, 2, 2);
  SectorBasis basis(4, 2, 2);
  auto proj = spin_project(basis, res.vector);
  EXPECT_NEAR(proj.weight, 1.0, 1e-10);
  EXPECT_NEAR(fidelity(proj.state, res.vector), 1.0, 1e-10);
}

TEST(SpinProject, Idempotent) {
  SectorBasis basis(4, 2, 2);
  auto rng = oracles::test_rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    VecC v = oracles::random_state(basis.size(), rng);
    auto p1 = spin_project(basis, v);
    auto p2 = spin_project(basis, p1.state);
    EXPECT_NEAR(p2.weight, 1.0, 1e-10);
    EXPECT_LT((p2.state - p1.state).norm(), 1e-10);
    EXPECT_NEAR(s_squared(basis, p1.state), 0.0, 1e-8);
  }
}

TEST(SpinProject, TripletAnnihilated) {
  SectorBasis b11(2, 1, 1);
  VecC x = VecC::Zero(b11.size()), y = VecC::Zero(b11.size());
  x(b11.index(0b01, 0b10)) = 1.0;
  y(b11.index(0b10, 0b01)) = 1.0;
  VecC plus = (x + y) / std::sqrt(2.0), minus = (x - y) / std::sqrt(2.0);
  VecC triplet = s_squared(b11, plus) > 1.0 ? plus : minus;
  EXPECT_THROW(spin_project(b11, triplet), Error);
}

TEST(SpinProject, RequiresSzZero) {
  SectorBasis basis(3, 2, 1);
  VecC v = VecC::Zero(basis.size());
  v(0) = 1.0;
  EXPECT_THROW(spin_project(basis, v), Error);
}

TEST(Fidelity, BasicsAndSymmetry) {
  auto rng = oracles::test_rng(11);
  VecC a = oracles::random_state(16, rng);
  VecC b = oracles::random_state(16, rng);
  EXPECT_NEAR(fidelity(a, a), 1.0, 1e-12);
  EXPECT_NEAR(fidelity(a, b), fidelity(b, a), 1e-12);
  EXPECT_GE(fidelity(a, b), 0.0);
  EXPECT_LE(fidelity(a, b), 1.0);
  VecC e0 = VecC::Zero(4), e1 = VecC::Zero(4);
  e0(0) = 1.0;
  e1(1) = 1.0;
  EXPECT_NEAR(fidelity(e0, e1), 0.0, 1e-15);
  VecC c(3);
  EXPECT_THROW(fidelity(e0, c), Error);
}

TEST(SectorBasis, OrderingAndSize) {
  SectorBasis b(4, 2, 2);
  EXPECT_EQ(b.size(), 36u);
  // lexicographic: ascending alpha mask major, beta minor
  EXPECT_EQ(b.alpha_mask(0), 0b0011u);
  EXPECT_EQ(b.beta_mask(0), 0b0011u);
  EXPECT_EQ(b.beta_mask(1), 0b0101u);
  EXPECT_LT(b.alpha_mask(0), b.alpha_mask(b.size() - 1));
}
