#include <gtest/gtest.h>

#include <fstream>

#include "qcaf/fcidump.hpp"
#include "qcaf/integrals.hpp"
#include "qcaf/scf.hpp"
#include "support/reference_values.hpp"

using namespace qcaf;

TEST(Boys, LimitAndSeries) {
  EXPECT_DOUBLE_EQ(boys0(0.0), 1.0);
  EXPECT_NEAR(boys0(1e-6), 1.0 - 1e-6 / 3.0, 1e-9);
  // branch agreement around the switch point
  EXPECT_NEAR(boys0(1e-10 * 0.999), boys0(1e-10 * 1.001), 1e-13);
}

TEST(Boys, MonotoneDecreasing) {
  double prev = boys0(0.0);
  for (double t = 1e-8; t < 50.0; t *= 1.7) {
    double cur = boys0(t);
    EXPECT_LT(cur, prev + 1e-15);
    prev = cur;
  }
}

TEST(Geometry, ChainSpacing) {
  auto g = build_h_chain(2, 1.0);
  EXPECT_NEAR(distance(g.positions[0], g.positions[1]), 1.8897259886, 1e-12);

  auto g10 = build_h_chain(10, 1.4);
  for (int i = 0; i + 1 < 10; ++i)
    EXPECT_NEAR(distance(g10.positions[i], g10.positions[i + 1]), 2.6456163840, 1e-9);
  // collinearity
  for (int i = 0; i < 10; ++i) {
    EXPECT_DOUBLE_EQ(g10.positions[i][0], 0.0);
    EXPECT_DOUBLE_EQ(g10.positions[i][1], 0.0);
  }

  auto g4 = build_h_chain(4, 1.8);
  EXPECT_NEAR(distance(g4.positions[0], g4.positions[3]), 10.2045203, 2e-7);
}

TEST(Geometry, RejectsBadInput) {
  EXPECT_THROW(build_h_chain(1, 1.0), Error);
  EXPECT_THROW(build_h_chain(4, 0.0), Error);
  EXPECT_THROW(build_h_chain(4, -1.0), Error);
}

TEST(Geometry, CoincidentAtomsError) {
  Geometry g;
  g.positions = {{0, 0, 0}, {0, 0, 0}};
  g.charges = {1, 1};
  EXPECT_THROW(nuclear_repulsion(g), Error);
}

TEST(AoIntegrals, HydrogenAtomScf) {
  Geometry g;
  g.positions = {{0, 0, 0}};
  g.charges = {1};
  auto mi = lowdin_integrals(g);
  // one basis function: SCF energy is just h(0,0)
  EXPECT_NEAR(mi.h(0, 0), refval::kHAtomScf, 1e-9);
}

TEST(AoIntegrals, H2Rhf) {
  auto g = build_h_chain_bohr(2, 1.4);
  auto mi = lowdin_integrals(g);
  auto res = rhf(mi, 2);
  EXPECT_NEAR(res.scf.energy, refval::kH2R14BohrRhf, 1e-8);
  EXPECT_NEAR(res.scf.energy, -1.125, 1e-3);
}

TEST(AoIntegrals, TranslationInvariance) {
  auto g = build_h_chain(3, 1.1);
  Geometry g2 = g;
  for (auto& p : g2.positions) {
    p[0] += 0.31;
    p[1] -= 0.17;
    p[2] += 2.05;
  }
  auto a = compute_ao_integrals(g);
  auto b = compute_ao_integrals(g2);
  EXPECT_NEAR((a.overlap - b.overlap).cwiseAbs().maxCoeff(), 0.0, 1e-10);
  EXPECT_NEAR((a.kinetic - b.kinetic).cwiseAbs().maxCoeff(), 0.0, 1e-10);
  EXPECT_NEAR((a.nuclear - b.nuclear).cwiseAbs().maxCoeff(), 0.0, 1e-10);
  double dmax = 0.0;
  for (std::size_t i = 0; i < a.eri.data().size(); ++i)
    dmax = std::max(dmax, std::abs(a.eri.data()[i] - b.eri.data()[i]));
  EXPECT_LT(dmax, 1e-10);
  EXPECT_NEAR(a.e_nuclear, b.e_nuclear, 1e-12);
}

TEST(AoIntegrals, EriPermutationalSymmetry) {
  Geometry g;  // scalene chain to avoid accidental symmetry
  g.positions = {{0, 0, 0}, {0, 0, 1.3}, {0, 0, 3.1}};
  g.charges = {1, 1, 1};
  auto ao = compute_ao_integrals(g);
  const int n = 3;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          double v = ao.eri(p, q, r, s);
          EXPECT_DOUBLE_EQ(v, ao.eri(q, p, r, s));
          EXPECT_DOUBLE_EQ(v, ao.eri(p, q, s, r));
          EXPECT_DOUBLE_EQ(v, ao.eri(r, s, p, q));
        }
}

TEST(AoIntegrals, LowdinSymmetries) {
  auto g = build_h_chain(4, 1.2);
  auto mi = lowdin_integrals(g);
  EXPECT_LT((mi.h - mi.h.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  const int n = 4;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          double v = mi.v(p, q, r, s);
          EXPECT_NEAR(v, mi.v(q, p, r, s), 1e-12);
          EXPECT_NEAR(v, mi.v(p, q, s, r), 1e-12);
          EXPECT_NEAR(v, mi.v(r, s, p, q), 1e-12);
          EXPECT_NEAR(v, mi.v(s, r, q, p), 1e-12);
        }
}

TEST(Basis, DataFileMatchesEmbedded) {
  auto rows = load_basis_file(std::string(QCAF_DATA_DIR) + "/sto-6g.hydrogen.dat");
  const auto& embedded = detail::sto6g_hydrogen_raw();
  ASSERT_EQ(rows.size(), embedded.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_DOUBLE_EQ(rows[i].first, embedded[i].first);
    EXPECT_DOUBLE_EQ(rows[i].second, embedded[i].second);
  }
}

TEST(Basis, RejectsBadShells) {
  EXPECT_THROW(make_s_shell({0, 0, 0}, {}), Error);
  EXPECT_THROW(make_s_shell({0, 0, 0}, {{-1.0, 0.5}}), Error);
}
