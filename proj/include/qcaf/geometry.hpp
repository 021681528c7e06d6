#pragma once

#include <array>
#include <cmath>

#include "qcaf/common.hpp"

namespace qcaf {

struct Geometry {
  std::vector<std::array<double, 3>> positions;  // Bohr
  std::vector<int> charges;

  int n_atoms() const { return static_cast<int>(positions.size()); }
};

inline double distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Collinear equally spaced hydrogen chain along z. Bond length in Angstrom.
inline Geometry build_h_chain(int n_atoms, double bond_length_angstrom) {
  require(n_atoms >= 2, "build_h_chain: need at least 2 atoms");
  require(bond_length_angstrom > 0.0, "build_h_chain: bond length must be positive");
  Geometry g;
  double r = bond_length_angstrom * kAngstromToBohr;
  for (int i = 0; i < n_atoms; ++i) {
    g.positions.push_back({0.0, 0.0, i * r});
    g.charges.push_back(1);
  }
  return g;
}

inline Geometry build_h_chain_bohr(int n_atoms, double bond_length_bohr) {
  require(bond_length_bohr > 0.0, "build_h_chain_bohr: bond length must be positive");
  return build_h_chain(n_atoms, bond_length_bohr / kAngstromToBohr);
}

inline double nuclear_repulsion(const Geometry& g) {
  double e = 0.0;
  for (int a = 0; a < g.n_atoms(); ++a) {
    for (int b = a + 1; b < g.n_atoms(); ++b) {
      double r = distance(g.positions[a], g.positions[b]);
      require(r > 1e-10, "nuclear repulsion diverges: coincident atoms");
      e += g.charges[a] * g.charges[b] / r;
    }
  }
  return e;
}

}  // namespace qcaf
