#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qcaf/common.hpp"
#include "qcaf/geometry.hpp"

namespace qcaf {

/// Contracted s-type Gaussian shell. Contraction coefficients are stored
/// against unit-normalized primitives and rescaled so the contracted
/// function has unit self-overlap.
struct GaussianShell {
  std::array<double, 3> center;
  std::vector<double> exponents;
  std::vector<double> coefficients;
};

namespace detail {
// STO-6G hydrogen s shell (zeta=1.24). Mirrors data/sto-6g.hydrogen.dat;
// equality of the two is enforced by a unit test.
inline const std::vector<std::pair<double, double>>& sto6g_hydrogen_raw() {
  static const std::vector<std::pair<double, double>> rows = {
      {35.52322122, 0.00916359628}, {6.513143725, 0.04936149294},
      {1.822142904, 0.16853830490}, {0.625955266, 0.37056279970},
      {0.243076747, 0.41649152980}, {0.100112428, 0.13033408410}};
  return rows;
}
}  // namespace detail

/// Normalize a raw (exponent, coefficient) list into a GaussianShell.
inline GaussianShell make_s_shell(const std::array<double, 3>& center,
                                  const std::vector<std::pair<double, double>>& rows) {
  require(!rows.empty(), "empty shell");
  GaussianShell sh;
  sh.center = center;
  for (auto [e, c] : rows) {
    require(e > 0.0, "shell exponents must be positive");
    sh.exponents.push_back(e);
    // coefficient times primitive normalization (2a/pi)^(3/4)
    sh.coefficients.push_back(c * std::pow(2.0 * e / kPi, 0.75));
  }
  // contracted self-overlap renormalization
  double s = 0.0;
  for (std::size_t i = 0; i < sh.exponents.size(); ++i) {
    for (std::size_t j = 0; j < sh.exponents.size(); ++j) {
      double p = sh.exponents[i] + sh.exponents[j];
      s += sh.coefficients[i] * sh.coefficients[j] * std::pow(kPi / p, 1.5);
    }
  }
  for (auto& c : sh.coefficients) c /= std::sqrt(s);
  return sh;
}

/// Parse a basis data file: comment lines start with '#', data lines are
/// "exponent coefficient".
inline std::vector<std::pair<double, double>> parse_basis_file(std::istream& in) {
  std::vector<std::pair<double, double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    auto h = line.find('#');
    if (h != std::string::npos) line.erase(h);
    std::istringstream ss(line);
    double e, c;
    if (ss >> e >> c) rows.emplace_back(e, c);
  }
  require(!rows.empty(), "basis file contains no primitive rows");
  return rows;
}

inline std::vector<std::pair<double, double>> load_basis_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open basis file: " + path);
  return parse_basis_file(in);
}

/// One STO-6G s shell per hydrogen atom.
inline std::vector<GaussianShell> sto6g_basis(const Geometry& g) {
  std::vector<GaussianShell> shells;
  for (int a = 0; a < g.n_atoms(); ++a) {
    require(g.charges[a] == 1, "only hydrogen atoms are supported");
    shells.push_back(make_s_shell(g.positions[a], detail::sto6g_hydrogen_raw()));
  }
  return shells;
}

inline std::vector<GaussianShell> basis_from_rows(
    const Geometry& g, const std::vector<std::pair<double, double>>& rows) {
  std::vector<GaussianShell> shells;
  for (int a = 0; a < g.n_atoms(); ++a) shells.push_back(make_s_shell(g.positions[a], rows));
  return shells;
}

}  // namespace qcaf
