#pragma once

#include <cmath>

#include "qcaf/common.hpp"
#include "qcaf/scf.hpp"

namespace qcaf {

/// Spin-orbital T2 amplitudes over the blocked ordering (alpha orbitals
/// 0..N-1, beta orbitals N..2N-1). Antisymmetric in i<->j and a<->b.
struct Amplitudes2 {
  int n_spin_orbitals = 0;
  int n_occ_alpha = 0, n_occ_beta = 0;
  std::vector<double> t;  // dense (2N)^4, index (i,j,a,b)
  double e_mp2 = 0.0;
  int clamped = 0;  // amplitudes zeroed due to near-degenerate denominators

  double& at(int i, int j, int a, int b) {
    std::size_t n = n_spin_orbitals;
    return t[((static_cast<std::size_t>(i) * n + j) * n + a) * n + b];
  }
  double at(int i, int j, int a, int b) const {
    std::size_t n = n_spin_orbitals;
    return t[((static_cast<std::size_t>(i) * n + j) * n + a) * n + b];
  }
};

namespace detail {
inline bool spin_alpha(int so, int n) { return so < n; }
inline int spatial(int so, int n) { return so < n ? so : so - n; }
}  // namespace detail

/// MP2 doubles amplitudes from canonical restricted MO integrals:
/// t[ijab] = <ij||ab> / (eps_i + eps_j - eps_a - eps_b).
inline Amplitudes2 mp2_t2(const MolecularIntegrals& mo, const ScfSolution& scf) {
  const int n = mo.n_orbitals;
  const int nso = 2 * n;
  Amplitudes2 amp;
  amp.n_spin_orbitals = nso;
  amp.n_occ_alpha = scf.n_alpha;
  amp.n_occ_beta = scf.n_beta;
  amp.t.assign(static_cast<std::size_t>(nso) * nso * nso * nso, 0.0);

  auto eps = [&](int so) {
    return detail::spin_alpha(so, n) ? scf.eps_alpha(detail::spatial(so, n))
                                     : scf.eps_beta(detail::spatial(so, n));
  };
  auto occ = [&](int so) {
    return detail::spin_alpha(so, n) ? detail::spatial(so, n) < scf.n_alpha
                                     : detail::spatial(so, n) < scf.n_beta;
  };
  // physicists' <pq|rs> over spin orbitals from chemists' spatial (pr|qs)
  auto phys = [&](int p, int q, int r, int s) -> double {
    bool sp = detail::spin_alpha(p, n), sq = detail::spin_alpha(q, n);
    bool sr = detail::spin_alpha(r, n), ss = detail::spin_alpha(s, n);
    if (sp != sr || sq != ss) return 0.0;
    return mo.v(detail::spatial(p, n), detail::spatial(r, n),
                detail::spatial(q, n), detail::spatial(s, n));
  };

  double e2 = 0.0;
  for (int i = 0; i < nso; ++i) {
    if (!occ(i)) continue;
    for (int j = 0; j < nso; ++j) {
      if (!occ(j)) continue;
      for (int a = 0; a < nso; ++a) {
        if (occ(a)) continue;
        for (int b = 0; b < nso; ++b) {
          if (occ(b)) continue;
          double anti = phys(i, j, a, b) - phys(i, j, b, a);
          if (anti == 0.0) continue;
          double denom = eps(i) + eps(j) - eps(a) - eps(b);
          if (std::abs(denom) < 1e-8) {
            ++amp.clamped;
            continue;
          }
          double t = anti / denom;
          amp.at(i, j, a, b) = t;
          e2 += 0.25 * t * anti;
        }
      }
    }
  }
  amp.e_mp2 = e2;
  return amp;
}

}  // namespace qcaf
