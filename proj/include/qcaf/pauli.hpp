#pragma once

#include <algorithm>
#include <map>
#include <string>

#include "qcaf/common.hpp"
#include "qcaf/scf.hpp"

namespace qcaf {

/// Pauli string over n qubits in symplectic form:
///   P(x,z) = i^{|x&z|} X^x Z^z,
/// which is Hermitian (Y on sites where both bits are set).
struct PauliString {
  std::uint64_t x = 0;
  std::uint64_t z = 0;

  bool operator==(const PauliString& o) const { return x == o.x && z == o.z; }

  /// Letter at one site.
  char letter(int q) const {
    bool bx = (x >> q) & 1, bz = (z >> q) & 1;
    if (bx && bz) return 'Y';
    if (bx) return 'X';
    if (bz) return 'Z';
    return 'I';
  }

  std::string to_string(int n_qubits) const {
    std::string s;
    for (int q = 0; q < n_qubits; ++q) s += letter(q);
    return s;
  }
};

inline bool commutes(const PauliString& a, const PauliString& b) {
  return ((popcount64(a.z & b.x) & 1) == (popcount64(a.x & b.z) & 1));
}

/// Ordering used for deterministic grouping: site-by-site I < X < Y < Z.
inline int letter_rank(const PauliString& p, int q) {
  bool bx = (p.x >> q) & 1, bz = (p.z >> q) & 1;
  if (bx && bz) return 2;
  if (bx) return 1;
  if (bz) return 3;
  return 0;
}

inline bool lex_less(const PauliString& a, const PauliString& b, int n_qubits) {
  for (int q = 0; q < n_qubits; ++q) {
    int ra = letter_rank(a, q), rb = letter_rank(b, q);
    if (ra != rb) return ra < rb;
  }
  return false;
}

/// Hermitian linear combination of Pauli strings.
struct PauliOperator {
  int n_qubits = 0;
  std::vector<std::pair<cplx, PauliString>> terms;

  std::size_t size() const { return terms.size(); }
};

namespace detail {

/// Accumulator keyed by (x,z) with phase bookkeeping.
class PauliSum {
 public:
  explicit PauliSum(int n_qubits) : n_(n_qubits) {}

  /// add coeff * i^{phase} * X^x Z^z
  void add_raw(cplx coeff, int phase_i, std::uint64_t x, std::uint64_t z) {
    // normalize to the Hermitian convention P(x,z) = i^{|x&z|} X^x Z^z
    int corr = (phase_i - popcount64(x & z)) & 3;
    static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    map_[{x, z}] += coeff * ipow[corr];
  }

  PauliOperator finish(double drop_tol = 1e-14) const {
    PauliOperator op;
    op.n_qubits = n_;
    for (const auto& [key, c] : map_)
      if (std::abs(c) > drop_tol) op.terms.push_back({c, {key.first, key.second}});
    std::sort(op.terms.begin(), op.terms.end(), [&](const auto& a, const auto& b) {
      return lex_less(a.second, b.second, op.n_qubits);
    });
    return op;
  }

 private:
  int n_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, cplx> map_;
};

/// One ladder operator in expanded form: two (coeff, phase_i, x, z) pieces.
struct Ladder {
  // a_s   = 1/2 (XZchain) + i/2 (YZchain)
  // a+_s  = 1/2 (XZchain) - i/2 (YZchain)
  struct Piece {
    cplx coeff;
    std::uint64_t x, z;
  };
  std::array<Piece, 2> pieces;
};

inline Ladder ladder(int site, bool dagger) {
  std::uint64_t below = (std::uint64_t{1} << site) - 1;
  std::uint64_t xs = std::uint64_t{1} << site;
  // a_s  = Z_below (X_s + iY_s)/2 = 1/2 X^xs Z^below - 1/2 X^xs Z^{below|xs}
  // a+_s = Z_below (X_s - iY_s)/2 = 1/2 X^xs Z^below + 1/2 X^xs Z^{below|xs}
  // (using Y = i X Z, so (i/2) Y_s = -(1/2) X_s Z_s)
  Ladder l;
  l.pieces[0] = {cplx(0.5, 0.0), xs, below};
  l.pieces[1] = {cplx(dagger ? 0.5 : -0.5, 0.0), xs, below | xs};
  return l;
}

/// Multiply an accumulated (coeff, phase, x, z) monomial by a ladder piece.
struct Monomial {
  cplx coeff;
  int phase = 0;  // extra i^phase
  std::uint64_t x = 0, z = 0;
};

inline Monomial mul(const Monomial& m, const Ladder::Piece& p) {
  Monomial out;
  // X^{xa} Z^{za} X^{xb} Z^{zb} = (-1)^{|za & xb|} X^{xa^xb} Z^{za^zb}
  int sign = popcount64(m.z & p.x) & 1;
  out.coeff = m.coeff * p.coeff * (sign ? -1.0 : 1.0);
  // p.x&p.z overlap means the piece contains Y written as i*X*Z with phase in coeff?
  // pieces store plain X^x Z^z products; their imaginary prefactors sit in coeff.
  out.phase = m.phase;
  out.x = m.x ^ p.x;
  out.z = m.z ^ p.z;
  return out;
}

template <typename Fn>
inline void for_each_product(const std::vector<Ladder>& ops, cplx scale, Fn&& emit) {
  // expand the product of ladder expansions (2^k monomials)
  std::vector<Monomial> cur{{scale, 0, 0, 0}};
  for (const auto& l : ops) {
    std::vector<Monomial> next;
    next.reserve(cur.size() * 2);
    for (const auto& m : cur)
      for (const auto& p : l.pieces) next.push_back(mul(m, p));
    cur = std::move(next);
  }
  for (const auto& m : cur) emit(m);
}

}  // namespace detail

/// Jordan-Wigner qubit operator of a spin-blocked electronic Hamiltonian.
/// Sites 0..N-1 are alpha orbitals, N..2N-1 beta orbitals. The constant
/// (nuclear repulsion) enters as an identity term.
inline PauliOperator jordan_wigner(const SpinBlockedIntegrals& si) {
  const int n = si.n_orbitals;
  require(n <= 32, "jordan_wigner: orbital count exceeds the 64-qubit mask");
  detail::PauliSum sum(2 * n);
  sum.add_raw(si.e_nuclear, 0, 0, 0);

  auto site = [n](int p, int spin) { return spin == 0 ? p : n + p; };
  auto add_monos = [&](const std::vector<detail::Ladder>& ops, double coeff) {
    detail::for_each_product(ops, cplx(coeff, 0.0), [&](const detail::Monomial& m) {
      sum.add_raw(m.coeff, m.phase, m.x, m.z);
    });
  };

  // one-body: sum_s h^s_pq a+_{ps} a_{qs}
  for (int spin = 0; spin < 2; ++spin) {
    const Mat& h = (spin == 0) ? si.h_a : si.h_b;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        if (h(p, q) == 0.0) continue;
        add_monos({detail::ladder(site(p, spin), true),
                   detail::ladder(site(q, spin), false)},
                  h(p, q));
      }
  }
  // two-body: 1/2 sum_{st} (pq|rs)^{st} a+_{ps} a+_{rt} a_{st} a_{qs}
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2) {
      const Tensor4& v = (s1 == 0) ? (s2 == 0 ? si.v_aa : si.v_ab)
                                   : (s2 == 0 ? si.v_ab : si.v_bb);
      auto vat = [&](int p, int q, int r, int s) {
        // v_ab is stored with the alpha pair first
        if (s1 == 1 && s2 == 0) return v(r, s, p, q);
        return v(p, q, r, s);
      };
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s) {
              double c = vat(p, q, r, s);
              if (c == 0.0) continue;
              add_monos({detail::ladder(site(p, s1), true),
                         detail::ladder(site(r, s2), true),
                         detail::ladder(site(s, s2), false),
                         detail::ladder(site(q, s1), false)},
                        0.5 * c);
            }
    }
  return sum.finish();
}

inline PauliOperator jordan_wigner(const MolecularIntegrals& mi) {
  return jordan_wigner(as_spin_blocked(mi));
}

/// Hermiticity residual: max |coeff - conj(coeff)| over terms (each P(x,z)
/// is Hermitian, so Hermiticity means real coefficients).
inline double hermiticity_residual(const PauliOperator& op) {
  double m = 0.0;
  for (const auto& [c, p] : op.terms) m = std::max(m, std::abs(c.imag()));
  return m;
}

struct CommutingGroups {
  int n_qubits = 0;
  std::vector<std::vector<std::pair<cplx, PauliString>>> groups;

  std::size_t n_groups() const { return groups.size(); }
  std::size_t n_terms() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.size();
    return n;
  }
};

/// Greedy first-fit partition of the operator terms into mutually commuting
/// groups, processed in lexicographic order, so the partition is
/// deterministic. Strings sharing an X/Y pattern orbit - equal x mask and
/// equal z mask outside the x support - are kept together: they always
/// commute pairwise, and for a Jordan-Wigner fermionic operator each orbit
/// is a complete particle-number-conserving combination, so every group
/// evolution conserves particle number and Sz. The identity term, if
/// present, is skipped (it only shifts the energy).
inline CommutingGroups group_commuting(const PauliOperator& op) {
  CommutingGroups out;
  out.n_qubits = op.n_qubits;
  // collect orbit units in first-appearance (lexicographic) order
  std::vector<std::vector<std::pair<cplx, PauliString>>> units;
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> unit_index;
  for (const auto& term : op.terms) {
    if (term.second.x == 0 && term.second.z == 0) continue;
    std::pair<std::uint64_t, std::uint64_t> key{term.second.x,
                                                term.second.z & ~term.second.x};
    auto it = unit_index.find(key);
    if (it == unit_index.end()) {
      unit_index[key] = units.size();
      units.push_back({term});
    } else {
      units[it->second].push_back(term);
    }
  }
  for (const auto& unit : units) {
    bool placed = false;
    for (auto& g : out.groups) {
      bool ok = true;
      for (const auto& t : g) {
        for (const auto& u : unit)
          if (!commutes(t.second, u.second)) {
            ok = false;
            break;
          }
        if (!ok) break;
      }
      if (ok) {
        g.insert(g.end(), unit.begin(), unit.end());
        placed = true;
        break;
      }
    }
    if (!placed) out.groups.push_back(unit);
  }
  return out;
}

}  // namespace qcaf
