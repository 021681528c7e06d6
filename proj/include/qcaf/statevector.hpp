#pragma once

#include <cmath>

#include "qcaf/determinants.hpp"
#include "qcaf/pauli.hpp"

namespace qcaf {

/// Dense complex statevector over n qubits (2N spin orbitals, alpha block
/// first). 20 qubits is the supported ceiling.
struct Statevector {
  int n_qubits = 0;
  std::vector<cplx> amps;

  static Statevector zero(int n_qubits) {
    require(n_qubits >= 1 && n_qubits <= 20,
            "statevector capacity: supported up to 20 qubits");
    Statevector sv;
    sv.n_qubits = n_qubits;
    sv.amps.assign(std::size_t{1} << n_qubits, cplx(0.0, 0.0));
    return sv;
  }

  std::size_t size() const { return amps.size(); }

  double norm() const {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return std::sqrt(s);
  }

  void normalize() {
    double n = norm();
    require(n > 0, "cannot normalize a zero statevector");
    for (auto& a : amps) a /= n;
  }
};

/// Computational basis state for given per-spin occupations.
inline Statevector prepare_reference(int n_orb, std::uint32_t alpha_mask,
                                     std::uint32_t beta_mask) {
  require((alpha_mask >> n_orb) == 0 && (beta_mask >> n_orb) == 0,
          "occupation mask outside the orbital range");
  Statevector sv = Statevector::zero(2 * n_orb);
  std::size_t idx = static_cast<std::size_t>(alpha_mask) |
                    (static_cast<std::size_t>(beta_mask) << n_orb);
  sv.amps[idx] = cplx(1.0, 0.0);
  return sv;
}

inline cplx inner(const Statevector& a, const Statevector& b) {
  require(a.n_qubits == b.n_qubits, "statevector size mismatch");
  cplx s(0.0, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a.amps[i]) * b.amps[i];
  return s;
}

namespace detail {
inline cplx ipow(int k) {
  static const cplx tab[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return tab[k & 3];
}
}  // namespace detail

/// out += coeff * P |in>, with P(x,z)|m> = i^{|x&z|} (-1)^{|z&m|} |m^x>.
inline void accumulate_pauli(const PauliString& p, cplx coeff,
                             const Statevector& in, Statevector& out) {
  const cplx base = coeff * detail::ipow(popcount64(p.x & p.z));
  const std::size_t n = in.size();
  for (std::size_t m = 0; m < n; ++m) {
    cplx a = in.amps[m];
    if (a == cplx(0.0, 0.0)) continue;
    cplx f = (popcount64(p.z & m) & 1) ? -base : base;
    out.amps[m ^ p.x] += f * a;
  }
}

/// In-place e^{i theta P}: cos(theta) + i sin(theta) P.
inline void apply_pauli_rotation(Statevector& sv, const PauliString& p, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  const cplx is = cplx(0.0, s) * detail::ipow(popcount64(p.x & p.z));
  const std::size_t n = sv.size();
  if (p.x == 0) {
    for (std::size_t m = 0; m < n; ++m) {
      cplx f = (popcount64(p.z & m) & 1) ? -is : is;
      sv.amps[m] *= (c + f);
    }
    return;
  }
  for (std::size_t m = 0; m < n; ++m) {
    std::size_t mm = m ^ p.x;
    if (mm < m) continue;  // visit each pair once
    cplx am = sv.amps[m], amm = sv.amps[mm];
    cplx fm = (popcount64(p.z & m) & 1) ? -is : is;    // P|m> phase
    cplx fmm = (popcount64(p.z & mm) & 1) ? -is : is;  // P|mm> phase
    sv.amps[m] = c * am + fmm * amm;
    sv.amps[mm] = c * amm + fm * am;
  }
}

/// <psi| Op |psi> evaluated term-wise over the Pauli sum.
inline cplx expectation_pauli(const Statevector& sv, const PauliOperator& op) {
  cplx total(0.0, 0.0);
  const std::size_t n = sv.size();
  for (const auto& [coeff, p] : op.terms) {
    cplx base = detail::ipow(popcount64(p.x & p.z));
    cplx acc(0.0, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
      cplx a = sv.amps[m];
      if (a == cplx(0.0, 0.0)) continue;
      cplx f = (popcount64(p.z & m) & 1) ? -base : base;
      acc += std::conj(sv.amps[m ^ p.x]) * f * a;
    }
    total += coeff * acc;
  }
  return total;
}

/// y += c * (a+_site_p a_site_q) x over full JW site indices (0..2N-1).
inline void accumulate_one_body_site(int p, int q, cplx c, const Statevector& x,
                                     Statevector& y) {
  const std::size_t n = x.size();
  const std::size_t bp = std::size_t{1} << p, bq = std::size_t{1} << q;
  if (p == q) {
    for (std::size_t m = 0; m < n; ++m)
      if (m & bp) y.amps[m] += c * x.amps[m];
    return;
  }
  for (std::size_t m = 0; m < n; ++m) {
    if (!(m & bq) || (m & bp)) continue;
    cplx a = x.amps[m];
    if (a == cplx(0.0, 0.0)) continue;
    std::size_t m1 = m ^ bq;
    int sign = parity_below(m1, q) * parity_below(m1, p);
    y.amps[m1 | bp] += static_cast<double>(sign) * c * a;
  }
}

/// Spin-resolved one-body generator K (anti-Hermitian per spin) applied as
/// y += sum_pq K^s_pq a+_{ps} a_{qs} x.
inline void accumulate_one_body(const MatC& k_alpha, const MatC& k_beta,
                                const Statevector& x, Statevector& y) {
  const int n = x.n_qubits / 2;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      if (k_alpha(p, q) != cplx(0.0, 0.0))
        accumulate_one_body_site(p, q, k_alpha(p, q), x, y);
      if (k_beta(p, q) != cplx(0.0, 0.0))
        accumulate_one_body_site(n + p, n + q, k_beta(p, q), x, y);
    }
}

/// In-place exp(K_hat) via scaled Taylor series; K_hat is the JW image of a
/// one-body generator, so the exponential is exact up to series truncation.
inline void apply_one_body_exponential(Statevector& sv, const MatC& k_alpha,
                                       const MatC& k_beta) {
  double bound = k_alpha.cwiseAbs().sum() + k_beta.cwiseAbs().sum();
  int squarings = 0;
  while (bound > 0.25 && squarings < 40) {
    bound *= 0.5;
    ++squarings;
  }
  double scale = std::ldexp(1.0, -squarings);
  MatC ka = k_alpha * scale, kb = k_beta * scale;
  for (int rep = 0; rep < (1 << squarings); ++rep) {
    Statevector term = sv, acc = sv;
    for (int k = 1; k <= 24; ++k) {
      Statevector next = Statevector::zero(sv.n_qubits);
      accumulate_one_body(ka, kb, term, next);
      for (std::size_t i = 0; i < acc.size(); ++i) next.amps[i] /= double(k);
      term = next;
      double tn = 0.0;
      for (std::size_t i = 0; i < acc.size(); ++i) {
        acc.amps[i] += term.amps[i];
        tn += std::norm(term.amps[i]);
      }
      if (tn < 1e-32) break;
    }
    sv = acc;
  }
}

/// In-place diagonal phase e^{i phase(m)} from a per-basis-state functional.
template <typename PhaseFn>
inline void apply_diagonal_phase(Statevector& sv, PhaseFn&& phase) {
  for (std::size_t m = 0; m < sv.size(); ++m) {
    if (sv.amps[m] == cplx(0.0, 0.0)) continue;
    double ph = phase(m);
    sv.amps[m] *= cplx(std::cos(ph), std::sin(ph));
  }
}

/// Project onto the (n_alpha, n_beta) particle-number sector.
inline VecC gather_sector(const Statevector& sv, const SectorBasis& basis) {
  require(2 * basis.n_orbitals() == sv.n_qubits, "sector/statevector mismatch");
  VecC out(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i)
    out(i) = sv.amps[basis.statevector_index(i)];
  return out;
}

inline Statevector scatter_sector(const VecC& x, const SectorBasis& basis) {
  Statevector sv = Statevector::zero(2 * basis.n_orbitals());
  for (std::size_t i = 0; i < basis.size(); ++i)
    sv.amps[basis.statevector_index(i)] = x(i);
  return sv;
}

/// Total weight outside the sector (leakage diagnostic).
inline double sector_leakage(const Statevector& sv, const SectorBasis& basis) {
  double in = gather_sector(sv, basis).squaredNorm();
  double all = 0.0;
  for (const auto& a : sv.amps) all += std::norm(a);
  return all - in;
}

}  // namespace qcaf
