#pragma once

#include "qcaf/circuits.hpp"
#include "qcaf/determinants.hpp"

namespace qcaf {

namespace detail {

/// Apply one ladder operator on a full (alpha,beta) mask pair.
/// Returns false when blocked; accumulates the JW sign.
inline bool apply_site_op(int site, bool dagger, int n_orb, std::uint32_t& ma,
                          std::uint32_t& mb, int& sign) {
  if (site < n_orb) {
    std::uint32_t bit = std::uint32_t{1} << site;
    if (dagger ? (ma & bit) : !(ma & bit)) return false;
    if (popcount64(ma & (bit - 1)) & 1) sign = -sign;
    ma ^= bit;
  } else {
    int p = site - n_orb;
    std::uint32_t bit = std::uint32_t{1} << p;
    if (dagger ? (mb & bit) : !(mb & bit)) return false;
    if ((popcount64(ma) + popcount64(mb & (bit - 1))) & 1) sign = -sign;
    mb ^= bit;
  }
  return true;
}

/// Apply A (creations..., annihilations...) to a determinant, annihilations
/// first (rightmost operator first).
inline bool apply_excitation_a(const FermionicExcitation& ex, int n_orb,
                               std::uint32_t& ma, std::uint32_t& mb, int& sign) {
  sign = 1;
  for (auto it = ex.annihilate.rbegin(); it != ex.annihilate.rend(); ++it)
    if (!apply_site_op(*it, false, n_orb, ma, mb, sign)) return false;
  for (auto it = ex.create.rbegin(); it != ex.create.rend(); ++it)
    if (!apply_site_op(*it, true, n_orb, ma, mb, sign)) return false;
  return true;
}

}  // namespace detail

/// Circuit application within a fixed particle-number sector. Exact for
/// excitation rotations (G^3 = -G pair rotations), orbital rotations
/// (scaled Taylor series of the one-body generator) and diagonal Coulomb
/// phases. Stateless and shareable across threads.
class SectorEngine {
 public:
  explicit SectorEngine(const SectorBasis* basis) : basis_(basis) {
    basis_->alpha_excitations();  // warm the excitation tables
    basis_->beta_excitations();
  }

  const SectorBasis& basis() const { return *basis_; }

  VecC reference_state(std::uint32_t ref_a, std::uint32_t ref_b) const {
    VecC v = VecC::Zero(basis_->size());
    v(basis_->index(ref_a, ref_b)) = 1.0;
    return v;
  }

  /// exp(theta (A - A+)) via the exact pair rotation.
  void apply_excitation_rotation(VecC& v, const FermionicExcitation& ex,
                                 double theta) const {
    const double c = std::cos(theta), s = std::sin(theta);
    const int n = basis_->n_orbitals();
    const std::size_t dim = basis_->size();
    for (std::size_t i = 0; i < dim; ++i) {
      std::uint32_t ma = basis_->alpha_mask(i), mb = basis_->beta_mask(i);
      int sg = 1;
      if (!detail::apply_excitation_a(ex, n, ma, mb, sg)) continue;
      std::size_t j = basis_->index(ma, mb);
      cplx vi = v(i), vj = v(j);
      v(i) = c * vi - sg * s * vj;
      v(j) = sg * s * vi + c * vj;
    }
  }

  /// w += (A - A+) v, used for pool-gradient screening.
  void accumulate_excitation_generator(const FermionicExcitation& ex,
                                       const VecC& v, VecC& w) const {
    const int n = basis_->n_orbitals();
    const std::size_t dim = basis_->size();
    for (std::size_t i = 0; i < dim; ++i) {
      std::uint32_t ma = basis_->alpha_mask(i), mb = basis_->beta_mask(i);
      int sg = 1;
      if (!detail::apply_excitation_a(ex, n, ma, mb, sg)) continue;
      std::size_t j = basis_->index(ma, mb);
      w(j) += static_cast<double>(sg) * v(i);
      w(i) -= static_cast<double>(sg) * v(j);
    }
  }

  /// y = sum_pq K^a_pq E^a_pq x + K^b analogously.
  void one_body_apply(const MatC& ka, const MatC& kb, const VecC& x, VecC& y) const {
    y.setZero(basis_->size());
    const auto& exc_a = basis_->alpha_excitations();
    const auto& exc_b = basis_->beta_excitations();
    const std::size_t nb = basis_->n_beta_strings();
    const std::size_t dim = basis_->size();
    for (std::size_t i = 0; i < dim; ++i) {
      cplx xi = x(i);
      if (xi == cplx(0.0, 0.0)) continue;
      const std::size_t ia = i / nb, ib = i % nb;
      for (const auto& e : exc_a[ia]) {
        cplx kv = ka(e.p, e.q);
        if (kv != cplx(0.0, 0.0)) y(e.target * nb + ib) += kv * double(e.sign) * xi;
      }
      for (const auto& e : exc_b[ib]) {
        cplx kv = kb(e.p, e.q);
        if (kv != cplx(0.0, 0.0)) y(ia * nb + e.target) += kv * double(e.sign) * xi;
      }
    }
  }

  /// In-place exp(K_hat) on a sector vector (scaled Taylor series).
  void apply_orbital_exponential(VecC& v, const MatC& ka, const MatC& kb) const {
    double bound = ka.cwiseAbs().sum() + kb.cwiseAbs().sum();
    int squarings = 0;
    while (bound > 0.25 && squarings < 40) {
      bound *= 0.5;
      ++squarings;
    }
    double scale = std::ldexp(1.0, -squarings);
    MatC kas = ka * scale, kbs = kb * scale;
    VecC term(basis_->size()), next(basis_->size());
    for (int rep = 0; rep < (1 << squarings); ++rep) {
      term = v;
      for (int kk = 1; kk <= 24; ++kk) {
        one_body_apply(kas, kbs, term, next);
        next /= double(kk);
        term = next;
        v += term;
        if (term.squaredNorm() < 1e-32) break;
      }
    }
  }

  void apply_generator(VecC& v, const Generator& g, const double* params,
                       bool inverse = false) const {
    const int n = basis_->n_orbitals();
    const double flip = inverse ? -1.0 : 1.0;
    switch (g.kind) {
      case GenKind::kPauliSum: {
        require(g.excitation.has_value(),
                "sector engine: generator lacks a fermionic excitation form");
        apply_excitation_rotation(v, *g.excitation, params[g.slot] * flip);
        break;
      }
      case GenKind::kOrbitalRotation: {
        MatC k = detail::rotation_generator(params + g.slot_begin, n);
        k *= g.rotation_sign * flip;
        apply_orbital_exponential(v, k, k);
        break;
      }
      case GenKind::kDiagonalCoulomb: {
        Mat js, jc;
        detail::unpack_coulomb(params + g.slot_begin, n, js, jc);
        const std::size_t dim = basis_->size();
        for (std::size_t i = 0; i < dim; ++i) {
          std::uint64_t m = static_cast<std::uint64_t>(basis_->alpha_mask(i)) |
                            (static_cast<std::uint64_t>(basis_->beta_mask(i)) << n);
          double ph = flip * detail::coulomb_phase(g, js, jc, m, n);
          v(i) *= cplx(std::cos(ph), std::sin(ph));
        }
        break;
      }
    }
  }

  VecC run(const AnsatzCircuit& circ, const Vec& params) const {
    require(params.size() == circ.n_params, "parameter count mismatch");
    require(circ.sector_safe(), "circuit not evaluable in sector space");
    VecC v = reference_state(circ.ref_alpha, circ.ref_beta);
    for (const auto& g : circ.ops) apply_generator(v, g, params.data());
    return v;
  }

  void run_inverse(VecC& v, const AnsatzCircuit& circ, const Vec& params) const {
    for (auto it = circ.ops.rbegin(); it != circ.ops.rend(); ++it)
      apply_generator(v, *it, params.data(), /*inverse=*/true);
  }

  /// Precomputed pair map of one excitation rotation: entry i holds
  /// +-(j+1) when A maps |i> to sign |j>, 0 when A annihilates |i|.
  struct CompiledExcitation {
    int slot = -1;
    std::vector<std::int32_t> partner;
  };

  struct CompiledCircuit {
    const AnsatzCircuit* circuit = nullptr;
    // ops are either compiled excitations (table >= 0) or generic indices
    struct Step {
      int compiled = -1;  // index into excitations, or -1
      int op = 0;         // index into circuit->ops
    };
    std::vector<Step> steps;
    std::vector<CompiledExcitation> excitations;
  };

  /// Build pair tables for all excitation rotations (memory permitting).
  CompiledCircuit compile(const AnsatzCircuit& circ,
                          std::size_t max_table_entries = 50000000) const {
    CompiledCircuit cc;
    cc.circuit = &circ;
    const std::size_t dim = basis_->size();
    std::size_t n_exc = 0;
    for (const auto& g : circ.ops)
      if (g.kind == GenKind::kPauliSum && g.excitation) ++n_exc;
    const bool tables_fit = n_exc * dim <= max_table_entries;
    const int n = basis_->n_orbitals();
    for (std::size_t oi = 0; oi < circ.ops.size(); ++oi) {
      const auto& g = circ.ops[oi];
      if (g.kind == GenKind::kPauliSum && g.excitation && tables_fit) {
        CompiledExcitation ce;
        ce.slot = g.slot;
        ce.partner.assign(dim, 0);
        for (std::size_t i = 0; i < dim; ++i) {
          std::uint32_t ma = basis_->alpha_mask(i), mb = basis_->beta_mask(i);
          int sg = 1;
          if (!detail::apply_excitation_a(*g.excitation, n, ma, mb, sg)) continue;
          std::int32_t j = static_cast<std::int32_t>(basis_->index(ma, mb)) + 1;
          ce.partner[i] = sg > 0 ? j : -j;
        }
        cc.steps.push_back({static_cast<int>(cc.excitations.size()),
                            static_cast<int>(oi)});
        cc.excitations.push_back(std::move(ce));
      } else {
        cc.steps.push_back({-1, static_cast<int>(oi)});
      }
    }
    return cc;
  }

  void run_compiled(VecC& v, const CompiledCircuit& cc, const Vec& params) const {
    require(params.size() == cc.circuit->n_params, "parameter count mismatch");
    v = reference_state(cc.circuit->ref_alpha, cc.circuit->ref_beta);
    for (const auto& step : cc.steps) {
      if (step.compiled < 0) {
        apply_generator(v, cc.circuit->ops[step.op], params.data());
        continue;
      }
      const auto& ce = cc.excitations[step.compiled];
      const double theta = params[ce.slot];
      const double c = std::cos(theta), s = std::sin(theta);
      const std::int32_t* part = ce.partner.data();
      cplx* vd = v.data();
      const std::size_t dim = ce.partner.size();
      for (std::size_t i = 0; i < dim; ++i) {
        std::int32_t pj = part[i];
        if (pj == 0) continue;
        double sg = pj > 0 ? 1.0 : -1.0;
        std::size_t j = static_cast<std::size_t>(pj > 0 ? pj : -pj) - 1;
        cplx vi = vd[i], vj = vd[j];
        vd[i] = c * vi - sg * s * vj;
        vd[j] = sg * s * vi + c * vj;
      }
    }
  }

 private:
  const SectorBasis* basis_;
};

/// Evaluate a circuit into a dense statevector; uses the sector
/// representation when the gate set allows it.
inline Statevector evaluate(const AnsatzCircuit& circ, const Vec& params) {
  if (circ.sector_safe()) {
    SectorBasis basis(circ.n_orb, circ.n_alpha(), circ.n_beta());
    SectorEngine eng(&basis);
    return scatter_sector(eng.run(circ, params), basis);
  }
  return evaluate_dense(circ, params);
}

}  // namespace qcaf
