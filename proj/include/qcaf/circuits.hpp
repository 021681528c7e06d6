#pragma once

#include <optional>

#include "qcaf/mp2.hpp"
#include "qcaf/pauli.hpp"
#include "qcaf/statevector.hpp"

namespace qcaf {

enum class GenKind {
  kPauliSum,          // exp(i theta sum_t c_t P_t), mutually commuting terms
  kOrbitalRotation,   // exp(K_hat(kappa)), one N x N unitary per spin
  kDiagonalCoulomb,   // exp(i J_hat), masked density-density phases
};

/// G = A - A+ where A is a product of creations/annihilations over JW sites.
/// A is applied to a ket annihilations-first (listed right to left).
struct FermionicExcitation {
  std::vector<int> create;
  std::vector<int> annihilate;
};

struct Generator {
  GenKind kind = GenKind::kPauliSum;
  std::string label;

  // kPauliSum
  int slot = -1;
  std::vector<std::pair<double, PauliString>> paulis;
  std::optional<FermionicExcitation> excitation;  // present for UCC-type ops

  // kOrbitalRotation / kDiagonalCoulomb
  int slot_begin = 0;
  int slot_count = 0;
  double rotation_sign = 1.0;  // -1 applies the adjoint rotation
  // diagonal-Coulomb coupling masks (pairs p<=q into symmetric J matrices)
  std::vector<std::pair<int, int>> mask_same;
  std::vector<std::pair<int, int>> mask_cross;
};

struct AnsatzCircuit {
  int n_orb = 0;
  std::uint32_t ref_alpha = 0, ref_beta = 0;
  std::string family;
  int k = 1;
  int n_params = 0;
  std::vector<Generator> ops;  // ops[0] acts on the reference first

  int n_alpha() const { return popcount64(ref_alpha); }
  int n_beta() const { return popcount64(ref_beta); }

  /// True when every operation can be applied inside the fixed particle
  /// number sector (UCC/LUCJ-type circuits).
  bool sector_safe() const {
    for (const auto& g : ops)
      if (g.kind == GenKind::kPauliSum && !g.excitation) return false;
    return true;
  }
};

namespace detail {

/// JW decomposition of G = A - A+ as sum_t (i c_t) P_t; returns (c_t, P_t)
/// so that exp(theta G) = prod_t exp(i theta c_t P_t).
inline std::vector<std::pair<double, PauliString>> excitation_paulis(
    const FermionicExcitation& ex, int n_qubits) {
  PauliSum sum(n_qubits);
  std::vector<Ladder> fwd;
  for (int s : ex.create) fwd.push_back(ladder(s, true));
  for (int s : ex.annihilate) fwd.push_back(ladder(s, false));
  for_each_product(fwd, cplx(1.0, 0.0),
                   [&](const Monomial& m) { sum.add_raw(m.coeff, 0, m.x, m.z); });
  // minus the adjoint: reverse order, daggers flipped
  std::vector<Ladder> rev;
  for (auto it = ex.annihilate.rbegin(); it != ex.annihilate.rend(); ++it)
    rev.push_back(ladder(*it, true));
  for (auto it = ex.create.rbegin(); it != ex.create.rend(); ++it)
    rev.push_back(ladder(*it, false));
  for_each_product(rev, cplx(-1.0, 0.0),
                   [&](const Monomial& m) { sum.add_raw(m.coeff, 0, m.x, m.z); });
  auto op = sum.finish();
  std::vector<std::pair<double, PauliString>> out;
  out.reserve(op.terms.size());
  for (const auto& [c, p] : op.terms) {
    require(std::abs(c.real()) < 1e-12,
            "excitation generator is not anti-Hermitian");
    out.push_back({c.imag(), p});
  }
  return out;
}

/// Anti-Hermitian K from packed parameters: first the real antisymmetric
/// part (p<q), then the imaginary symmetric part (p<=q). n^2 slots total.
inline MatC rotation_generator(const double* kappa, int n) {
  MatC k = MatC::Zero(n, n);
  int idx = 0;
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      k(p, q) += kappa[idx];
      k(q, p) -= kappa[idx];
      ++idx;
    }
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) {
      k(p, q) += cplx(0.0, kappa[idx]);
      if (q != p) k(q, p) += cplx(0.0, kappa[idx]);
      ++idx;
    }
  return k;
}

inline int rotation_param_count(int n) { return n * n; }
inline int coulomb_param_count(int n) { return n * (n + 1); }

/// Symmetric J matrices from packed slots: same-spin triangle then
/// cross-spin triangle, each p<=q row-major.
inline void unpack_coulomb(const double* slots, int n, Mat& j_same, Mat& j_cross) {
  j_same = Mat::Zero(n, n);
  j_cross = Mat::Zero(n, n);
  int idx = 0;
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) {
      j_same(p, q) = j_same(q, p) = slots[idx++];
    }
  for (int p = 0; p < n; ++p)
    for (int q = p; q < n; ++q) {
      j_cross(p, q) = j_cross(q, p) = slots[idx++];
    }
}

/// Jastrow phase of a basis state under the masked coupling lists.
inline double coulomb_phase(const Generator& g, const Mat& j_same,
                            const Mat& j_cross, std::uint64_t m, int n) {
  double ph = 0.0;
  for (auto [p, q] : g.mask_same) {
    double na_p = (m >> p) & 1, na_q = (m >> q) & 1;
    double nb_p = (m >> (n + p)) & 1, nb_q = (m >> (n + q)) & 1;
    double w = (p == q) ? 0.5 : 1.0;
    ph += w * j_same(p, q) * (na_p * na_q + nb_p * nb_q);
  }
  for (auto [p, q] : g.mask_cross) {
    double na_p = (m >> p) & 1, nb_q = (m >> (n + q)) & 1;
    ph += j_cross(p, q) * na_p * nb_q;
    if (p != q) {
      double na_q = (m >> q) & 1, nb_p = (m >> (n + p)) & 1;
      ph += j_cross(p, q) * na_q * nb_p;
    }
  }
  return ph;
}

}  // namespace detail

/// Dense-statevector application of one generator.
inline void apply_generator(Statevector& sv, const Generator& g,
                            const double* params, bool inverse = false) {
  const int n = sv.n_qubits / 2;
  double flip = inverse ? -1.0 : 1.0;
  switch (g.kind) {
    case GenKind::kPauliSum: {
      double theta = params[g.slot] * flip;
      for (const auto& [c, p] : g.paulis) apply_pauli_rotation(sv, p, theta * c);
      break;
    }
    case GenKind::kOrbitalRotation: {
      MatC k = detail::rotation_generator(params + g.slot_begin, n);
      k *= g.rotation_sign * flip;
      apply_one_body_exponential(sv, k, k);
      break;
    }
    case GenKind::kDiagonalCoulomb: {
      Mat js, jc;
      detail::unpack_coulomb(params + g.slot_begin, n, js, jc);
      apply_diagonal_phase(sv, [&](std::size_t m) {
        return flip * detail::coulomb_phase(g, js, jc, m, n);
      });
      break;
    }
  }
}

/// Dense evaluation: reference state through the full gate sequence.
inline Statevector evaluate_dense(const AnsatzCircuit& circ, const Vec& params) {
  require(params.size() == circ.n_params, "parameter count mismatch");
  Statevector sv = prepare_reference(circ.n_orb, circ.ref_alpha, circ.ref_beta);
  for (const auto& g : circ.ops) apply_generator(sv, g, params.data());
  return sv;
}

/// Dense inverse evaluation: adjoint gate sequence applied to a state.
inline void apply_inverse_dense(Statevector& sv, const AnsatzCircuit& circ,
                                const Vec& params) {
  for (auto it = circ.ops.rbegin(); it != circ.ops.rend(); ++it)
    apply_generator(sv, *it, params.data(), /*inverse=*/true);
}

namespace detail {

inline std::uint32_t lowest_orbitals(int m) { return (std::uint32_t{1} << m) - 1; }

struct UccOp {
  FermionicExcitation ex;
  double init = 0.0;
  std::string label;
};

inline Generator make_excitation_generator(const FermionicExcitation& ex,
                                           int n_qubits, std::string label) {
  Generator g;
  g.kind = GenKind::kPauliSum;
  g.excitation = ex;
  g.paulis = excitation_paulis(ex, n_qubits);
  g.label = std::move(label);
  return g;
}

inline void sort_magnitude_then_lex(std::vector<UccOp>& ops) {
  std::stable_sort(ops.begin(), ops.end(), [](const UccOp& a, const UccOp& b) {
    double ma = std::abs(a.init), mb = std::abs(b.init);
    bool za = ma < 1e-14, zb = mb < 1e-14;
    if (za != zb) return !za;          // nonzero block first
    if (za && zb) return a.label < b.label;  // zeros: lexicographic
    if (ma != mb) return ma > mb;      // larger magnitude applied first
    return a.label < b.label;
  });
}

}  // namespace detail

struct BuiltAnsatz {
  AnsatzCircuit circuit;
  Vec init_params;
};

/// Spin-orbital UCCSD over the reference determinant: all Sz-conserving
/// occupied->virtual singles and doubles with independent parameters.
/// Operators are magnitude-ordered by |initial amplitude| (largest applied
/// first); zero-amplitude operators follow in lexicographic order.
inline BuiltAnsatz build_uccsd(int n_orb, int n_alpha, int n_beta,
                               const Amplitudes2* warm = nullptr) {
  AnsatzCircuit circ;
  circ.n_orb = n_orb;
  circ.ref_alpha = detail::lowest_orbitals(n_alpha);
  circ.ref_beta = detail::lowest_orbitals(n_beta);
  circ.family = "uccsd";
  const int nq = 2 * n_orb;

  auto site = [n_orb](int p, int spin) { return spin == 0 ? p : n_orb + p; };
  auto t2 = [&](int i, int j, int a, int b) {
    return warm ? warm->at(i, j, a, b) : 0.0;
  };
  char tag[64];
  std::vector<detail::UccOp> ops;
  // singles
  for (int spin = 0; spin < 2; ++spin) {
    int nocc = spin == 0 ? n_alpha : n_beta;
    for (int i = 0; i < nocc; ++i)
      for (int a = nocc; a < n_orb; ++a) {
        detail::UccOp op;
        op.ex = {{site(a, spin)}, {site(i, spin)}};
        std::snprintf(tag, sizeof(tag), "s%c %02d->%02d", spin ? 'b' : 'a', i, a);
        op.label = tag;
        ops.push_back(op);
      }
  }
  // same-spin doubles
  for (int spin = 0; spin < 2; ++spin) {
    int nocc = spin == 0 ? n_alpha : n_beta;
    for (int i = 0; i < nocc; ++i)
      for (int j = i + 1; j < nocc; ++j)
        for (int a = nocc; a < n_orb; ++a)
          for (int b = a + 1; b < n_orb; ++b) {
            detail::UccOp op;
            op.ex = {{site(a, spin), site(b, spin)}, {site(j, spin), site(i, spin)}};
            op.init = t2(site(i, spin), site(j, spin), site(a, spin), site(b, spin));
            std::snprintf(tag, sizeof(tag), "d%c%c %02d,%02d->%02d,%02d",
                          spin ? 'b' : 'a', spin ? 'b' : 'a', i, j, a, b);
            op.label = tag;
            ops.push_back(op);
          }
  }
  // opposite-spin doubles
  for (int i = 0; i < n_alpha; ++i)
    for (int j = 0; j < n_beta; ++j)
      for (int a = n_alpha; a < n_orb; ++a)
        for (int b = n_beta; b < n_orb; ++b) {
          detail::UccOp op;
          op.ex = {{site(a, 0), site(b, 1)}, {site(j, 1), site(i, 0)}};
          op.init = t2(site(i, 0), site(j, 1), site(a, 0), site(b, 1));
          std::snprintf(tag, sizeof(tag), "dab %02d,%02d->%02d,%02d", i, j, a, b);
          op.label = tag;
          ops.push_back(op);
        }

  detail::sort_magnitude_then_lex(ops);
  BuiltAnsatz out;
  out.init_params = Vec::Zero(static_cast<Eigen::Index>(ops.size()));
  for (std::size_t idx = 0; idx < ops.size(); ++idx) {
    Generator g = detail::make_excitation_generator(ops[idx].ex, nq, ops[idx].label);
    g.slot = static_cast<int>(idx);
    circ.ops.push_back(std::move(g));
    out.init_params(idx) = ops[idx].init;
  }
  circ.n_params = static_cast<int>(ops.size());
  out.circuit = std::move(circ);
  return out;
}

/// k layers of generalized singles plus paired doubles.
inline BuiltAnsatz build_upccgsd(int k, int n_orb, int n_alpha, int n_beta) {
  require(k >= 1, "build_upccgsd: k must be >= 1");
  AnsatzCircuit circ;
  circ.n_orb = n_orb;
  circ.ref_alpha = detail::lowest_orbitals(n_alpha);
  circ.ref_beta = detail::lowest_orbitals(n_beta);
  circ.family = "upccgsd";
  circ.k = k;
  const int nq = 2 * n_orb;
  char tag[64];
  int slot = 0;
  for (int layer = 0; layer < k; ++layer) {
    for (int spin = 0; spin < 2; ++spin)
      for (int p = 0; p < n_orb; ++p)
        for (int q = p + 1; q < n_orb; ++q) {
          int off = spin == 0 ? 0 : n_orb;
          FermionicExcitation ex{{q + off}, {p + off}};
          std::snprintf(tag, sizeof(tag), "l%d gs%c %02d->%02d", layer,
                        spin ? 'b' : 'a', p, q);
          Generator g = detail::make_excitation_generator(ex, nq, tag);
          g.slot = slot++;
          circ.ops.push_back(std::move(g));
        }
    for (int p = 0; p < n_orb; ++p)
      for (int q = p + 1; q < n_orb; ++q) {
        FermionicExcitation ex{{q, n_orb + q}, {n_orb + p, p}};
        std::snprintf(tag, sizeof(tag), "l%d pd %02d->%02d", layer, p, q);
        Generator g = detail::make_excitation_generator(ex, nq, tag);
        g.slot = slot++;
        circ.ops.push_back(std::move(g));
      }
  }
  circ.n_params = slot;
  BuiltAnsatz out;
  out.circuit = std::move(circ);
  out.init_params = Vec::Zero(slot);
  return out;
}

struct LucjTopology {
  std::vector<std::pair<int, int>> same;   // same-spin couplings (p <= q)
  std::vector<std::pair<int, int>> cross;  // opposite-spin couplings
};

/// Square-lattice topology: same-spin nearest neighbors, opposite-spin
/// on-site couplings.
inline LucjTopology square_topology(int n_orb) {
  LucjTopology t;
  for (int p = 0; p + 1 < n_orb; ++p) t.same.push_back({p, p + 1});
  for (int p = 0; p < n_orb; ++p) t.cross.push_back({p, p});
  return t;
}

/// k-layer local unitary cluster Jastrow circuit:
///   prod_l U_l exp(i J_l) U_l^+, followed by a final orbital rotation.
/// Parameters per layer: one orbital rotation (n^2) plus both full J
/// triangles (n(n+1)); couplings outside the topology are masked out of the
/// constructed gate, matching the reported parameter accounting.
inline BuiltAnsatz build_lucj(int k, int n_orb, int n_alpha, int n_beta,
                              const Amplitudes2* warm = nullptr,
                              const LucjTopology& topo_in = {}) {
  require(k >= 1, "build_lucj: k must be >= 1");
  LucjTopology topo = topo_in;
  if (topo.same.empty() && topo.cross.empty()) topo = square_topology(n_orb);
  for (auto [p, q] : topo.same)
    require(p <= q && q < n_orb, "lucj: bad same-spin coupling pair");
  for (auto [p, q] : topo.cross)
    require(p <= q && q < n_orb, "lucj: bad cross-spin coupling pair");

  AnsatzCircuit circ;
  circ.n_orb = n_orb;
  circ.ref_alpha = detail::lowest_orbitals(n_alpha);
  circ.ref_beta = detail::lowest_orbitals(n_beta);
  circ.family = "lucj";
  circ.k = k;
  const int nrot = detail::rotation_param_count(n_orb);
  const int nj = detail::coulomb_param_count(n_orb);
  char tag[32];
  int slot = 0;
  for (int layer = 0; layer < k; ++layer) {
    int rot_begin = slot;
    slot += nrot;
    int j_begin = slot;
    slot += nj;
    Generator udag;
    udag.kind = GenKind::kOrbitalRotation;
    udag.slot_begin = rot_begin;
    udag.slot_count = nrot;
    udag.rotation_sign = -1.0;
    std::snprintf(tag, sizeof(tag), "l%d U+", layer);
    udag.label = tag;
    circ.ops.push_back(udag);

    Generator jg;
    jg.kind = GenKind::kDiagonalCoulomb;
    jg.slot_begin = j_begin;
    jg.slot_count = nj;
    jg.mask_same = topo.same;
    jg.mask_cross = topo.cross;
    std::snprintf(tag, sizeof(tag), "l%d J", layer);
    jg.label = tag;
    circ.ops.push_back(jg);

    Generator u = udag;
    u.rotation_sign = 1.0;
    std::snprintf(tag, sizeof(tag), "l%d U", layer);
    u.label = tag;
    circ.ops.push_back(u);
  }
  Generator ufinal;
  ufinal.kind = GenKind::kOrbitalRotation;
  ufinal.slot_begin = slot;
  ufinal.slot_count = nrot;
  ufinal.label = "final U";
  slot += nrot;
  circ.ops.push_back(ufinal);
  circ.n_params = slot;

  BuiltAnsatz out;
  out.init_params = Vec::Zero(slot);

  if (warm) {
    // Truncated double factorization of the opposite-spin T2 block: the
    // leading eigencomponents of t2[(i,a),(j,b)] give per-layer orbital
    // rotations and rank-one Jastrow matrices; masked entries are then
    // ridge-rescaled toward the unmasked component.
    const int no = n_alpha, nv = n_orb - n_alpha;
    if (no > 0 && nv > 0) {
      Mat t2m(no * nv, no * nv);
      for (int i = 0; i < no; ++i)
        for (int a = 0; a < nv; ++a)
          for (int j = 0; j < no; ++j)
            for (int b = 0; b < nv; ++b)
              t2m(i * nv + a, j * nv + b) =
                  warm->at(i, n_orb + j, n_alpha + a, n_orb + n_alpha + b);
      Eigen::SelfAdjointEigenSolver<Mat> es(t2m);
      // order eigencomponents by |eigenvalue|
      std::vector<int> order(no * nv);
      for (int i = 0; i < no * nv; ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b));
      });
      for (int layer = 0; layer < std::min<int>(k, no * nv); ++layer) {
        double lam = es.eigenvalues()(order[layer]);
        if (std::abs(lam) < 1e-12) break;
        Vec w = es.eigenvectors().col(order[layer]);
        Mat x = Mat::Zero(n_orb, n_orb);
        for (int i = 0; i < no; ++i)
          for (int a = 0; a < nv; ++a) {
            x(i, no + a) = w(i * nv + a);
            x(no + a, i) = w(i * nv + a);
          }
        Eigen::SelfAdjointEigenSolver<Mat> ex(x);
        Mat vrot = ex.eigenvectors();
        Vec d = ex.eigenvalues();
        // kappa = log(V): V orthogonal; use the real logarithm via atan2 on
        // the orthogonal matrix's skew decomposition: project through
        // K = log of V computed by eigen on the unitary (complex log)
        Eigen::ComplexEigenSolver<MatC> eu(vrot.cast<cplx>());
        MatC logv = MatC::Zero(n_orb, n_orb);
        {
          MatC vv = eu.eigenvectors();
          VecC ev = eu.eigenvalues();
          MatC logd = MatC::Zero(n_orb, n_orb);
          for (int i = 0; i < n_orb; ++i)
            logd(i, i) = cplx(0.0, std::atan2(ev(i).imag(), ev(i).real()));
          logv = vv * logd * vv.inverse();
        }
        int rot_begin = static_cast<int>((nrot + nj)) * layer;
        int idx = rot_begin;
        for (int p = 0; p < n_orb; ++p)
          for (int q = p + 1; q < n_orb; ++q) out.init_params(idx++) = logv(p, q).real();
        for (int p = 0; p < n_orb; ++p)
          for (int q = p; q < n_orb; ++q) out.init_params(idx++) = logv(p, q).imag();
        // rank-one Jastrow: J^{ab}_pq = lam d_p d_q (cross), same-spin zero;
        // ridge rescale toward the unmasked matrix over the mask support
        Mat jfull(n_orb, n_orb);
        for (int p = 0; p < n_orb; ++p)
          for (int q = 0; q < n_orb; ++q) jfull(p, q) = lam * d(p) * d(q);
        double num = 0.0, den = 1e-6;
        for (auto [p, q] : topo.cross) {
          num += jfull(p, q) * jfull(p, q);
          den += jfull(p, q) * jfull(p, q);
        }
        double scale = num / den;
        int j_begin = rot_begin + nrot + n_orb * (n_orb + 1) / 2;
        int jdx = j_begin;
        for (int p = 0; p < n_orb; ++p)
          for (int q = p; q < n_orb; ++q) out.init_params(jdx++) = scale * jfull(p, q);
      }
    }
  }
  out.circuit = std::move(circ);
  return out;
}

/// k-layer Hamiltonian variational ansatz over commuting groups; each group
/// evolution is a product of Pauli rotations (exact, terms commute).
inline BuiltAnsatz build_hva(int k, int n_orb, int n_alpha, int n_beta,
                             const CommutingGroups& groups) {
  require(k >= 1, "build_hva: k must be >= 1");
  require(!groups.groups.empty(), "build_hva: empty group partition");
  AnsatzCircuit circ;
  circ.n_orb = n_orb;
  circ.ref_alpha = detail::lowest_orbitals(n_alpha);
  circ.ref_beta = detail::lowest_orbitals(n_beta);
  circ.family = "hva";
  circ.k = k;
  char tag[32];
  int slot = 0;
  for (int layer = 0; layer < k; ++layer)
    for (std::size_t gi = 0; gi < groups.groups.size(); ++gi) {
      Generator g;
      g.kind = GenKind::kPauliSum;
      g.slot = slot++;
      for (const auto& [c, p] : groups.groups[gi]) {
        require(std::abs(c.imag()) < 1e-12, "hva: non-Hermitian group term");
        // exp(-i theta H_p) = prod exp(i theta (-c) P)
        g.paulis.push_back({-c.real(), p});
      }
      std::snprintf(tag, sizeof(tag), "l%d g%zu", layer, gi);
      g.label = tag;
      circ.ops.push_back(std::move(g));
    }
  circ.n_params = slot;
  BuiltAnsatz out;
  out.circuit = std::move(circ);
  out.init_params = Vec::Ones(slot);  // all-ones initialization
  return out;
}

/// Two-qubit-gate estimate under a Givens/CNOT compilation, for resource
/// reporting only: weight-w Pauli rotation -> 2(w-1) CNOTs; orbital
/// rotation -> N(N-1)/2 Givens per spin, 2 CNOTs each; on-site
/// cross-spin Jastrow phase -> 1 CNOT-equivalent per coupling.
inline long two_qubit_gate_estimate(const AnsatzCircuit& circ) {
  long total = 0;
  const int n = circ.n_orb;
  for (const auto& g : circ.ops) {
    switch (g.kind) {
      case GenKind::kPauliSum:
        for (const auto& [c, p] : g.paulis) {
          int w = popcount64(p.x | p.z);
          if (w > 1) total += 2 * (w - 1);
        }
        break;
      case GenKind::kOrbitalRotation:
        total += 2 * (n * (n - 1) / 2) * 2;
        break;
      case GenKind::kDiagonalCoulomb:
        total += static_cast<long>(g.mask_same.size() * 2 + g.mask_cross.size());
        break;
    }
  }
  return total;
}

}  // namespace qcaf
