#pragma once

#include <unordered_map>

#include "qcaf/determinants.hpp"
#include "qcaf/scf.hpp"

namespace qcaf {

/// Hamiltonian restricted to a fixed (n_alpha, n_beta) determinant sector.
/// Matrix-vector products are evaluated directly from the integrals via the
/// double single-excitation expansion
///   H = E_nuc + sum k^s_pq E^s_pq + 1/2 sum (pq|rs)^{st} E^s_pq E^t_rs,
/// with k^s_pq = h^s_pq - 1/2 sum_r (pr|rq)^{ss}. A compressed sparse matrix
/// is cached for small sectors.
class SectorHamiltonian {
 public:
  SectorHamiltonian(SpinBlockedIntegrals ints, SectorBasis basis,
                    std::size_t sparse_limit = 20000)
      : ints_(std::move(ints)), basis_(std::move(basis)) {
    const int n = ints_.n_orbitals;
    ka_ = ints_.h_a;
    kb_ = ints_.h_b;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        double ca = 0.0, cb = 0.0;
        for (int r = 0; r < n; ++r) {
          ca += ints_.v_aa(p, r, r, q);
          cb += ints_.v_bb(p, r, r, q);
        }
        ka_(p, q) -= 0.5 * ca;
        kb_(p, q) -= 0.5 * cb;
      }
    if (basis_.size() <= sparse_limit) build_sparse();
  }

  const SectorBasis& basis() const { return basis_; }
  const SpinBlockedIntegrals& integrals() const { return ints_; }
  double e_nuclear() const { return ints_.e_nuclear; }

  /// y = H x (including the nuclear-repulsion constant).
  /// H is symmetric, so row j is read off as column j; each output element
  /// is accumulated in a fixed order, making the product bit-reproducible
  /// for any thread count.
  void apply(const VecC& x, VecC& y) const {
    const std::int64_t dim = static_cast<std::int64_t>(basis_.size());
    y.resize(dim);
    if (!cols_.empty()) {
#pragma omp parallel for schedule(static)
      for (std::int64_t j = 0; j < dim; ++j) {
        cplx acc(0.0, 0.0);
        for (const auto& [i, v] : cols_[j]) acc += v * x(i);
        y(j) = acc + ints_.e_nuclear * x(j);
      }
    } else {
#pragma omp parallel for schedule(static)
      for (std::int64_t j = 0; j < dim; ++j) {
        cplx acc(0.0, 0.0);
        column_terms(static_cast<std::size_t>(j),
                     [&](std::size_t i, double v) { acc += v * x(i); });
        y(j) = acc + ints_.e_nuclear * x(j);
      }
    }
  }

  VecC apply(const VecC& x) const {
    VecC y;
    apply(x, y);
    return y;
  }

  Vec apply_real(const Vec& x) const {
    VecC xc = x.cast<cplx>(), yc;
    apply(xc, yc);
    return yc.real();
  }

  double expectation(const VecC& x) const {
    VecC y;
    apply(x, y);
    return (x.dot(y)).real() / x.squaredNorm();
  }

  /// Diagonal elements (Slater-Condon), including e_nuclear.
  Vec diagonal() const {
    const std::size_t dim = basis_.size();
    Vec d(dim);
    for (std::size_t i = 0; i < dim; ++i)
      d(i) = determinant_energy(basis_.alpha_mask(i), basis_.beta_mask(i));
    return d;
  }

  /// Energy of one determinant, including e_nuclear.
  double determinant_energy(std::uint32_t ma, std::uint32_t mb) const {
    auto oa = occupied_list(ma), ob = occupied_list(mb);
    double e = ints_.e_nuclear;
    for (int p : oa) e += ints_.h_a(p, p);
    for (int p : ob) e += ints_.h_b(p, p);
    for (int p : oa)
      for (int q : oa) e += 0.5 * (ints_.v_aa(p, p, q, q) - ints_.v_aa(p, q, q, p));
    for (int p : ob)
      for (int q : ob) e += 0.5 * (ints_.v_bb(p, p, q, q) - ints_.v_bb(p, q, q, p));
    for (int p : oa)
      for (int q : ob) e += ints_.v_ab(p, p, q, q);
    return e;
  }

  Mat dense() const {
    const std::size_t dim = basis_.size();
    require(dim <= 20000, "sector too large for a dense Hamiltonian");
    Mat h = Mat::Zero(dim, dim);
    VecC x = VecC::Zero(dim), y;
    for (std::size_t i = 0; i < dim; ++i) {
      x(i) = 1.0;
      apply(x, y);
      h.col(i) = y.real();
      x(i) = 0.0;
    }
    return 0.5 * (h + h.transpose());
  }

 private:
  template <typename Sink>
  void column_terms(std::size_t i, Sink&& sink) const {
    // Emits (row j, value) contributions of the electronic part for column i.
    const auto& exc_a = basis_.alpha_excitations();
    const auto& exc_b = basis_.beta_excitations();
    const std::size_t nb = basis_.n_beta_strings();
    const std::size_t ia = i / nb, ib = i % nb;

    // alpha one-body and alpha-alpha two-body
    for (const auto& e1 : exc_a[ia]) {
      std::size_t j1 = e1.target * nb + ib;
      sink(j1, ka_(e1.p, e1.q) * e1.sign);
      for (const auto& e2 : exc_a[e1.target]) {
        std::size_t j2 = e2.target * nb + ib;
        sink(j2, 0.5 * ints_.v_aa(e2.p, e2.q, e1.p, e1.q) * e1.sign * e2.sign);
      }
      // alpha-beta (counted once with full weight: the st sum has two equal halves)
      for (const auto& e2 : exc_b[ib]) {
        std::size_t j2 = e1.target * nb + e2.target;
        sink(j2, ints_.v_ab(e1.p, e1.q, e2.p, e2.q) * e1.sign * e2.sign);
      }
    }
    // beta one-body and beta-beta
    for (const auto& e1 : exc_b[ib]) {
      std::size_t j1 = ia * nb + e1.target;
      sink(j1, kb_(e1.p, e1.q) * e1.sign);
      for (const auto& e2 : exc_b[e1.target]) {
        std::size_t j2 = ia * nb + e2.target;
        sink(j2, 0.5 * ints_.v_bb(e2.p, e2.q, e1.p, e1.q) * e1.sign * e2.sign);
      }
    }
  }

  void build_sparse() {
    const std::size_t dim = basis_.size();
    cols_.resize(dim);
    std::unordered_map<std::size_t, double> acc;
    for (std::size_t i = 0; i < dim; ++i) {
      acc.clear();
      column_terms(i, [&](std::size_t j, double v) { acc[j] += v; });
      auto& col = cols_[i];
      col.reserve(acc.size());
      for (const auto& kv : acc)
        if (kv.second != 0.0) col.push_back(kv);
      std::sort(col.begin(), col.end());
    }
  }

  SpinBlockedIntegrals ints_;
  SectorBasis basis_;
  Mat ka_, kb_;
  std::vector<std::vector<std::pair<std::size_t, double>>> cols_;
};

}  // namespace qcaf
