#pragma once

#include <cstdint>

#include "qcaf/common.hpp"

namespace qcaf {

/// All N-orbital bitmasks with fixed popcount, ascending numeric order.
inline std::vector<std::uint32_t> strings_with_popcount(int n_orb, int n_elec) {
  require(n_elec >= 0 && n_elec <= n_orb, "bad electron count");
  std::vector<std::uint32_t> out;
  out.reserve(binomial(n_orb, n_elec));
  std::uint32_t limit = std::uint32_t{1} << n_orb;
  if (n_elec == 0) {
    out.push_back(0);
    return out;
  }
  std::uint32_t v = (std::uint32_t{1} << n_elec) - 1;
  while (v < limit) {
    out.push_back(v);
    // next bit permutation with same popcount
    std::uint32_t t = v | (v - 1);
    v = (t + 1) | (((~t & -~t) - 1) >> (__builtin_ctz(v) + 1));
    if (v == 0) break;
  }
  return out;
}

struct Excitation {
  std::uint32_t target;
  int p, q;   // a+_p a_q
  int sign;
};

/// Apply a+_p a_q to a same-spin occupation mask.
/// Returns false if annihilation/creation is blocked.
inline bool excite(std::uint32_t mask, int p, int q, std::uint32_t* out, int* sign) {
  if (!((mask >> q) & 1u)) return false;
  std::uint32_t m1 = mask & ~(std::uint32_t{1} << q);
  int s = parity_below(m1, q);
  if ((m1 >> p) & 1u) return false;
  s *= parity_below(m1, p);
  *out = m1 | (std::uint32_t{1} << p);
  *sign = s;
  return true;
}

/// Fixed (n_alpha, n_beta) determinant sector over N orbitals.
/// Pairs ordered lexicographically: alpha string major, beta string minor.
/// The basis state of pair (a, b) is the Jordan-Wigner computational basis
/// state with amplitude index a | (b << N).
class SectorBasis {
 public:
  SectorBasis() = default;
  SectorBasis(int n_orb, int n_alpha, int n_beta)
      : n_orb_(n_orb),
        n_alpha_(n_alpha),
        n_beta_(n_beta),
        alpha_(strings_with_popcount(n_orb, n_alpha)),
        beta_(strings_with_popcount(n_orb, n_beta)),
        rank_a_(std::size_t{1} << n_orb, -1),
        rank_b_(std::size_t{1} << n_orb, -1) {
    require(n_orb <= 20, "sector basis limited to 20 orbitals");
    for (std::size_t i = 0; i < alpha_.size(); ++i) rank_a_[alpha_[i]] = static_cast<int>(i);
    for (std::size_t i = 0; i < beta_.size(); ++i) rank_b_[beta_[i]] = static_cast<int>(i);
  }

  int n_orbitals() const { return n_orb_; }
  int n_alpha() const { return n_alpha_; }
  int n_beta() const { return n_beta_; }
  std::size_t n_alpha_strings() const { return alpha_.size(); }
  std::size_t n_beta_strings() const { return beta_.size(); }
  std::size_t size() const { return alpha_.size() * beta_.size(); }
  const std::vector<std::uint32_t>& alpha_strings() const { return alpha_; }
  const std::vector<std::uint32_t>& beta_strings() const { return beta_; }

  std::uint32_t alpha_mask(std::size_t idx) const { return alpha_[idx / beta_.size()]; }
  std::uint32_t beta_mask(std::size_t idx) const { return beta_[idx % beta_.size()]; }
  int rank_alpha(std::uint32_t m) const { return rank_a_[m]; }
  int rank_beta(std::uint32_t m) const { return rank_b_[m]; }

  std::size_t index(std::uint32_t amask, std::uint32_t bmask) const {
    int ia = rank_a_[amask], ib = rank_b_[bmask];
    require(ia >= 0 && ib >= 0, "determinant not in sector");
    return static_cast<std::size_t>(ia) * beta_.size() + ib;
  }

  /// Amplitude index of pair within a dense 2^(2N) statevector.
  std::size_t statevector_index(std::size_t idx) const {
    return static_cast<std::size_t>(alpha_mask(idx)) |
           (static_cast<std::size_t>(beta_mask(idx)) << n_orb_);
  }

  /// Single-excitation table for one string set (includes diagonal p=q).
  static std::vector<std::vector<Excitation>> excitation_table(
      const std::vector<std::uint32_t>& strings, const std::vector<int>& rank,
      int n_orb) {
    std::vector<std::vector<Excitation>> table(strings.size());
    for (std::size_t i = 0; i < strings.size(); ++i) {
      for (int q = 0; q < n_orb; ++q) {
        if (!((strings[i] >> q) & 1u)) continue;
        for (int p = 0; p < n_orb; ++p) {
          std::uint32_t m;
          int s;
          if (excite(strings[i], p, q, &m, &s))
            table[i].push_back({static_cast<std::uint32_t>(rank[m]), p, q, s});
        }
      }
    }
    return table;
  }

  const std::vector<std::vector<Excitation>>& alpha_excitations() const {
    if (exc_a_.empty()) {
      std::vector<int> r(rank_a_.begin(), rank_a_.end());
      exc_a_ = excitation_table(alpha_, r, n_orb_);
    }
    return exc_a_;
  }
  const std::vector<std::vector<Excitation>>& beta_excitations() const {
    if (exc_b_.empty()) {
      std::vector<int> r(rank_b_.begin(), rank_b_.end());
      exc_b_ = excitation_table(beta_, r, n_orb_);
    }
    return exc_b_;
  }

 private:
  int n_orb_ = 0, n_alpha_ = 0, n_beta_ = 0;
  std::vector<std::uint32_t> alpha_, beta_;
  std::vector<int> rank_a_, rank_b_;
  mutable std::vector<std::vector<Excitation>> exc_a_, exc_b_;
};

}  // namespace qcaf
