#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qcaf {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

inline constexpr double kAngstromToBohr = 1.8897259886;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr const char* kToolVersion = "qcafqmc 0.1.0";

/// Domain-level failure (bad input, non-convergence, capacity).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

inline int popcount64(std::uint64_t x) { return __builtin_popcountll(x); }

/// Parity (-1)^k of the number of set bits strictly below position `pos`.
inline int parity_below(std::uint64_t mask, int pos) {
  std::uint64_t below = mask & ((std::uint64_t{1} << pos) - 1);
  return (popcount64(below) & 1) ? -1 : 1;
}

inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 0; i < k; ++i) r = r * static_cast<std::uint64_t>(n - i) / (i + 1);
  return r;
}

/// Occupied orbital indices of a bitmask, ascending.
inline std::vector<int> occupied_list(std::uint64_t mask) {
  std::vector<int> occ;
  while (mask) {
    int p = __builtin_ctzll(mask);
    occ.push_back(p);
    mask &= mask - 1;
  }
  return occ;
}

/// Flat 4-index tensor over orbital indices, chemists' (pq|rs) layout.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}

  int n() const { return n_; }
  double& operator()(int p, int q, int r, int s) {
    return data_[idx(p, q, r, s)];
  }
  double operator()(int p, int q, int r, int s) const {
    return data_[idx(p, q, r, s)];
  }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  /// Set value at (p,q,r,s) and the other 7 index permutations of a real ERI.
  void set_symmetric(int p, int q, int r, int s, double v) {
    (*this)(p, q, r, s) = v;
    (*this)(q, p, r, s) = v;
    (*this)(p, q, s, r) = v;
    (*this)(q, p, s, r) = v;
    (*this)(r, s, p, q) = v;
    (*this)(s, r, p, q) = v;
    (*this)(r, s, q, p) = v;
    (*this)(s, r, q, p) = v;
  }

 private:
  std::size_t idx(int p, int q, int r, int s) const {
    return ((static_cast<std::size_t>(p) * n_ + q) * n_ + r) * n_ + s;
  }
  int n_ = 0;
  std::vector<double> data_;
};

}  // namespace qcaf
