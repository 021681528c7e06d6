#pragma once

#include <cmath>
#include <fstream>

#include "qcaf/common.hpp"

namespace qcaf {

/// Cholesky vectors of the two-electron tensor in the convention
///   (pq|rs) = 1/2 sum_g L^g_pq L^g_rs,
/// i.e. L^g = sqrt(2) times the plain Cholesky vectors of the ERI
/// supermatrix M[(pq),(rs)]. Each L^g is a real symmetric N x N matrix.
struct CholeskyFactors {
  int n = 0;
  double tol = 1e-8;
  std::vector<Mat> l;
  double max_diag_residual = 0.0;   // remaining pivot after truncation
  std::vector<double> pivot_trace;  // max diagonal before each vector

  int n_aux() const { return static_cast<int>(l.size()); }

  /// Reconstructed (pq|rs).
  double reconstruct(int p, int q, int r, int s) const {
    double acc = 0.0;
    for (const auto& m : l) acc += m(p, q) * m(r, s);
    return 0.5 * acc;
  }
};

/// Greedy diagonally pivoted incomplete Cholesky of the ERI supermatrix.
/// Stops when the largest remaining diagonal is below tol; a pivot below
/// -tol reports indefiniteness.
inline CholeskyFactors cholesky_factorize(const Tensor4& v, double tol = 1e-8) {
  const int n = v.n();
  require(n >= 1 && n <= 16, "cholesky_factorize: orbital count out of range");
  const int dim = n * n;
  CholeskyFactors out;
  out.n = n;
  out.tol = tol;

  // supermatrix M[(pq),(rs)] in pair-major layout
  Mat m(dim, dim);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) m(p * n + q, r * n + s) = v(p, q, r, s);

  Vec diag = m.diagonal();
  std::vector<Vec> vecs;
  for (int iter = 0; iter < dim; ++iter) {
    int pivot = 0;
    double dmax = diag.maxCoeff(&pivot);
    double dmin = diag.minCoeff();
    if (dmin < -tol)
      throw Error("cholesky_factorize: indefinite supermatrix, pivot (" +
                  std::to_string(dmin) + ") at composite index " +
                  std::to_string(static_cast<int>(
                      std::distance(diag.data(),
                                    std::min_element(diag.data(), diag.data() + dim)))));
    if (dmax <= tol) {
      out.max_diag_residual = std::max(dmax, 0.0);
      break;
    }
    out.pivot_trace.push_back(dmax);
    Vec col = m.col(pivot);
    for (const auto& w : vecs) col -= w(pivot) * w;
    col /= std::sqrt(dmax);
    for (int t = 0; t < dim; ++t) diag(t) -= col(t) * col(t);
    vecs.push_back(col);
    out.max_diag_residual = std::max(diag.maxCoeff(), 0.0);
  }

  const double sqrt2 = std::sqrt(2.0);
  for (const auto& w : vecs) {
    Mat lm(n, n);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) lm(p, q) = sqrt2 * w(p * n + q);
    lm = 0.5 * (lm + lm.transpose()).eval();  // symmetrize pair degeneracy
    out.l.push_back(lm);
  }
  return out;
}

/// Max reconstruction error over all elements.
inline double cholesky_max_error(const CholeskyFactors& f, const Tensor4& v) {
  const int n = v.n();
  double err = 0.0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
          err = std::max(err, std::abs(f.reconstruct(p, q, r, s) - v(p, q, r, s)));
  return err;
}

inline void save_cholesky(const std::string& path, const CholeskyFactors& f) {
  std::ofstream os(path, std::ios::binary);
  require(os.good(), "cannot write cholesky cache: " + path);
  const char magic[8] = {'Q', 'C', 'A', 'F', 'C', 'H', 'L', '1'};
  os.write(magic, 8);
  std::int32_t n = f.n, naux = f.n_aux();
  os.write(reinterpret_cast<const char*>(&n), 4);
  os.write(reinterpret_cast<const char*>(&naux), 4);
  os.write(reinterpret_cast<const char*>(&f.tol), 8);
  for (const auto& m : f.l)
    os.write(reinterpret_cast<const char*>(m.data()), sizeof(double) * n * n);
}

inline CholeskyFactors load_cholesky(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), "cannot read cholesky cache: " + path);
  char magic[8];
  is.read(magic, 8);
  require(std::string(magic, 8) == "QCAFCHL1", "bad cholesky cache header");
  std::int32_t n = 0, naux = 0;
  is.read(reinterpret_cast<char*>(&n), 4);
  is.read(reinterpret_cast<char*>(&naux), 4);
  CholeskyFactors f;
  f.n = n;
  is.read(reinterpret_cast<char*>(&f.tol), 8);
  for (int g = 0; g < naux; ++g) {
    Mat m(n, n);
    is.read(reinterpret_cast<char*>(m.data()), sizeof(double) * n * n);
    f.l.push_back(m);
  }
  require(is.good(), "truncated cholesky cache");
  return f;
}

}  // namespace qcaf
