#pragma once

#include <algorithm>
#include <cmath>

#include "qcaf/sector_hamiltonian.hpp"

namespace qcaf {

struct FciResult {
  double energy = 0.0;
  VecC vector;        // phase: largest-|amplitude| entry real positive
  int iterations = 0;
  bool degenerate = false;
  double residual = 0.0;
};

struct FciOptions {
  std::size_t dense_limit = 2000;
  double residual_tol = 1e-8;
  int max_iterations = 500;
  int max_subspace = 30;
};

namespace detail {

inline void fix_phase(VecC& v) {
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double a = std::abs(v(i));
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  cplx z = v(imax);
  if (std::abs(z) > 0) v *= std::conj(z) / std::abs(z);
  v.normalize();
}

/// Davidson for the lowest eigenpair of a real symmetric operator given by
/// matvec, with diagonal preconditioning and thick restarts.
template <typename MatVec>
FciResult davidson_lowest(const MatVec& matvec, const Vec& diag,
                          const FciOptions& opt) {
  const Eigen::Index dim = diag.size();
  FciResult out;

  Eigen::Index start;
  diag.minCoeff(&start);
  std::vector<Vec> vs, ws;  // orthonormal basis and H*basis
  Vec v0 = Vec::Zero(dim);
  v0(start) = 1.0;
  vs.push_back(v0);
  ws.push_back(matvec(v0));

  Vec ritz = v0;
  double theta = 0.0, gap = 1e9;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const int m = static_cast<int>(vs.size());
    Mat hsub(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j <= i; ++j) hsub(i, j) = hsub(j, i) = vs[i].dot(ws[j]);
    Eigen::SelfAdjointEigenSolver<Mat> es(hsub);
    theta = es.eigenvalues()(0);
    if (m > 1) gap = es.eigenvalues()(1) - theta;
    Vec y = es.eigenvectors().col(0);
    ritz.setZero(dim);
    Vec hritz = Vec::Zero(dim);
    for (int i = 0; i < m; ++i) {
      ritz += y(i) * vs[i];
      hritz += y(i) * ws[i];
    }
    Vec resid = hritz - theta * ritz;
    out.residual = resid.norm();
    out.iterations = it + 1;
    if (out.residual <= opt.residual_tol) break;

    if (m >= opt.max_subspace) {
      // thick restart: keep the two lowest Ritz vectors
      Vec y2 = es.eigenvectors().col(std::min(1, m - 1));
      Vec second = Vec::Zero(dim), hsecond = Vec::Zero(dim);
      for (int i = 0; i < m; ++i) {
        second += y2(i) * vs[i];
        hsecond += y2(i) * ws[i];
      }
      vs.clear();
      ws.clear();
      vs.push_back(ritz);
      ws.push_back(hritz);
      second -= second.dot(ritz) * ritz;
      if (second.norm() > 1e-8) {
        second.normalize();
        vs.push_back(second);
        ws.push_back(matvec(second));
      }
    }

    Vec t(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      double d = diag(i) - theta;
      if (std::abs(d) < 1e-6) d = (d < 0 ? -1e-6 : 1e-6);
      t(i) = resid(i) / d;
    }
    // twice-iterated Gram-Schmidt against the current basis
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : vs) t -= t.dot(v) * v;
    double tn = t.norm();
    if (tn < 1e-12) {
      // stagnated correction; perturb with the raw residual
      t = resid;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& v : vs) t -= t.dot(v) * v;
      tn = t.norm();
      if (tn < 1e-14) break;
    }
    t /= tn;
    vs.push_back(t);
    ws.push_back(matvec(t));
  }
  if (out.residual > opt.residual_tol)
    throw Error("davidson: not converged after " +
                std::to_string(opt.max_iterations) + " iterations, residual " +
                std::to_string(out.residual));
  out.energy = theta;
  out.degenerate = gap < 1e-9;
  out.vector = ritz.cast<cplx>();
  fix_phase(out.vector);
  return out;
}

}  // namespace detail

/// Lowest eigenpair of the sector Hamiltonian: dense diagonalization for
/// small sectors, Davidson above.
inline FciResult fci_ground_state(const SectorHamiltonian& h,
                                  const FciOptions& opt = {}) {
  const std::size_t dim = h.basis().size();
  require(dim >= 1, "empty sector");
  require(dim <= 10000000, "sector dimension exceeds the supported ceiling");
  if (dim <= opt.dense_limit) {
    Mat hm = h.dense();
    Eigen::SelfAdjointEigenSolver<Mat> es(hm);
    FciResult out;
    out.energy = es.eigenvalues()(0);
    out.degenerate = dim > 1 && es.eigenvalues()(1) - out.energy < 1e-9;
    out.vector = es.eigenvectors().col(0).cast<cplx>();
    detail::fix_phase(out.vector);
    out.iterations = 1;
    Vec r = hm * es.eigenvectors().col(0) - out.energy * es.eigenvectors().col(0);
    out.residual = r.norm();
    return out;
  }
  auto matvec = [&](const Vec& x) { return h.apply_real(x); };
  return detail::davidson_lowest(matvec, h.diagonal(), opt);
}

inline FciResult fci_ground_state(const SpinBlockedIntegrals& ints, int n_alpha,
                                  int n_beta, const FciOptions& opt = {}) {
  SectorBasis basis(ints.n_orbitals, n_alpha, n_beta);
  std::size_t sparse_limit = (basis.size() <= opt.dense_limit) ? basis.size() : 20000;
  SectorHamiltonian h(ints, basis, sparse_limit);
  return fci_ground_state(h, opt);
}

inline FciResult fci_ground_state(const MolecularIntegrals& ints, int n_alpha,
                                  int n_beta, const FciOptions& opt = {}) {
  return fci_ground_state(as_spin_blocked(ints), n_alpha, n_beta, opt);
}

/// S+ applied to a sector vector; result lives in the (na+1, nb-1) sector.
inline VecC apply_s_plus(const SectorBasis& from, const SectorBasis& to,
                         const VecC& x) {
  const int n = from.n_orbitals();
  VecC y = VecC::Zero(to.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    cplx xi = x(i);
    if (xi == cplx(0.0, 0.0)) continue;
    std::uint32_t ma = from.alpha_mask(i), mb = from.beta_mask(i);
    for (int p = 0; p < n; ++p) {
      if (!((mb >> p) & 1u) || ((ma >> p) & 1u)) continue;
      std::uint32_t mb2 = mb & ~(std::uint32_t{1} << p);
      std::uint32_t ma2 = ma | (std::uint32_t{1} << p);
      int sign = ((popcount64(ma) + popcount64(mb & ((1u << p) - 1)) +
                   popcount64(ma & ((1u << p) - 1))) &
                  1)
                     ? -1
                     : 1;
      y(to.index(ma2, mb2)) += static_cast<double>(sign) * xi;
    }
  }
  return y;
}

/// S- applied to a sector vector; result lives in the (na-1, nb+1) sector.
inline VecC apply_s_minus(const SectorBasis& from, const SectorBasis& to,
                          const VecC& x) {
  const int n = from.n_orbitals();
  VecC y = VecC::Zero(to.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    cplx xi = x(i);
    if (xi == cplx(0.0, 0.0)) continue;
    std::uint32_t ma = from.alpha_mask(i), mb = from.beta_mask(i);
    for (int p = 0; p < n; ++p) {
      if (!((ma >> p) & 1u) || ((mb >> p) & 1u)) continue;
      std::uint32_t ma2 = ma & ~(std::uint32_t{1} << p);
      std::uint32_t mb2 = mb | (std::uint32_t{1} << p);
      int sign = ((popcount64(ma & ((1u << p) - 1)) + popcount64(ma2) +
                   popcount64(mb & ((1u << p) - 1))) &
                  1)
                     ? -1
                     : 1;
      y(to.index(ma2, mb2)) += static_cast<double>(sign) * xi;
    }
  }
  return y;
}

/// <S^2> = |S+ psi|^2 + Sz(Sz+1) for a normalized sector state.
inline double s_squared(const SectorBasis& basis, const VecC& state) {
  double sz = 0.5 * (basis.n_alpha() - basis.n_beta());
  double val = sz * (sz + 1.0);
  if (basis.n_beta() >= 1 && basis.n_alpha() < basis.n_orbitals()) {
    SectorBasis up(basis.n_orbitals(), basis.n_alpha() + 1, basis.n_beta() - 1);
    val += apply_s_plus(basis, up, state).squaredNorm() / state.squaredNorm();
  }
  return val;
}

struct SpinProjection {
  VecC state;     // normalized singlet component
  double weight;  // <psi|P|psi> for normalized input
};

/// Exact polynomial singlet projector P = prod_s (1 - S^2 / (s(s+1))),
/// applied in the Sz=0 sector where S^2 = S-S+.
inline SpinProjection spin_project(const SectorBasis& basis, const VecC& state) {
  require(basis.n_alpha() == basis.n_beta(),
          "spin_project: requires n_alpha == n_beta (Sz = 0)");
  const int smax = basis.n_alpha();
  VecC v = state.normalized();
  if (smax >= 1 && basis.n_alpha() < basis.n_orbitals()) {
    SectorBasis up(basis.n_orbitals(), basis.n_alpha() + 1, basis.n_beta() - 1);
    for (int s = 1; s <= smax; ++s) {
      VecC s2v = apply_s_minus(up, basis, apply_s_plus(basis, up, v));
      v -= s2v / (s * (s + 1.0));
    }
  }
  double w = v.squaredNorm();
  require(w >= 1e-14, "spin_project: state has no singlet component");
  SpinProjection out;
  out.weight = w;
  out.state = v / std::sqrt(w);
  return out;
}

inline double fidelity(const VecC& a, const VecC& b) {
  require(a.size() == b.size(), "fidelity: dimension mismatch");
  double na = a.squaredNorm(), nb = b.squaredNorm();
  require(na > 0 && nb > 0, "fidelity: zero vector");
  return std::norm(a.dot(b)) / (na * nb);
}

}  // namespace qcaf
