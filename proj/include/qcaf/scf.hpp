#pragma once

#include <cmath>
#include <deque>

#include "qcaf/common.hpp"
#include "qcaf/integrals.hpp"

namespace qcaf {

enum class ScfKind { kRestricted, kUnrestricted };

struct ScfSolution {
  ScfKind kind = ScfKind::kRestricted;
  Mat c_alpha;  // orbital coefficients in the orthonormal input basis
  Mat c_beta;
  Vec eps_alpha;  // orbital energies
  Vec eps_beta;
  double energy = 0.0;
  int n_alpha = 0;
  int n_beta = 0;
  int cycles = 0;
  bool converged = false;
  double final_residual = 0.0;
};

struct ScfOptions {
  int max_cycles = 200;
  double e_tol = 1e-10;
  double d_tol = 1e-10;
  int diis_size = 8;
  double mix_angle = kPi / 4;  // HOMO/LUMO mixing for broken-symmetry guesses
  bool stability_retry = true;
  // Virtual-orbital level shift, applied while the commutator residual is
  // above the threshold (-1: always). It changes the iteration path, not
  // the stationary point.
  double level_shift = 0.3;
  double level_shift_threshold = -1.0;
};

/// Integrals rotated to a spin-dependent orbital basis.
/// For restricted solutions all alpha/beta blocks coincide.
struct SpinBlockedIntegrals {
  int n_orbitals = 0;
  double e_nuclear = 0.0;
  Mat h_a, h_b;
  Tensor4 v_aa, v_ab, v_bb;  // (pq|rs) with bra pair of first spin
};

namespace detail {

class Diis {
 public:
  explicit Diis(int max_size) : max_size_(max_size) {}

  Mat extrapolate(const Mat& fock, const Mat& error) {
    focks_.push_back(fock);
    errors_.push_back(error);
    if (static_cast<int>(focks_.size()) > max_size_) {
      focks_.pop_front();
      errors_.pop_front();
    }
    const int m = static_cast<int>(focks_.size());
    if (m < 2) return fock;
    Mat b = Mat::Zero(m + 1, m + 1);
    Vec rhs = Vec::Zero(m + 1);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        b(i, j) = (errors_[i].array() * errors_[j].array()).sum();
    for (int i = 0; i < m; ++i) b(i, m) = b(m, i) = -1.0;
    rhs(m) = -1.0;
    Eigen::FullPivLU<Mat> lu(b);
    if (!lu.isInvertible()) return fock;
    Vec c = lu.solve(rhs);
    Mat out = Mat::Zero(fock.rows(), fock.cols());
    for (int i = 0; i < m; ++i) out += c(i) * focks_[i];
    return out;
  }

 private:
  int max_size_;
  std::deque<Mat> focks_;
  std::deque<Mat> errors_;
};

inline Mat coulomb(const Tensor4& v, const Mat& d) {
  const int n = v.n();
  Mat j = Mat::Zero(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      double acc = 0.0;
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) acc += v(p, q, r, s) * d(r, s);
      j(p, q) = acc;
    }
  return j;
}

inline Mat exchange(const Tensor4& v, const Mat& d) {
  const int n = v.n();
  Mat k = Mat::Zero(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      double acc = 0.0;
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) acc += v(p, r, s, q) * d(r, s);
      k(p, q) = acc;
    }
  return k;
}

}  // namespace detail

struct RhfResult {
  ScfSolution scf;
  MolecularIntegrals mo_ints;  // canonical MO basis
};

/// Restricted Hartree-Fock in the orthonormal input basis, with Pulay DIIS.
/// Returns the solution and the integrals transformed to canonical MOs.
inline RhfResult rhf(const MolecularIntegrals& ints, int n_electrons,
                     const ScfOptions& opt = {}) {
  require(n_electrons % 2 == 0, "rhf: odd electron count");
  const int n = ints.n_orbitals;
  const int nocc = n_electrons / 2;
  require(nocc <= n, "rhf: more electron pairs than orbitals");

  Mat f = ints.h;
  Mat d = Mat::Zero(n, n);
  detail::Diis diis(opt.diis_size);
  ScfSolution sol;
  sol.kind = ScfKind::kRestricted;
  sol.n_alpha = sol.n_beta = nocc;
  double e_old = 0.0;
  Mat c;
  Vec eps;
  for (int it = 0; it < opt.max_cycles; ++it) {
    Eigen::SelfAdjointEigenSolver<Mat> es(f);
    c = es.eigenvectors();
    eps = es.eigenvalues();
    Mat cocc = c.leftCols(nocc);
    Mat d_new = 2.0 * cocc * cocc.transpose();
    double d_change = (d_new - d).cwiseAbs().maxCoeff();
    d = d_new;
    f = ints.h + detail::coulomb(ints.v, d) - 0.5 * detail::exchange(ints.v, d);
    double e = 0.5 * (d.array() * (ints.h + f).array()).sum() + ints.e_nuclear;
    Mat err = f * d - d * f;  // orthonormal basis: S = 1
    sol.cycles = it + 1;
    sol.final_residual = err.cwiseAbs().maxCoeff();
    if (it > 0 && std::abs(e - e_old) < opt.e_tol && d_change < opt.d_tol) {
      sol.converged = true;
      sol.energy = e;
      break;
    }
    e_old = e;
    sol.energy = e;
    f = diis.extrapolate(f, err);
    if (sol.final_residual > opt.level_shift_threshold)
      f += opt.level_shift * (Mat::Identity(n, n) - 0.5 * d);
  }
  if (!sol.converged)
    throw Error("rhf: SCF not converged after " + std::to_string(opt.max_cycles) +
                " cycles, residual " + std::to_string(sol.final_residual));
  // canonical orbitals from the final physical Fock (undoes DIIS/level-shift
  // mixing in the last iterate)
  {
    Eigen::SelfAdjointEigenSolver<Mat> es(ints.h + detail::coulomb(ints.v, d) -
                                          0.5 * detail::exchange(ints.v, d));
    c = es.eigenvectors();
    eps = es.eigenvalues();
  }
  sol.c_alpha = c;
  sol.c_beta = c;
  sol.eps_alpha = eps;
  sol.eps_beta = eps;

  RhfResult out;
  out.scf = sol;
  out.mo_ints.n_orbitals = n;
  out.mo_ints.e_nuclear = ints.e_nuclear;
  out.mo_ints.h = c.transpose() * ints.h * c;
  out.mo_ints.v = transform_eri(ints.v, c);
  return out;
}

/// Unrestricted Hartree-Fock. With break_symmetry the alpha/beta guesses mix
/// HOMO and LUMO by +/- mix_angle; a stability retry re-perturbs the
/// converged solution and keeps the lower minimum.
inline ScfSolution uhf(const MolecularIntegrals& ints, int n_alpha, int n_beta,
                       bool break_symmetry, const ScfOptions& opt = {}) {
  const int n = ints.n_orbitals;
  require(n_alpha <= n && n_beta <= n, "uhf: electron count exceeds orbitals");

  auto run = [&](Mat ca0, Mat cb0) {
    Mat da = ca0.leftCols(n_alpha) * ca0.leftCols(n_alpha).transpose();
    Mat db = cb0.leftCols(n_beta) * cb0.leftCols(n_beta).transpose();
    detail::Diis diis(opt.diis_size);
    ScfSolution sol;
    sol.kind = ScfKind::kUnrestricted;
    sol.n_alpha = n_alpha;
    sol.n_beta = n_beta;
    double e_old = 0.0;
    for (int it = 0; it < opt.max_cycles; ++it) {
      Mat j = detail::coulomb(ints.v, da + db);
      Mat fa = ints.h + j - detail::exchange(ints.v, da);
      Mat fb = ints.h + j - detail::exchange(ints.v, db);
      double e = 0.5 * ((da + db).array() * ints.h.array()).sum() +
                 0.5 * (da.array() * fa.array()).sum() +
                 0.5 * (db.array() * fb.array()).sum() + ints.e_nuclear;
      Mat erra = fa * da - da * fa;
      Mat errb = fb * db - db * fb;
      sol.final_residual =
          std::max(erra.cwiseAbs().maxCoeff(), errb.cwiseAbs().maxCoeff());
      // stack both spins into one DIIS space
      Mat fstack(2 * n, n), estack(2 * n, n);
      fstack << fa, fb;
      estack << erra, errb;
      Mat fx = diis.extrapolate(fstack, estack);
      fa = fx.topRows(n);
      fb = fx.bottomRows(n);
      if (sol.final_residual > opt.level_shift_threshold) {
        fa += opt.level_shift * (Mat::Identity(n, n) - da);
        fb += opt.level_shift * (Mat::Identity(n, n) - db);
      }
      Eigen::SelfAdjointEigenSolver<Mat> esa(fa), esb(fb);
      sol.c_alpha = esa.eigenvectors();
      sol.c_beta = esb.eigenvectors();
      sol.eps_alpha = esa.eigenvalues();
      sol.eps_beta = esb.eigenvalues();
      Mat da_new = sol.c_alpha.leftCols(n_alpha) * sol.c_alpha.leftCols(n_alpha).transpose();
      Mat db_new = sol.c_beta.leftCols(n_beta) * sol.c_beta.leftCols(n_beta).transpose();
      double d_change = std::max((da_new - da).cwiseAbs().maxCoeff(),
                                 (db_new - db).cwiseAbs().maxCoeff());
      da = da_new;
      db = db_new;
      sol.cycles = it + 1;
      sol.energy = e;
      if (it > 0 && std::abs(e - e_old) < opt.e_tol && d_change < opt.d_tol) {
        sol.converged = true;
        break;
      }
      e_old = e;
    }
    if (sol.converged) {
      // canonical orbitals/energies from the final physical Fock matrices
      Mat j = detail::coulomb(ints.v, da + db);
      Eigen::SelfAdjointEigenSolver<Mat> esa(ints.h + j - detail::exchange(ints.v, da));
      Eigen::SelfAdjointEigenSolver<Mat> esb(ints.h + j - detail::exchange(ints.v, db));
      sol.c_alpha = esa.eigenvectors();
      sol.c_beta = esb.eigenvectors();
      sol.eps_alpha = esa.eigenvalues();
      sol.eps_beta = esb.eigenvalues();
    }
    return sol;
  };

  // core guess from h
  Eigen::SelfAdjointEigenSolver<Mat> es0(ints.h);
  Mat c0 = es0.eigenvectors();
  // better start: restricted Fock from the core density
  {
    Mat d0 = 2.0 * c0.leftCols(std::min(n_alpha, n)) *
             c0.leftCols(std::min(n_alpha, n)).transpose();
    Mat f0 = ints.h + detail::coulomb(ints.v, d0) - 0.5 * detail::exchange(ints.v, d0);
    Eigen::SelfAdjointEigenSolver<Mat> es1(f0);
    c0 = es1.eigenvectors();
  }

  auto mix = [&](const Mat& c, double angle, bool plus) {
    Mat out = c;
    int h = n_alpha - 1, l = n_alpha;
    if (h < 0 || l >= n) return out;
    double sgn = plus ? 1.0 : -1.0;
    Vec ho = c.col(h), lu = c.col(l);
    out.col(h) = std::cos(angle) * ho + sgn * std::sin(angle) * lu;
    out.col(l) = -sgn * std::sin(angle) * ho + std::cos(angle) * lu;
    return out;
  };

  ScfSolution best;
  if (break_symmetry) {
    best = run(mix(c0, opt.mix_angle, true), mix(c0, opt.mix_angle, false));
    if (opt.stability_retry && best.converged) {
      ScfSolution retry = run(mix(best.c_alpha, kPi / 16, true),
                              mix(best.c_beta, kPi / 16, false));
      if (retry.converged && retry.energy < best.energy - 1e-10) best = retry;
    }
  } else {
    best = run(c0, c0);
  }
  if (!best.converged)
    throw Error("uhf: SCF not converged, final residual " +
                std::to_string(best.final_residual));
  return best;
}

/// <S^2> of a single-determinant UHF solution:
/// Sz(Sz+1) + N_beta - sum_ij |<phi_i^a|phi_j^b>|^2.
inline double uhf_s_squared(const ScfSolution& s) {
  double sz = 0.5 * (s.n_alpha - s.n_beta);
  Mat ov = s.c_alpha.leftCols(s.n_alpha).transpose() * s.c_beta.leftCols(s.n_beta);
  return sz * (sz + 1.0) + s.n_beta - ov.array().square().sum();
}

/// Rotate integrals into the (possibly spin-dependent) molecular-orbital
/// basis of an SCF solution.
inline SpinBlockedIntegrals rotate_to_basis(const MolecularIntegrals& ints,
                                            const ScfSolution& scf) {
  const int n = ints.n_orbitals;
  Mat ia = scf.c_alpha.transpose() * scf.c_alpha - Mat::Identity(n, n);
  Mat ib = scf.c_beta.transpose() * scf.c_beta - Mat::Identity(n, n);
  require(ia.cwiseAbs().maxCoeff() < 1e-8 && ib.cwiseAbs().maxCoeff() < 1e-8,
          "rotate_to_basis: orbital coefficient matrices are not orthogonal");
  SpinBlockedIntegrals out;
  out.n_orbitals = n;
  out.e_nuclear = ints.e_nuclear;
  out.h_a = scf.c_alpha.transpose() * ints.h * scf.c_alpha;
  out.h_b = scf.c_beta.transpose() * ints.h * scf.c_beta;
  out.v_aa = transform_eri(ints.v, scf.c_alpha);
  out.v_bb = transform_eri(ints.v, scf.c_beta);
  out.v_ab = transform_eri(ints.v, scf.c_alpha, scf.c_alpha, scf.c_beta, scf.c_beta);
  return out;
}

inline SpinBlockedIntegrals rotate_to_uhf_basis(const MolecularIntegrals& ints,
                                                const ScfSolution& scf_uhf) {
  return rotate_to_basis(ints, scf_uhf);
}

/// View restricted integrals as spin-blocked (all blocks shared).
inline SpinBlockedIntegrals as_spin_blocked(const MolecularIntegrals& ints) {
  SpinBlockedIntegrals out;
  out.n_orbitals = ints.n_orbitals;
  out.e_nuclear = ints.e_nuclear;
  out.h_a = out.h_b = ints.h;
  out.v_aa = out.v_ab = out.v_bb = ints.v;
  return out;
}

/// Energy of the determinant occupying the lowest n_alpha/n_beta orbitals of
/// a spin-blocked integral set (used to confirm basis rotations).
inline double reference_determinant_energy(const SpinBlockedIntegrals& si,
                                           int n_alpha, int n_beta) {
  double e = si.e_nuclear;
  for (int i = 0; i < n_alpha; ++i) e += si.h_a(i, i);
  for (int i = 0; i < n_beta; ++i) e += si.h_b(i, i);
  for (int i = 0; i < n_alpha; ++i)
    for (int j = 0; j < n_alpha; ++j)
      e += 0.5 * (si.v_aa(i, i, j, j) - si.v_aa(i, j, j, i));
  for (int i = 0; i < n_beta; ++i)
    for (int j = 0; j < n_beta; ++j)
      e += 0.5 * (si.v_bb(i, i, j, j) - si.v_bb(i, j, j, i));
  for (int i = 0; i < n_alpha; ++i)
    for (int j = 0; j < n_beta; ++j) e += si.v_ab(i, i, j, j);
  return e;
}

}  // namespace qcaf
