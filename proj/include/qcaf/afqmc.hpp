#pragma once

#include <cmath>
#include <limits>
#include <memory>

#include "qcaf/cholesky.hpp"
#include "qcaf/rng.hpp"
#include "qcaf/trial.hpp"

namespace qcaf {

/// Electronic-structure input for the propagator: physical one-body
/// matrices and the per-spin rotated Cholesky field matrices
/// g^s = C^sT (L/sqrt(2)) C^s, so (pq|rs)^{st} = sum_g g^s_pq g^t_rs.
struct AfqmcProblem {
  int n_orb = 0;
  int n_alpha = 0, n_beta = 0;
  double e_nuclear = 0.0;
  Mat h_a, h_b;
  std::vector<Mat> g_a, g_b;

  int n_aux() const { return static_cast<int>(g_a.size()); }
};

inline AfqmcProblem make_afqmc_problem(const MolecularIntegrals& ints,
                                       const CholeskyFactors& chol, int n_alpha,
                                       int n_beta) {
  AfqmcProblem p;
  p.n_orb = ints.n_orbitals;
  p.n_alpha = n_alpha;
  p.n_beta = n_beta;
  p.e_nuclear = ints.e_nuclear;
  p.h_a = p.h_b = ints.h;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (const auto& l : chol.l) {
    p.g_a.push_back(inv_sqrt2 * l);
    p.g_b.push_back(inv_sqrt2 * l);
  }
  return p;
}

/// Problem in a spin-dependent orbital basis (UHF rotation): the shared
/// Cholesky vectors are rotated per spin, preserving the factorization.
inline AfqmcProblem make_afqmc_problem_rotated(const MolecularIntegrals& ints,
                                               const CholeskyFactors& chol,
                                               const ScfSolution& scf) {
  AfqmcProblem p;
  p.n_orb = ints.n_orbitals;
  p.n_alpha = scf.n_alpha;
  p.n_beta = scf.n_beta;
  p.e_nuclear = ints.e_nuclear;
  p.h_a = scf.c_alpha.transpose() * ints.h * scf.c_alpha;
  p.h_b = scf.c_beta.transpose() * ints.h * scf.c_beta;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (const auto& l : chol.l) {
    p.g_a.push_back(scf.c_alpha.transpose() * (inv_sqrt2 * l) * scf.c_alpha);
    p.g_b.push_back(scf.c_beta.transpose() * (inv_sqrt2 * l) * scf.c_beta);
  }
  return p;
}

/// One imaginary-time-step propagator:
///   B(y) = e^{-dt/2 h''} e^{i sqrt(dt) sum_g y_g (v_g - <v_g>_T)} e^{-dt/2 h''},
/// with h'' = h - 1/2 sum_g g_g^2 + sum_g m_g g_g (normal ordering plus
/// mean-field subtraction) and the scalar C = E_nuc - 1/2 sum_g m_g^2.
struct Propagator {
  double dtau = 0.01;
  Mat exp_half_a, exp_half_b;
  Vec mf_shift;       // m_g = <v_g>_T
  double c_scalar = 0.0;
  double e_shift = 0.0;    // population growth shift
  double fb_cap = 0.0;     // force-bias component bound sqrt(2/dtau)
  double log_weight_cap = 10.0;
};

struct Walker {
  MatC phi_a, phi_b;
  double weight = 1.0;
  cplx ovlp;  // <Psi_T | phi>
  std::uint64_t lineage = 0;
  PhiloxStream rng;
  long fb_capped = 0;  // diagnostics
};

struct EnsembleState {
  std::vector<Walker> walkers;
  int target_population = 0;
  double tau = 0.0;
  std::uint64_t master_seed = 1;
  std::uint64_t next_lineage = 0;
  PhiloxStream control_rng;
};

namespace detail {

inline MatC exp_apply(const MatC& a, MatC phi) {
  // phi <- exp(a) phi by scaled Taylor
  double bound = a.cwiseAbs().sum();
  int s = 0;
  while (bound > 0.5 && s < 40) {
    bound *= 0.5;
    ++s;
  }
  MatC as = a * std::ldexp(1.0, -s);
  for (int rep = 0; rep < (1 << s); ++rep) {
    MatC term = phi;
    for (int k = 1; k <= 18; ++k) {
      term = (as * term) / double(k);
      phi += term;
      if (term.cwiseAbs().maxCoeff() < 1e-16) break;
    }
  }
  return phi;
}

}  // namespace detail

/// Trial-side evaluator for walker overlaps, force bias and local energy.
/// Two equivalent routes: per-determinant Green's functions (the direct
/// route, best for few determinants) and precomputed sector vectors
/// (H c and g_gamma c dotted against the walker's string minors, best for
/// dense multi-determinant trials). The crossover is chosen by cost unless
/// forced.
class TrialEngine {
 public:
  enum class Path { kAuto, kGreens, kSector };

  TrialEngine(const AfqmcProblem& prob, const MsdTrial& trial,
              Path path = Path::kAuto)
      : prob_(&prob), trial_(&trial) {
    require(trial.n_orb == prob.n_orb, "trial/problem orbital mismatch");
    for (const auto& d : trial.dets) {
      occ_a_.push_back(occupied_list(d.alpha));
      occ_b_.push_back(occupied_list(d.beta));
    }
    if (path == Path::kAuto) {
      // per-step cost ~ N_dets * N * M^2 * N_aux (Greens) vs
      // sector_dim * N_aux (+ string minors)
      double n = prob.n_orb, m = std::max(prob.n_alpha, prob.n_beta);
      double greens = static_cast<double>(trial.n_dets()) * n * m * m * prob.n_aux();
      double dim = static_cast<double>(binomial(prob.n_orb, prob.n_alpha)) *
                   static_cast<double>(binomial(prob.n_orb, prob.n_beta));
      double sector = dim * prob.n_aux();
      path = (sector < greens && dim <= 200000) ? Path::kSector : Path::kGreens;
    }
    path_ = path;
    if (path_ == Path::kSector) build_sector_tables();
  }

  Path path() const { return path_; }

  /// <Psi_T | phi> = sum_n c_n^* det(phi_a[occ_n]) det(phi_b[occ_n]).
  cplx overlap(const Walker& w) const {
    if (path_ == Path::kSector) {
      StringDets sd = string_minors(w);
      cplx o(0.0, 0.0);
      const auto& basis = sector_->basis();
      const std::size_t nb = basis.n_beta_strings();
      for (std::size_t i = 0; i < basis.size(); ++i)
        o += std::conj(cvec_(i)) * sd.da[i / nb] * sd.db[i % nb];
      return o;
    }
    cplx o(0.0, 0.0);
    for (std::size_t n = 0; n < trial_->n_dets(); ++n) {
      cplx da = minor_det(w.phi_a, occ_a_[n]);
      cplx db = minor_det(w.phi_b, occ_b_[n]);
      o += std::conj(trial_->dets[n].coeff) * da * db;
    }
    return o;
  }

  struct StepQuantities {
    cplx ovlp;        // <Psi_T|phi>
    VecC g_expect;    // <v_g>_{T,phi} per auxiliary field
  };

  /// Overlap and the per-field mixed expectations feeding the force bias.
  StepQuantities step_quantities(const Walker& w) const {
    StepQuantities out;
    const int naux = prob_->n_aux();
    out.g_expect = VecC::Zero(naux);
    if (path_ == Path::kSector) {
      StringDets sd = string_minors(w);
      const auto& basis = sector_->basis();
      const std::size_t nb = basis.n_beta_strings();
      VecC psi(basis.size());
      for (std::size_t i = 0; i < basis.size(); ++i)
        psi(i) = sd.da[i / nb] * sd.db[i % nb];
      out.ovlp = cvec_.dot(psi);
      if (std::abs(out.ovlp) < 1e-14) return out;
      for (int g = 0; g < naux; ++g) out.g_expect(g) = gvecs_[g].dot(psi) / out.ovlp;
      return out;
    }
    // Greens-function route
    out.ovlp = cplx(0.0, 0.0);
    VecC acc = VecC::Zero(naux);
    for (std::size_t n = 0; n < trial_->n_dets(); ++n) {
      DetGreens dg;
      if (!det_greens(w, n, &dg)) continue;
      cplx wn = std::conj(trial_->dets[n].coeff) * dg.det_a * dg.det_b;
      out.ovlp += wn;
      for (int g = 0; g < naux; ++g) {
        cplx tr = green_trace(prob_->g_a[g], dg.theta_a, occ_a_[n]) +
                  green_trace(prob_->g_b[g], dg.theta_b, occ_b_[n]);
        acc(g) += wn * tr;
      }
    }
    if (std::abs(out.ovlp) >= 1e-14) out.g_expect = acc / out.ovlp;
    return out;
  }

  /// E_L = <Psi_T|H|phi> / <Psi_T|phi> (real part used by estimators).
  cplx local_energy(const Walker& w) const {
    if (path_ == Path::kSector) {
      StringDets sd = string_minors(w);
      const auto& basis = sector_->basis();
      const std::size_t nb = basis.n_beta_strings();
      cplx num(0.0, 0.0), den(0.0, 0.0);
      for (std::size_t i = 0; i < basis.size(); ++i) {
        cplx s = sd.da[i / nb] * sd.db[i % nb];
        num += std::conj(hc_(i)) * s;
        den += std::conj(cvec_(i)) * s;
      }
      require(std::abs(den) >= 1e-14, "local_energy: dead walker");
      return num / den;
    }
    const int naux = prob_->n_aux();
    cplx num(0.0, 0.0), den(0.0, 0.0);
    for (std::size_t n = 0; n < trial_->n_dets(); ++n) {
      DetGreens dg;
      if (!det_greens(w, n, &dg)) continue;
      cplx wn = std::conj(trial_->dets[n].coeff) * dg.det_a * dg.det_b;
      den += wn;
      cplx e1(0.0, 0.0);
      e1 += green_trace(prob_->h_a, dg.theta_a, occ_a_[n]);
      e1 += green_trace(prob_->h_b, dg.theta_b, occ_b_[n]);
      cplx e2(0.0, 0.0);
      for (int g = 0; g < naux; ++g) {
        cplx fa = green_trace(prob_->g_a[g], dg.theta_a, occ_a_[n]);
        cplx fb = green_trace(prob_->g_b[g], dg.theta_b, occ_b_[n]);
        cplx f = fa + fb;
        e2 += 0.5 * f * f;
        e2 -= 0.5 * exchange_term(prob_->g_a[g], dg.theta_a, occ_a_[n]);
        e2 -= 0.5 * exchange_term(prob_->g_b[g], dg.theta_b, occ_b_[n]);
      }
      num += wn * (e1 + e2);
    }
    require(std::abs(den) >= 1e-14, "local_energy: dead walker");
    return num / den + prob_->e_nuclear;
  }

  /// Trial one-body density matrices (for the mean-field shift).
  std::pair<Mat, Mat> trial_one_rdm() const {
    const int n = prob_->n_orb;
    Mat pa = Mat::Zero(n, n), pb = Mat::Zero(n, n);
    // <T| a+_p a_q |T> over the determinant list
    for (std::size_t m = 0; m < trial_->n_dets(); ++m) {
      for (std::size_t k = 0; k < trial_->n_dets(); ++k) {
        const auto& dm = trial_->dets[m];
        const auto& dk = trial_->dets[k];
        if (dm.beta == dk.beta) accumulate_rdm(dm.alpha, dk.alpha,
                                               std::conj(dm.coeff) * dk.coeff, pa);
        if (dm.alpha == dk.alpha) accumulate_rdm(dm.beta, dk.beta,
                                                 std::conj(dm.coeff) * dk.coeff, pb);
      }
    }
    return {pa, pb};
  }

 private:
  struct DetGreens {
    cplx det_a, det_b;
    MatC theta_a, theta_b;  // Phi (Phi[occ])^{-1}, N x M
  };

  static cplx minor_det(const MatC& phi, const std::vector<int>& occ) {
    const int m = static_cast<int>(occ.size());
    MatC a(m, m);
    for (int r = 0; r < m; ++r) a.row(r) = phi.row(occ[r]);
    return a.determinant();
  }

  bool det_greens(const Walker& w, std::size_t n, DetGreens* out) const {
    const int ma = static_cast<int>(occ_a_[n].size());
    const int mb = static_cast<int>(occ_b_[n].size());
    MatC aa(ma, ma), ab(mb, mb);
    for (int r = 0; r < ma; ++r) aa.row(r) = w.phi_a.row(occ_a_[n][r]);
    for (int r = 0; r < mb; ++r) ab.row(r) = w.phi_b.row(occ_b_[n][r]);
    Eigen::PartialPivLU<MatC> lua(aa), lub(ab);
    out->det_a = lua.determinant();
    out->det_b = lub.determinant();
    if (std::abs(out->det_a) < 1e-14 || std::abs(out->det_b) < 1e-14) return false;
    out->theta_a = w.phi_a * lua.inverse();  // Theta = Phi (Phi[occ])^{-1}
    out->theta_b = w.phi_b * lub.inverse();
    return true;
  }

  /// sum_pq o_pq <a+_p a_q> = sum_{j,q} o(occ[j], q) Theta(q, j).
  static cplx green_trace(const Mat& o, const MatC& theta,
                          const std::vector<int>& occ) {
    cplx acc(0.0, 0.0);
    const int n = static_cast<int>(theta.rows());
    for (std::size_t j = 0; j < occ.size(); ++j)
      for (int q = 0; q < n; ++q) acc += o(occ[j], q) * theta(q, j);
    return acc;
  }

  /// sum_{pqrs} g_pq g_rs <a+_p a_s><a+_r a_q> = Tr[(g[occ,:] Theta)^2].
  static cplx exchange_term(const Mat& g, const MatC& theta,
                            const std::vector<int>& occ) {
    const int m = static_cast<int>(occ.size());
    const int n = static_cast<int>(theta.rows());
    MatC b(m, m);
    for (int j = 0; j < m; ++j)
      for (int l = 0; l < m; ++l) {
        cplx acc(0.0, 0.0);
        for (int q = 0; q < n; ++q) acc += g(occ[j], q) * theta(q, l);
        b(j, l) = acc;
      }
    cplx tr(0.0, 0.0);
    for (int j = 0; j < m; ++j)
      for (int l = 0; l < m; ++l) tr += b(j, l) * b(l, j);
    return tr;
  }

  void accumulate_rdm(std::uint32_t bra, std::uint32_t ket, cplx w, Mat& p) const {
    const int n = prob_->n_orb;
    for (int q = 0; q < n; ++q) {
      if (!((ket >> q) & 1u)) continue;
      for (int pidx = 0; pidx < n; ++pidx) {
        std::uint32_t m2;
        int sg;
        if (!excite(ket, pidx, q, &m2, &sg)) continue;
        if (m2 == bra) p(pidx, q) += (w * double(sg)).real();
      }
    }
  }

  struct StringDets {
    std::vector<cplx> da, db;
  };

  StringDets string_minors(const Walker& w) const {
    const auto& basis = sector_->basis();
    StringDets sd;
    sd.da.resize(basis.n_alpha_strings());
    sd.db.resize(basis.n_beta_strings());
    for (std::size_t i = 0; i < sd.da.size(); ++i)
      sd.da[i] = minor_det(w.phi_a, occupied_list(basis.alpha_strings()[i]));
    for (std::size_t i = 0; i < sd.db.size(); ++i)
      sd.db[i] = minor_det(w.phi_b, occupied_list(basis.beta_strings()[i]));
    return sd;
  }

  void build_sector_tables() {
    SpinBlockedIntegrals si;
    si.n_orbitals = prob_->n_orb;
    si.e_nuclear = prob_->e_nuclear;
    si.h_a = prob_->h_a;
    si.h_b = prob_->h_b;
    si.v_aa = Tensor4(prob_->n_orb);
    si.v_ab = Tensor4(prob_->n_orb);
    si.v_bb = Tensor4(prob_->n_orb);
    const int n = prob_->n_orb;
    for (int g = 0; g < prob_->n_aux(); ++g)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s) {
              si.v_aa(p, q, r, s) += prob_->g_a[g](p, q) * prob_->g_a[g](r, s);
              si.v_ab(p, q, r, s) += prob_->g_a[g](p, q) * prob_->g_b[g](r, s);
              si.v_bb(p, q, r, s) += prob_->g_b[g](p, q) * prob_->g_b[g](r, s);
            }
    sector_ = std::make_shared<SectorHamiltonian>(
        std::move(si), SectorBasis(prob_->n_orb, prob_->n_alpha, prob_->n_beta),
        /*sparse_limit=*/0);
    const auto& basis = sector_->basis();
    cvec_ = reconstruct_sector(*trial_, basis);
    sector_->apply(cvec_, hc_);
    // one-body g vectors: (g_hat c) per auxiliary field
    SectorEngine eng(&basis);
    gvecs_.resize(prob_->n_aux());
    for (int g = 0; g < prob_->n_aux(); ++g) {
      gvecs_[g] = VecC::Zero(basis.size());
      eng.one_body_apply(prob_->g_a[g].cast<cplx>(), prob_->g_b[g].cast<cplx>(),
                         cvec_, gvecs_[g]);
    }
  }

  const AfqmcProblem* prob_;
  const MsdTrial* trial_;
  Path path_ = Path::kGreens;
  std::vector<std::vector<int>> occ_a_, occ_b_;
  // sector-path tables
  std::shared_ptr<SectorHamiltonian> sector_;
  VecC cvec_, hc_;
  std::vector<VecC> gvecs_;
};

inline Propagator build_propagator(const AfqmcProblem& prob,
                                   const TrialEngine& engine, double dtau = 0.01) {
  require(dtau > 0, "build_propagator: dtau must be positive");
  Propagator prop;
  prop.dtau = dtau;
  prop.fb_cap = std::sqrt(2.0 / dtau);
  const int n = prob.n_orb;
  auto [pa, pb] = engine.trial_one_rdm();
  prop.mf_shift = Vec::Zero(prob.n_aux());
  for (int g = 0; g < prob.n_aux(); ++g)
    prop.mf_shift(g) =
        (prob.g_a[g].array() * pa.array()).sum() + (prob.g_b[g].array() * pb.array()).sum();

  Mat ha = prob.h_a, hb = prob.h_b;
  for (int g = 0; g < prob.n_aux(); ++g) {
    ha -= 0.5 * prob.g_a[g] * prob.g_a[g];
    hb -= 0.5 * prob.g_b[g] * prob.g_b[g];
    ha += prop.mf_shift(g) * prob.g_a[g];
    hb += prop.mf_shift(g) * prob.g_b[g];
  }
  Eigen::SelfAdjointEigenSolver<Mat> esa(ha), esb(hb);
  prop.exp_half_a = esa.eigenvectors() *
                    (-0.5 * dtau * esa.eigenvalues().array()).exp().matrix().asDiagonal() *
                    esa.eigenvectors().transpose();
  prop.exp_half_b = esb.eigenvectors() *
                    (-0.5 * dtau * esb.eigenvalues().array()).exp().matrix().asDiagonal() *
                    esb.eigenvectors().transpose();
  prop.c_scalar = prob.e_nuclear - 0.5 * prop.mf_shift.squaredNorm();
  return prop;
}

/// One phaseless step of a single walker: sample fields around the force
/// bias, propagate with B(x - xbar), update the weight with the hybrid
/// importance function and the phase projection max(0, cos theta).
inline void propagate_step(Walker& w, const Propagator& prop,
                           const AfqmcProblem& prob, const TrialEngine& engine) {
  if (w.weight <= 0.0) return;
  const int naux = prob.n_aux();
  const double sqdt = std::sqrt(prop.dtau);

  auto sq = engine.step_quantities(w);
  if (std::abs(sq.ovlp) < 1e-14) {
    w.weight = 0.0;
    return;
  }

  // force bias with per-component cap
  VecC xbar(naux);
  for (int g = 0; g < naux; ++g) {
    cplx fb = cplx(0.0, -1.0) * sqdt * (sq.g_expect(g) - prop.mf_shift(g));
    double mag = std::abs(fb);
    if (mag > prop.fb_cap) {
      fb *= prop.fb_cap / mag;
      ++w.fb_capped;
    }
    xbar(g) = fb;
  }

  Vec x(naux);
  for (int g = 0; g < naux; ++g) x(g) = w.rng.normal();
  VecC y = x.cast<cplx>() - xbar;

  // one-body HS matrix per spin
  MatC aa = MatC::Zero(prob.n_orb, prob.n_orb);
  MatC ab = MatC::Zero(prob.n_orb, prob.n_orb);
  const cplx isqdt(0.0, sqdt);
  for (int g = 0; g < naux; ++g) {
    aa += (isqdt * y(g)) * prob.g_a[g];
    ab += (isqdt * y(g)) * prob.g_b[g];
  }
  MatC phi_a = prop.exp_half_a * w.phi_a;
  MatC phi_b = prop.exp_half_b * w.phi_b;
  phi_a = detail::exp_apply(aa, std::move(phi_a));
  phi_b = detail::exp_apply(ab, std::move(phi_b));
  w.phi_a = prop.exp_half_a * phi_a;
  w.phi_b = prop.exp_half_b * phi_b;

  cplx new_ovlp = engine.overlap(w);
  if (std::abs(new_ovlp) < 1e-14) {
    w.weight = 0.0;
    w.ovlp = new_ovlp;
    return;
  }
  cplx ratio = new_ovlp / sq.ovlp;
  // scalar pieces of B: mean-field shift phase and the force-bias Gaussian
  // factor (plain bilinear forms, no conjugation)
  cplx cmf = cplx(0.0, -sqdt) * (y.transpose() * prop.mf_shift.cast<cplx>())(0);
  cplx cfb = (x.cast<cplx>().transpose() * xbar)(0) -
             0.5 * (xbar.transpose() * xbar)(0);

  cplx op_ratio = ratio * std::exp(cmf);
  double theta = std::arg(op_ratio);
  double mag = std::abs(op_ratio) * std::exp(cfb.real());
  double factor = mag * std::max(0.0, std::cos(theta)) *
                  std::exp(-prop.dtau * (prop.c_scalar - prop.e_shift));
  double logcap = std::exp(prop.log_weight_cap);
  if (factor > logcap) {
    std::fprintf(stderr, "afqmc: weight factor capped (%.3e)\n", factor);
    factor = logcap;
  }
  if (!std::isfinite(factor)) throw Error("afqmc: non-finite weight factor");
  w.weight *= factor;
  w.ovlp = new_ovlp;
}

/// QR-based reorthonormalization; the R factors are absorbed into the
/// cached overlap so estimators are unchanged.
inline void reorthonormalize(Walker& w) {
  auto qr_spin = [](MatC& phi) -> cplx {
    const int m = static_cast<int>(phi.cols());
    Eigen::HouseholderQR<MatC> qr(phi);
    MatC r = qr.matrixQR().topRows(m).template triangularView<Eigen::Upper>();
    cplx det(1.0, 0.0);
    for (int i = 0; i < m; ++i) det *= r(i, i);
    if (std::abs(det) < 1e-300) return cplx(0.0, 0.0);
    MatC thin = MatC::Identity(phi.rows(), m);
    phi = qr.householderQ() * thin;
    return det;
  };
  cplx da = qr_spin(w.phi_a);
  cplx db = qr_spin(w.phi_b);
  if (da == cplx(0.0, 0.0) || db == cplx(0.0, 0.0)) {
    w.weight = 0.0;  // rank-deficient walker
    return;
  }
  w.ovlp /= (da * db);
}

/// Systematic-comb resampling: clones large weights, removes small ones,
/// conserves the total weight at the event, then rescales to the target
/// population so every walker restarts at unit weight.
inline void population_control(EnsembleState& ens) {
  const int nw = ens.target_population;
  double wtot = 0.0;
  for (const auto& w : ens.walkers) wtot += w.weight;
  require(wtot >= 1e-12 * nw,
          "population_control: total weight underflow, ensemble collapsed");
  double u = ens.control_rng.uniform();
  std::vector<Walker> next;
  next.reserve(nw);
  std::size_t src = 0;
  double stride = wtot / nw;
  double cum_src = ens.walkers.empty() ? 0.0 : ens.walkers[0].weight;
  for (int k = 0; k < nw; ++k) {
    double pos = (k + u) * stride;
    while (pos >= cum_src && src + 1 < ens.walkers.size()) {
      ++src;
      cum_src += ens.walkers[src].weight;
    }
    Walker clone = ens.walkers[src];
    clone.weight = stride;  // conserves sum = wtot
    clone.lineage = ens.next_lineage++;
    clone.rng = PhiloxStream(ens.master_seed, clone.lineage);
    next.push_back(std::move(clone));
  }
  // rescale to the target population (mixed estimators are ratio-based)
  for (auto& w : next) w.weight = 1.0;
  ens.walkers = std::move(next);
}

struct EnergySample {
  double tau = 0.0;
  double total_weight = 0.0;
  double e_block = 0.0;
};

struct EnergySeries {
  std::vector<EnergySample> samples;
  double burn_in_fraction = 0.25;
  double dtau = 0.01;
  long fb_capped = 0;
};

struct AfqmcConfig {
  double tau_total = 40.0;
  double dtau = 0.01;
  int n_walkers = 1280;
  int stabilize_every = 5;  // reorthonormalization + population control
  std::uint64_t seed = 1;
  double burn_in_fraction = 0.25;
  TrialEngine::Path path = TrialEngine::Path::kAuto;
  double e_shift = std::numeric_limits<double>::quiet_NaN();
  bool verbose = false;
};

/// Full phaseless AFQMC run: weighted mixed-estimator samples every
/// stabilization cycle. Deterministic for a fixed seed and any thread count.
inline EnergySeries run_afqmc(const AfqmcProblem& prob, const MsdTrial& trial,
                              const AfqmcConfig& cfg) {
  TrialEngine engine(prob, trial, cfg.path);
  Propagator prop = build_propagator(prob, engine, cfg.dtau);

  // initial determinant: the reference occupation, or the trial's dominant
  // determinant if the reference is orthogonal to the trial
  std::uint32_t init_a = (std::uint32_t{1} << prob.n_alpha) - 1;
  std::uint32_t init_b = (std::uint32_t{1} << prob.n_beta) - 1;
  auto make_walker = [&](std::uint64_t lineage) {
    Walker w;
    w.phi_a = MatC::Zero(prob.n_orb, prob.n_alpha);
    w.phi_b = MatC::Zero(prob.n_orb, prob.n_beta);
    auto oa = occupied_list(init_a);
    auto ob = occupied_list(init_b);
    for (int j = 0; j < prob.n_alpha; ++j) w.phi_a(oa[j], j) = 1.0;
    for (int j = 0; j < prob.n_beta; ++j) w.phi_b(ob[j], j) = 1.0;
    w.weight = 1.0;
    w.lineage = lineage;
    w.rng = PhiloxStream(cfg.seed, lineage);
    w.ovlp = engine.overlap(w);
    return w;
  };
  {
    Walker probe = make_walker(0);
    if (std::abs(probe.ovlp) < 1e-12 && !trial.dets.empty()) {
      init_a = trial.dets[0].alpha;
      init_b = trial.dets[0].beta;
    }
  }

  EnsembleState ens;
  ens.target_population = cfg.n_walkers;
  ens.master_seed = cfg.seed;
  ens.control_rng = PhiloxStream(cfg.seed, 0xC0117801ull);
  for (int k = 0; k < cfg.n_walkers; ++k)
    ens.walkers.push_back(make_walker(ens.next_lineage++));

  prop.e_shift = std::isnan(cfg.e_shift)
                     ? engine.local_energy(ens.walkers[0]).real()
                     : cfg.e_shift;

  const long n_steps = std::lround(cfg.tau_total / cfg.dtau);
  EnergySeries series;
  series.burn_in_fraction = cfg.burn_in_fraction;
  series.dtau = cfg.dtau;

  std::vector<double> eloc(cfg.n_walkers);
  for (long step = 1; step <= n_steps; ++step) {
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < cfg.n_walkers; ++k)
      propagate_step(ens.walkers[k], prop, prob, engine);
    ens.tau = step * cfg.dtau;
    if (step % cfg.stabilize_every == 0) {
#pragma omp parallel for schedule(dynamic)
      for (int k = 0; k < cfg.n_walkers; ++k) {
        if (ens.walkers[k].weight > 0.0) reorthonormalize(ens.walkers[k]);
        eloc[k] = ens.walkers[k].weight > 0.0
                      ? engine.local_energy(ens.walkers[k]).real()
                      : 0.0;
      }
      double wsum = 0.0, esum = 0.0;  // fixed-order reduction
      for (int k = 0; k < cfg.n_walkers; ++k) {
        wsum += ens.walkers[k].weight;
        esum += ens.walkers[k].weight * eloc[k];
      }
      if (wsum <= 0.0 || !std::isfinite(esum))
        throw Error("afqmc: ensemble collapsed or non-finite energy sample");
      series.samples.push_back({ens.tau, wsum, esum / wsum});
      if (cfg.verbose && (series.samples.size() % 100 == 0))
        std::fprintf(stderr, "tau %8.2f  W %10.3f  E %.8f\n", ens.tau, wsum,
                     esum / wsum);
      population_control(ens);
    }
  }
  for (const auto& w : ens.walkers) series.fb_capped += w.fb_capped;
  return series;
}

}  // namespace qcaf
