#pragma once

#include <fstream>

#include "qcaf/exactdiag.hpp"
#include "qcaf/sector_engine.hpp"

namespace qcaf {

struct MsdDeterminant {
  std::uint32_t alpha = 0;
  std::uint32_t beta = 0;
  cplx coeff;
};

/// Multi-Slater-determinant trial wavefunction: coefficients sorted by
/// descending magnitude (ties broken by determinant order), unit norm.
struct MsdTrial {
  int n_orb = 0;
  int n_alpha = 0, n_beta = 0;
  std::vector<MsdDeterminant> dets;
  std::string source;            // ansatz/geometry provenance tag
  double amplitude_floor = 1e-15;
  double leakage = 0.0;          // out-of-sector weight seen at extraction

  std::size_t n_dets() const { return dets.size(); }

  double norm2() const {
    double s = 0.0;
    for (const auto& d : dets) s += std::norm(d.coeff);
    return s;
  }
};

namespace detail {
inline void sort_and_normalize(MsdTrial& t) {
  std::stable_sort(t.dets.begin(), t.dets.end(),
                   [](const MsdDeterminant& a, const MsdDeterminant& b) {
                     double ma = std::norm(a.coeff), mb = std::norm(b.coeff);
                     if (ma != mb) return ma > mb;
                     if (a.alpha != b.alpha) return a.alpha < b.alpha;
                     return a.beta < b.beta;
                   });
  double n = std::sqrt(t.norm2());
  require(n > 0, "trial has zero norm");
  for (auto& d : t.dets) d.coeff /= n;
}
}  // namespace detail

/// Extract the particle-conserving part of a sector vector into an MSD list.
inline MsdTrial extract_msd(const VecC& sector_vec, const SectorBasis& basis,
                            double amplitude_floor = 1e-15) {
  MsdTrial t;
  t.n_orb = basis.n_orbitals();
  t.n_alpha = basis.n_alpha();
  t.n_beta = basis.n_beta();
  t.amplitude_floor = amplitude_floor;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    cplx c = sector_vec(i);
    if (std::abs(c) > amplitude_floor)
      t.dets.push_back({basis.alpha_mask(i), basis.beta_mask(i), c});
  }
  require(!t.dets.empty(), "extract_msd: no amplitudes above the floor");
  detail::sort_and_normalize(t);
  return t;
}

/// Extract from a dense statevector: non-particle-conserving amplitudes are
/// masked away; their total weight is recorded (warned about above 1e-8).
inline MsdTrial extract_msd(const Statevector& sv, int n_alpha, int n_beta,
                            double amplitude_floor = 1e-15) {
  SectorBasis basis(sv.n_qubits / 2, n_alpha, n_beta);
  VecC vec = gather_sector(sv, basis);
  double leak = sector_leakage(sv, basis);
  if (leak > 1e-8)
    std::fprintf(stderr,
                 "extract_msd: %.3e of the statevector weight lies outside "
                 "the (%d,%d) sector\n",
                 leak, n_alpha, n_beta);
  MsdTrial t = extract_msd(vec, basis, amplitude_floor);
  t.leakage = leak;
  return t;
}

/// Keep the K largest-magnitude determinants and renormalize.
inline MsdTrial truncate(const MsdTrial& t, std::size_t k) {
  require(k >= 1 && k <= t.n_dets(), "truncate: K out of range");
  MsdTrial out = t;
  out.dets.resize(k);
  double n = std::sqrt(out.norm2());
  for (auto& d : out.dets) d.coeff /= n;
  return out;
}

inline VecC reconstruct_sector(const MsdTrial& t, const SectorBasis& basis) {
  VecC v = VecC::Zero(basis.size());
  for (const auto& d : t.dets) v(basis.index(d.alpha, d.beta)) += d.coeff;
  return v;
}

/// Principal logarithm of a unitary matrix (eigendecomposition route).
inline MatC matrix_log_unitary(const MatC& u) {
  Eigen::ComplexEigenSolver<MatC> es(u);
  require(es.info() == Eigen::Success, "matrix_log_unitary: decomposition failed");
  MatC v = es.eigenvectors();
  VecC ev = es.eigenvalues();
  MatC logd = MatC::Zero(u.rows(), u.cols());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    require(std::abs(std::abs(ev(i)) - 1.0) < 1e-8,
            "matrix_log_unitary: input is not unitary");
    logd(i, i) = cplx(0.0, std::atan2(ev(i).imag(), ev(i).real()));
  }
  return v * logd * v.inverse();
}

/// Rotate a trial between orbital bases: determinants over orbitals chi'_p
/// are re-expanded over chi_q with W_qp = <chi_q | chi'_p>. Implemented as
/// the one-body exponential acting on the sector vector, which equals the
/// generalized determinant (minor) expansion.
inline MsdTrial rotate_trial(const MsdTrial& t, const Mat& w_alpha,
                             const Mat& w_beta, double amplitude_floor = 1e-15) {
  SectorBasis basis(t.n_orb, t.n_alpha, t.n_beta);
  SectorEngine eng(&basis);
  VecC v = reconstruct_sector(t, basis);
  MatC ka = matrix_log_unitary(w_alpha.cast<cplx>());
  MatC kb = matrix_log_unitary(w_beta.cast<cplx>());
  eng.apply_orbital_exponential(v, ka, kb);
  MsdTrial out = extract_msd(v, basis, amplitude_floor);
  out.source = t.source;
  return out;
}

struct TrialMetrics {
  double fidelity = 0.0;
  double spin_projected_fidelity = 0.0;
  double s_squared = 0.0;
  double variational_energy = 0.0;
};

/// Quality metrics of a trial against the exact ground-state vector.
inline TrialMetrics trial_metrics(const MsdTrial& t, const VecC& fci_vector,
                                  const SectorHamiltonian& h) {
  const SectorBasis& basis = h.basis();
  require(fci_vector.size() == static_cast<Eigen::Index>(basis.size()),
          "trial_metrics: sector mismatch");
  VecC v = reconstruct_sector(t, basis);
  TrialMetrics m;
  m.fidelity = fidelity(v, fci_vector);
  m.s_squared = s_squared(basis, v.normalized());
  m.variational_energy = h.expectation(v);
  if (basis.n_alpha() == basis.n_beta()) {
    auto proj = spin_project(basis, v);
    m.spin_projected_fidelity = fidelity(proj.state, fci_vector);
  } else {
    m.spin_projected_fidelity = m.fidelity;
  }
  return m;
}

// ---------------------------------------------------------------------------
// storage

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 14695981039346656037ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t trial_content_hash(const MsdTrial& t) {
  std::uint64_t h = fnv1a64(&t.n_orb, sizeof(t.n_orb));
  h = fnv1a64(&t.n_alpha, sizeof(t.n_alpha), h);
  h = fnv1a64(&t.n_beta, sizeof(t.n_beta), h);
  for (const auto& d : t.dets) {
    h = fnv1a64(&d.alpha, sizeof(d.alpha), h);
    h = fnv1a64(&d.beta, sizeof(d.beta), h);
    double re = d.coeff.real(), im = d.coeff.imag();
    h = fnv1a64(&re, sizeof(re), h);
    h = fnv1a64(&im, sizeof(im), h);
  }
  return h;
}

inline void save_trial(const std::string& path, const MsdTrial& t) {
  std::ofstream os(path, std::ios::binary);
  require(os.good(), "cannot write trial file: " + path);
  const char magic[8] = {'Q', 'C', 'A', 'F', 'T', 'R', 'L', '1'};
  os.write(magic, 8);
  std::uint32_t n = t.n_orb, na = t.n_alpha, nb = t.n_beta;
  std::uint64_t nd = t.n_dets();
  std::uint64_t hash = trial_content_hash(t);
  std::uint32_t slen = static_cast<std::uint32_t>(t.source.size());
  os.write(reinterpret_cast<const char*>(&n), 4);
  os.write(reinterpret_cast<const char*>(&na), 4);
  os.write(reinterpret_cast<const char*>(&nb), 4);
  os.write(reinterpret_cast<const char*>(&nd), 8);
  os.write(reinterpret_cast<const char*>(&t.amplitude_floor), 8);
  os.write(reinterpret_cast<const char*>(&hash), 8);
  os.write(reinterpret_cast<const char*>(&slen), 4);
  os.write(t.source.data(), slen);
  for (const auto& d : t.dets) {
    os.write(reinterpret_cast<const char*>(&d.alpha), 4);
    os.write(reinterpret_cast<const char*>(&d.beta), 4);
    double re = d.coeff.real(), im = d.coeff.imag();
    os.write(reinterpret_cast<const char*>(&re), 8);
    os.write(reinterpret_cast<const char*>(&im), 8);
  }
  require(os.good(), "short write on trial file: " + path);
}

inline MsdTrial load_trial(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), "cannot open trial file: " + path);
  char magic[8];
  is.read(magic, 8);
  require(std::string(magic, 8) == "QCAFTRL1", "bad trial file header");
  MsdTrial t;
  std::uint32_t n = 0, na = 0, nb = 0, slen = 0;
  std::uint64_t nd = 0, hash = 0;
  is.read(reinterpret_cast<char*>(&n), 4);
  is.read(reinterpret_cast<char*>(&na), 4);
  is.read(reinterpret_cast<char*>(&nb), 4);
  is.read(reinterpret_cast<char*>(&nd), 8);
  is.read(reinterpret_cast<char*>(&t.amplitude_floor), 8);
  is.read(reinterpret_cast<char*>(&hash), 8);
  is.read(reinterpret_cast<char*>(&slen), 4);
  t.source.resize(slen);
  is.read(t.source.data(), slen);
  t.n_orb = n;
  t.n_alpha = na;
  t.n_beta = nb;
  t.dets.resize(nd);
  for (auto& d : t.dets) {
    double re = 0, im = 0;
    is.read(reinterpret_cast<char*>(&d.alpha), 4);
    is.read(reinterpret_cast<char*>(&d.beta), 4);
    is.read(reinterpret_cast<char*>(&re), 8);
    is.read(reinterpret_cast<char*>(&im), 8);
    d.coeff = cplx(re, im);
  }
  require(is.good(), "truncated trial file: " + path);
  require(trial_content_hash(t) == hash, "trial file content hash mismatch");
  return t;
}

/// Human-readable listing of the leading determinants.
inline void write_trial_listing(std::ostream& os, const MsdTrial& t,
                                std::size_t top = 50) {
  os << "# " << t.n_dets() << " determinants, " << t.n_orb << " orbitals, ("
     << t.n_alpha << "," << t.n_beta << ") electrons";
  if (!t.source.empty()) os << ", source: " << t.source;
  os << "\n# alpha occupation | beta occupation | coefficient\n";
  auto bits = [&](std::uint32_t m) {
    std::string s;
    for (int p = 0; p < t.n_orb; ++p) s += ((m >> p) & 1) ? '1' : '0';
    return s;
  };
  for (std::size_t i = 0; i < std::min(top, t.n_dets()); ++i) {
    const auto& d = t.dets[i];
    char buf[64];
    std::snprintf(buf, sizeof(buf), "  % .12e % .12e", d.coeff.real(),
                  d.coeff.imag());
    os << bits(d.alpha) << " " << bits(d.beta) << buf << "\n";
  }
}

}  // namespace qcaf
