#pragma once

#include <cmath>

#include "qcaf/basis.hpp"
#include "qcaf/common.hpp"
#include "qcaf/geometry.hpp"

namespace qcaf {

/// Boys function F0(t) = (1/2) sqrt(pi/t) erf(sqrt(t)).
/// Taylor branch below the switch point keeps the t->0 limit smooth; the two
/// branches agree to ~1e-13 at the switch.
inline double boys0(double t) {
  if (t < 1e-10) {
    return 1.0 - t / 3.0 + t * t / 10.0 - t * t * t / 42.0;
  }
  return 0.5 * std::sqrt(kPi / t) * std::erf(std::sqrt(t));
}

/// AO-basis operator matrices over contracted s shells plus nuclear repulsion.
struct AOIntegrals {
  int n = 0;
  Mat overlap;
  Mat kinetic;
  Mat nuclear;  // electron-nucleus attraction (negative definite-ish)
  Tensor4 eri;  // chemists' (mu nu | la si)
  double e_nuclear = 0.0;
};

/// Integrals in an orthonormal orbital basis (Hartree throughout).
struct MolecularIntegrals {
  int n_orbitals = 0;
  double e_nuclear = 0.0;
  Mat h;      // one-body, symmetric
  Tensor4 v;  // two-body, chemists' (pq|rs), 8-fold symmetric
};

namespace detail {

struct PrimPair {
  double p;       // exponent sum
  double k;       // exp(-mu R_AB^2) * contraction coeffs
  std::array<double, 3> center;
};

inline std::vector<PrimPair> shell_pairs(const GaussianShell& a, const GaussianShell& b) {
  double rab2 = 0.0;
  for (int d = 0; d < 3; ++d) {
    double t = a.center[d] - b.center[d];
    rab2 += t * t;
  }
  std::vector<PrimPair> out;
  out.reserve(a.exponents.size() * b.exponents.size());
  for (std::size_t i = 0; i < a.exponents.size(); ++i) {
    for (std::size_t j = 0; j < b.exponents.size(); ++j) {
      double al = a.exponents[i], be = b.exponents[j];
      double p = al + be;
      PrimPair pp;
      pp.p = p;
      pp.k = a.coefficients[i] * b.coefficients[j] * std::exp(-al * be / p * rab2);
      for (int d = 0; d < 3; ++d) pp.center[d] = (al * a.center[d] + be * b.center[d]) / p;
      out.push_back(pp);
    }
  }
  return out;
}

}  // namespace detail

/// Closed-form s-type Gaussian integrals over the whole shell list.
inline AOIntegrals compute_ao_integrals(const Geometry& g,
                                        const std::vector<GaussianShell>& shells) {
  const int n = static_cast<int>(shells.size());
  AOIntegrals ao;
  ao.n = n;
  ao.overlap = Mat::Zero(n, n);
  ao.kinetic = Mat::Zero(n, n);
  ao.nuclear = Mat::Zero(n, n);
  ao.eri = Tensor4(n);
  ao.e_nuclear = nuclear_repulsion(g);

  for (int a = 0; a < n; ++a) {
    for (int b = 0; b <= a; ++b) {
      double rab2 = 0.0;
      for (int d = 0; d < 3; ++d) {
        double t = shells[a].center[d] - shells[b].center[d];
        rab2 += t * t;
      }
      double s = 0.0, kin = 0.0, nuc = 0.0;
      for (std::size_t i = 0; i < shells[a].exponents.size(); ++i) {
        for (std::size_t j = 0; j < shells[b].exponents.size(); ++j) {
          double al = shells[a].exponents[i], be = shells[b].exponents[j];
          double p = al + be;
          double mu = al * be / p;
          double pref = shells[a].coefficients[i] * shells[b].coefficients[j] *
                        std::exp(-mu * rab2);
          double s00 = std::pow(kPi / p, 1.5) * pref;
          s += s00;
          kin += mu * (3.0 - 2.0 * mu * rab2) * s00;
          std::array<double, 3> P;
          for (int d = 0; d < 3; ++d)
            P[d] = (al * shells[a].center[d] + be * shells[b].center[d]) / p;
          for (int c = 0; c < g.n_atoms(); ++c) {
            double rpc2 = 0.0;
            for (int d = 0; d < 3; ++d) {
              double t = P[d] - g.positions[c][d];
              rpc2 += t * t;
            }
            nuc -= g.charges[c] * 2.0 * kPi / p * pref * boys0(p * rpc2);
          }
        }
      }
      ao.overlap(a, b) = ao.overlap(b, a) = s;
      ao.kinetic(a, b) = ao.kinetic(b, a) = kin;
      ao.nuclear(a, b) = ao.nuclear(b, a) = nuc;
    }
  }

  // ERI over canonical quartets a>=b, ab>=cd; copied to all 8 slots.
  auto pair_index = [](int a, int b) { return a * (a + 1) / 2 + b; };
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b <= a; ++b) {
      auto ab = detail::shell_pairs(shells[a], shells[b]);
      for (int c = 0; c < n; ++c) {
        for (int d = 0; d <= c; ++d) {
          if (pair_index(a, b) < pair_index(c, d)) continue;
          auto cd = detail::shell_pairs(shells[c], shells[d]);
          double val = 0.0;
          for (const auto& pp : ab) {
            for (const auto& qq : cd) {
              double rpq2 = 0.0;
              for (int dd = 0; dd < 3; ++dd) {
                double t = pp.center[dd] - qq.center[dd];
                rpq2 += t * t;
              }
              double denom = pp.p * qq.p * std::sqrt(pp.p + qq.p);
              double t = pp.p * qq.p / (pp.p + qq.p) * rpq2;
              val += pp.k * qq.k * 2.0 * std::pow(kPi, 2.5) / denom * boys0(t);
            }
          }
          ao.eri.set_symmetric(a, b, c, d, val);
        }
      }
    }
  }
  return ao;
}

inline AOIntegrals compute_ao_integrals(const Geometry& g) {
  return compute_ao_integrals(g, sto6g_basis(g));
}

/// Four-index transform V'(ijkl) = sum C(p,i)C(q,j)C(r,k)C(s,l) (pq|rs),
/// one index at a time.
inline Tensor4 transform_eri(const Tensor4& v, const Mat& c1, const Mat& c2,
                             const Mat& c3, const Mat& c4) {
  const int n = v.n();
  auto contract_first = [n](const Tensor4& t, const Mat& c) {
    Tensor4 out(n);
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
          for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int p = 0; p < n; ++p) acc += c(p, i) * t(p, q, r, s);
            out(q, r, s, i) = acc;  // cyclic shift: transformed index goes last
          }
    return out;
  };
  // four cyclic passes bring indices back to (i j k l)
  Tensor4 t = contract_first(v, c1);
  t = contract_first(t, c2);
  t = contract_first(t, c3);
  t = contract_first(t, c4);
  return t;
}

inline Tensor4 transform_eri(const Tensor4& v, const Mat& c) {
  return transform_eri(v, c, c, c, c);
}

/// Lowdin S^{-1/2} orthonormalization into MolecularIntegrals.
inline MolecularIntegrals orthonormalize_lowdin(const AOIntegrals& ao) {
  Eigen::SelfAdjointEigenSolver<Mat> es(ao.overlap);
  require(es.eigenvalues().minCoeff() > 1e-10,
          "AO overlap is near-singular; geometry too compressed for this basis");
  Mat x = es.eigenvectors() *
          es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
          es.eigenvectors().transpose();
  MolecularIntegrals mi;
  mi.n_orbitals = ao.n;
  mi.e_nuclear = ao.e_nuclear;
  mi.h = x.transpose() * (ao.kinetic + ao.nuclear) * x;
  mi.h = 0.5 * (mi.h + mi.h.transpose()).eval();
  mi.v = transform_eri(ao.eri, x);
  return mi;
}

/// Convenience pipeline: geometry -> Lowdin-orthonormal integrals.
inline MolecularIntegrals lowdin_integrals(const Geometry& g) {
  return orthonormalize_lowdin(compute_ao_integrals(g));
}

}  // namespace qcaf
