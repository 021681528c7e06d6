#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "qcaf/common.hpp"
#include "qcaf/integrals.hpp"

namespace qcaf {

struct FcidumpData {
  MolecularIntegrals ints;
  int n_electrons = 0;
  int ms2 = 0;
};

namespace detail {

/// Canonical representative of the 8 permutations of (p,q,r,s), chemists'.
inline std::array<int, 4> canonical_quartet(int p, int q, int r, int s) {
  if (p < q) std::swap(p, q);
  if (r < s) std::swap(r, s);
  if (p < r || (p == r && q < s)) {
    std::swap(p, r);
    std::swap(q, s);
  }
  return {p, q, r, s};
}

inline int parse_header_int(const std::string& header, const std::string& key) {
  auto pos = header.find(key);
  require(pos != std::string::npos, "FCIDUMP header missing " + key);
  pos += key.size();
  while (pos < header.size() && (header[pos] == ' ' || header[pos] == '=')) ++pos;
  std::size_t end = pos;
  while (end < header.size() && (std::isdigit(header[end]) || header[end] == '-')) ++end;
  require(end > pos, "FCIDUMP header: no value for " + key);
  return std::stoi(header.substr(pos, end - pos));
}

}  // namespace detail

/// Write the FCIDUMP interchange format: canonical unique two-body entries,
/// one-body entries with k=l=0, core/nuclear energy as the all-zero row.
inline void write_fcidump(std::ostream& os, const MolecularIntegrals& mi,
                          int n_electrons, int ms2 = 0) {
  const int n = mi.n_orbitals;
  os << "&FCI NORB=" << n << ",NELEC=" << n_electrons << ",MS2=" << ms2 << ",\n";
  os << "  ORBSYM=";
  for (int i = 0; i < n; ++i) os << "1,";
  os << "\n  ISYM=1,\n&END\n";
  os << std::scientific << std::setprecision(16);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r <= p; ++r)
        for (int s = 0; s <= r; ++s) {
          if (p * (p + 1) / 2 + q < r * (r + 1) / 2 + s) continue;
          double v = mi.v(p, q, r, s);
          if (v != 0.0)
            os << std::setw(24) << v << " " << p + 1 << " " << q + 1 << " "
               << r + 1 << " " << s + 1 << "\n";
        }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      if (mi.h(p, q) != 0.0)
        os << std::setw(24) << mi.h(p, q) << " " << p + 1 << " " << q + 1
           << " 0 0\n";
  os << std::setw(24) << mi.e_nuclear << " 0 0 0 0\n";
}

inline std::string write_fcidump_string(const MolecularIntegrals& mi,
                                        int n_electrons, int ms2 = 0) {
  std::ostringstream os;
  write_fcidump(os, mi, n_electrons, ms2);
  return os.str();
}

/// Parse FCIDUMP text. Unlisted permutations are filled by 8-fold symmetry;
/// duplicate entries that disagree beyond 1e-10 on the same canonical quartet
/// are a symmetry conflict.
inline FcidumpData parse_fcidump(std::istream& is) {
  std::string header, line;
  bool have_end = false;
  while (std::getline(is, line)) {
    header += line + " ";
    if (line.find("&END") != std::string::npos ||
        line.find("/") != std::string::npos) {
      have_end = true;
      break;
    }
  }
  require(have_end, "FCIDUMP: header not terminated by &END");
  require(header.find("&FCI") != std::string::npos, "FCIDUMP: missing &FCI");

  FcidumpData fd;
  const int n = detail::parse_header_int(header, "NORB");
  require(n > 0 && n <= 64, "FCIDUMP: NORB out of range");
  fd.n_electrons = detail::parse_header_int(header, "NELEC");
  fd.ms2 = detail::parse_header_int(header, "MS2");
  fd.ints.n_orbitals = n;
  fd.ints.h = Mat::Zero(n, n);
  fd.ints.v = Tensor4(n);

  std::map<std::array<int, 4>, double> seen2;
  std::map<std::array<int, 2>, double> seen1;
  while (std::getline(is, line)) {
    std::istringstream ss(line);
    double v;
    int i, j, k, l;
    if (!(ss >> v >> i >> j >> k >> l)) {
      // blank or trailing junk lines are ignored, anything else is malformed
      std::string rest;
      std::istringstream probe(line);
      if (probe >> rest) throw Error("FCIDUMP: malformed line: " + line);
      continue;
    }
    require(i >= 0 && j >= 0 && k >= 0 && l >= 0 && i <= n && j <= n && k <= n && l <= n,
            "FCIDUMP: index out of range in line: " + line);
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      fd.ints.e_nuclear = v;
    } else if (k == 0 && l == 0) {
      require(i >= 1 && j >= 1, "FCIDUMP: bad one-body indices: " + line);
      std::array<int, 2> key{std::max(i, j), std::min(i, j)};
      auto it = seen1.find(key);
      if (it != seen1.end() && std::abs(it->second - v) > 1e-10)
        throw Error("FCIDUMP: symmetry conflict on one-body entry " + line);
      seen1[key] = v;
      fd.ints.h(i - 1, j - 1) = v;
      fd.ints.h(j - 1, i - 1) = v;
    } else {
      require(i >= 1 && j >= 1 && k >= 1 && l >= 1,
              "FCIDUMP: bad two-body indices: " + line);
      auto key = detail::canonical_quartet(i - 1, j - 1, k - 1, l - 1);
      auto it = seen2.find(key);
      if (it != seen2.end() && std::abs(it->second - v) > 1e-10)
        throw Error("FCIDUMP: symmetry conflict on two-body entry " + line);
      seen2[key] = v;
      fd.ints.v.set_symmetric(i - 1, j - 1, k - 1, l - 1, v);
    }
  }
  return fd;
}

inline FcidumpData parse_fcidump_string(const std::string& text) {
  std::istringstream is(text);
  return parse_fcidump(is);
}

inline FcidumpData load_fcidump(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open FCIDUMP file: " + path);
  return parse_fcidump(in);
}

}  // namespace qcaf
