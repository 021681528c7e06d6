#pragma once

#include <cmath>

#include "qcaf/afqmc.hpp"

namespace qcaf {

struct BlockRow {
  int block_size = 1;      // samples per block (power of two)
  int n_blocks = 0;
  double mean = 0.0;       // weighted mean over blocks
  double std_error = 0.0;
};

struct BlockStats {
  std::vector<BlockRow> rows;
  int plateau_block_size = 1;
  bool plateau_reached = false;
  double tau_int = 1.0;  // variance inflation (sigma_plateau / sigma_1)^2
  double mean = 0.0;
  double error = 0.0;
  std::size_t n_samples_used = 0;
};

/// Reblocking of a weighted, autocorrelated energy series. The burn-in
/// fraction of the projection time is discarded; block sizes double until
/// successive error estimates agree within 5% (the plateau).
inline BlockStats reblock(const EnergySeries& series, double burn_in_fraction = 0.25) {
  const std::size_t total = series.samples.size();
  std::size_t skip = static_cast<std::size_t>(std::floor(total * burn_in_fraction));
  require(total >= skip + 32,
          "reblock: fewer than 32 post-burn-in samples; run a longer projection");

  std::vector<double> w, e;
  for (std::size_t i = skip; i < total; ++i) {
    w.push_back(series.samples[i].total_weight);
    e.push_back(series.samples[i].e_block);
  }
  const std::size_t n = w.size();

  BlockStats out;
  out.n_samples_used = n;
  for (int bs = 1;; bs *= 2) {
    std::size_t nb = n / bs;
    if (nb < 2) break;
    // weighted block values
    std::vector<double> bw(nb), bv(nb);
    for (std::size_t j = 0; j < nb; ++j) {
      double ws = 0.0, es = 0.0;
      for (int k = 0; k < bs; ++k) {
        ws += w[j * bs + k];
        es += w[j * bs + k] * e[j * bs + k];
      }
      bw[j] = ws;
      bv[j] = es / ws;
    }
    double wtot = 0.0, mean = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      wtot += bw[j];
      mean += bw[j] * bv[j];
    }
    mean /= wtot;
    double var = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      double f = bw[j] / wtot;
      var += f * f * (bv[j] - mean) * (bv[j] - mean);
    }
    var *= static_cast<double>(nb) / (nb - 1);
    BlockRow row;
    row.block_size = bs;
    row.n_blocks = static_cast<int>(nb);
    row.mean = mean;
    row.std_error = std::sqrt(var);
    out.rows.push_back(row);
    if (nb < 8) break;  // error estimates below ~8 blocks are unreliable
  }
  require(!out.rows.empty(), "reblock: series too short");

  // plateau: first size where the next error differs by < 5%
  std::size_t plateau_idx = out.rows.size() - 1;
  out.plateau_reached = false;
  for (std::size_t i = 0; i + 1 < out.rows.size(); ++i) {
    double a = out.rows[i].std_error, b = out.rows[i + 1].std_error;
    if (b <= 0 || std::abs(b - a) / std::max(b, 1e-300) < 0.05) {
      plateau_idx = i + (b > 0 && std::abs(b - a) / b < 0.05 ? 1 : 0);
      out.plateau_reached = true;
      break;
    }
  }
  if (!out.plateau_reached)
    std::fprintf(stderr,
                 "reblock: no error plateau reached; reporting the largest "
                 "block size (%d)\n",
                 out.rows[plateau_idx].block_size);
  out.plateau_block_size = out.rows[plateau_idx].block_size;
  out.mean = out.rows[plateau_idx].mean;
  out.error = out.rows[plateau_idx].std_error;
  double se1 = out.rows.front().std_error;
  out.tau_int = se1 > 0 ? (out.error / se1) * (out.error / se1) : 1.0;
  return out;
}

struct MixedEstimate {
  double energy = 0.0;
  double error = 0.0;
  double tau_int = 1.0;
  int n_blocks = 0;
  bool plateau_reached = false;
};

/// Final mixed-estimator value with its autocorrelation-aware error bar.
inline MixedEstimate mixed_estimator(const EnergySeries& series,
                                     double burn_in_fraction = 0.25) {
  BlockStats bs = reblock(series, burn_in_fraction);
  MixedEstimate out;
  out.energy = bs.mean;
  out.error = bs.error;
  out.tau_int = bs.tau_int;
  out.plateau_reached = bs.plateau_reached;
  for (const auto& r : bs.rows)
    if (r.block_size == bs.plateau_block_size) out.n_blocks = r.n_blocks;
  return out;
}

// CSV interchange for the energy stream: header then "tau,total_weight,e_block".
inline void write_energy_csv(std::ostream& os, const EnergySeries& s) {
  os << "tau,total_weight,e_block\n";
  char buf[128];
  for (const auto& r : s.samples) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.12e,%.12e\n", r.tau, r.total_weight,
                  r.e_block);
    os << buf;
  }
}

inline EnergySeries read_energy_csv(std::istream& is) {
  EnergySeries s;
  std::string line;
  std::getline(is, line);
  require(line.rfind("tau,", 0) == 0, "energy CSV: missing header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    EnergySample r;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r.tau, &r.total_weight,
                    &r.e_block) != 3)
      throw Error("energy CSV: malformed row: " + line);
    s.samples.push_back(r);
  }
  return s;
}

}  // namespace qcaf
