#pragma once

#include <cmath>
#include <cstdint>

namespace qcaf {

/// Philox4x32-10 counter-based generator. Streams are keyed by
/// (master seed, lineage id); draws advance a private counter, so the
/// sequence is independent of thread scheduling and ensemble order.
class PhiloxStream {
 public:
  PhiloxStream() = default;
  PhiloxStream(std::uint64_t master_seed, std::uint64_t lineage)
      : key0_(static_cast<std::uint32_t>(master_seed)),
        key1_(static_cast<std::uint32_t>(master_seed >> 32)),
        ctr2_(static_cast<std::uint32_t>(lineage)),
        ctr3_(static_cast<std::uint32_t>(lineage >> 32)) {}

  /// uniform in (0,1)
  double uniform() {
    if (have_ == 0) refill();
    std::uint32_t v = out_[--have_];
    return (static_cast<double>(v) + 0.5) * (1.0 / 4294967296.0);
  }

  /// standard normal (Box-Muller)
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

 private:
  static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t* hi,
                      std::uint32_t* lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    *hi = static_cast<std::uint32_t>(p >> 32);
    *lo = static_cast<std::uint32_t>(p);
  }

  void refill() {
    std::uint32_t c0 = static_cast<std::uint32_t>(block_);
    std::uint32_t c1 = static_cast<std::uint32_t>(block_ >> 32);
    std::uint32_t c2 = ctr2_, c3 = ctr3_;
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      std::uint32_t hi0, lo0, hi1, lo1;
      mulhilo(0xD2511F53u, c0, &hi0, &lo0);
      mulhilo(0xCD9E8D57u, c2, &hi1, &lo1);
      std::uint32_t n0 = hi1 ^ c1 ^ k0;
      std::uint32_t n1 = lo1;
      std::uint32_t n2 = hi0 ^ c3 ^ k1;
      std::uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    out_[0] = c0;
    out_[1] = c1;
    out_[2] = c2;
    out_[3] = c3;
    have_ = 4;
    ++block_;
  }

  std::uint32_t key0_ = 0, key1_ = 0;
  std::uint32_t ctr2_ = 0, ctr3_ = 0;  // lineage occupies the top counter half
  std::uint64_t block_ = 0;
  std::uint32_t out_[4] = {0, 0, 0, 0};
  int have_ = 0;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace qcaf
