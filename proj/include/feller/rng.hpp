#ifndef FELLER_RNG_HPP
#define FELLER_RNG_HPP

#include <cmath>
#include <cstdint>

namespace feller {

// xoshiro256++ with splitmix64 seeding. Each path gets its own stream derived
// from (seed, path index), so path i is reproducible regardless of how many
// paths run before it or in what order results are reduced.
class Rng {
 public:
  static Rng for_path(std::uint64_t seed, std::uint64_t path_index) {
    Rng r;
    std::uint64_t z = seed ^ (path_index * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL);
    for (auto& s : r.s_) s = splitmix64(z);
    if ((r.s_[0] | r.s_[1] | r.s_[2] | r.s_[3]) == 0) r.s_[0] = 0x1ULL;
    return r;
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform on (0,1); never returns 0 so -log(u) is finite
  double uniform() {
    double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
  }

  double exponential(double mean) { return -mean * std::log(uniform()); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  static std::uint64_t splitmix64(std::uint64_t& z) {
    z += 0x9E3779B97F4A7C15ULL;
    std::uint64_t r = z;
    r = (r ^ (r >> 30)) * 0xBF58476D1CE4E5B9ULL;
    r = (r ^ (r >> 27)) * 0x94D049BB133111EBULL;
    return r ^ (r >> 31);
  }
  std::uint64_t s_[4]{};
};

// Order-independent pairwise reduction of per-item statistics.
struct RunningMoments {
  double sum = 0.0, sumsq = 0.0;
  std::uint64_t n = 0;
  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++n;
  }
  void merge(const RunningMoments& o) {
    sum += o.sum;
    sumsq += o.sumsq;
    n += o.n;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double stderr_mean() const {
    if (n < 2) return 0.0;
    double nn = static_cast<double>(n);
    double var = (sumsq - sum * sum / nn) / (nn - 1.0);
    if (var < 0.0) var = 0.0;
    return std::sqrt(var / nn);
  }
};

}  // namespace feller

#endif
