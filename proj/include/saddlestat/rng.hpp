#pragma once

// Counter-based substream RNG: stream index = Monte Carlo sample index, so a
// draw depends only on (seed, sample index), never on thread scheduling.

#include <cstdint>
#include <limits>
#include <random>

namespace saddlestat {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// xoshiro256++ seeded from (seed, stream) through splitmix64.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  Xoshiro256(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t h = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    for (auto& w : s_) {
      h = splitmix64(h);
      w = h;
    }
    s_[0] |= 1;  // never the all-zero state
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
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

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

// Per-sample generator for one substream plus the standard scalar draws.
class SampleRng {
 public:
  SampleRng(std::uint64_t seed, std::uint64_t stream) : eng_(seed, stream) {}

  double normal(double mean = 0.0, double sd = 1.0) {
    std::normal_distribution<double> d(mean, sd);
    return d(eng_);
  }

  // chi-distributed draw with dof degrees of freedom, chi = sqrt(chi^2_dof)
  double chi(double dof) {
    std::gamma_distribution<double> g(0.5 * dof, 2.0);
    double v = g(eng_);
    return v > 0.0 ? std::sqrt(v) : 0.0;
  }

  double uniform() {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(eng_);
  }

  Xoshiro256& engine() { return eng_; }

 private:
  Xoshiro256 eng_;
};

}  // namespace saddlestat
