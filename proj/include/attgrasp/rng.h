#ifndef ATTGRASP_RNG_H_
#define ATTGRASP_RNG_H_

#include <cmath>
#include <cstdint>
#include <vector>

namespace attgrasp {

// splitmix64; used for seed mixing so derived streams are decorrelated.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic RNG with self-contained distributions. std::mt19937_64 is
// pinned by the standard, but the <random> distributions are not; uniform and
// normal are implemented here so identical seeds give identical streams on
// any toolchain.
class Rng {
 public:
  explicit Rng(uint64_t seed) : s_(mix64(seed ^ 0x6a09e667f3bcc908ULL)) {}

  uint64_t next_u64() {
    // xoshiro-style output over splitmix state walk: simple and adequate.
    s_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = s_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi], both inclusive.
  int uniform_int(int lo, int hi) {
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

  // Standard normal via Box-Muller (cached pair).
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  double normal(double mu, double sigma) { return mu + sigma * normal(); }

  bool coin(double p) { return uniform() < p; }

  // Independent derived stream; `stream` tags the purpose.
  Rng fork(uint64_t stream) const { return Rng(mix64(s_ ^ mix64(stream))); }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = next_u64() % i;
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t s_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace attgrasp

#endif  // ATTGRASP_RNG_H_
