#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace mixnet {

// Counter-based pseudo-random numbers built on the splitmix64 finalizer.
// Every consumer of randomness (CV folds, node visit orders, bootstrap
// resampling, synthetic data in tests) draws from an explicitly keyed stream,
// so results are identical across platforms, thread counts and evaluation
// orders. Nothing here uses std::random_device, std::shuffle or
// std::*_distribution, whose outputs are implementation-defined.

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Value i of the stream identified by key.
inline std::uint64_t rng_at(std::uint64_t key, std::uint64_t i) {
  return mix64(key + (i + 1) * 0x9e3779b97f4a7c15ULL);
}

// Derives an independent stream key from a parent key and a salt.
inline std::uint64_t derive_key(std::uint64_t key, std::uint64_t salt) {
  return mix64(key ^ mix64(salt + 0xd6e8feb86659fd93ULL));
}

// Sequential view over one keyed stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next() { return rng_at(key_, n_++); }

  // Uniform integer in [0, n). n == 0 returns 0.
  std::uint64_t bounded(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; uses an open-interval uniform so the log
  // argument is never zero.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Fisher-Yates; deterministic for a given key and call sequence.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    shuffle(p);
    return p;
  }

 private:
  std::uint64_t key_;
  std::uint64_t n_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mixnet
