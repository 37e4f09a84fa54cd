#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace epiwalk {

// splitmix64; used both as a seed scrambler and as the documented
// per-run seed derivation scheme (hash of base seed + stream labels).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t seed_combine(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t seed_combine(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return seed_combine(seed, h);
}

// mt19937_64 wrapper with platform-independent double generation
// (std::uniform_real_distribution is implementation-defined).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // rejection sampling, unbiased
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % n;
  }

  std::mt19937_64& raw() { return gen_; }

private:
  std::mt19937_64 gen_;
};

}  // namespace epiwalk
