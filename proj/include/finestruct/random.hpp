#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace finestruct {

// Pinned generator: std::mt19937_64 is bit-specified by the standard, but the
// std distributions are not, so the variate transforms below are our own.
inline constexpr std::string_view kRngName = "mt19937_64+splitmix64-streams";

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent substream seed for (seed, index), e.g. one per MC replicate.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

// FNV-1a; stable across platforms, used to give every feature its own stream.
constexpr std::uint64_t stable_hash(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1).
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  double uniform(double low, double high) { return low + (high - low) * uniform(); }

  // Uniform integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - bound + 1) % bound;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r < limit);
    return r % bound;
  }

  // Marsaglia polar method; the spare variate is kept.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  double exponential() { return -std::log(uniform_open()); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Sorted sample of n i.i.d. U(0,1) variates in O(n) via normalized exponential
// spacings (the order statistics of a uniform sample have this law).
inline std::vector<double> sorted_uniform_sample(std::size_t n, Rng& rng) {
  std::vector<double> out(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += rng.exponential();
    out[i] = total;
  }
  total += rng.exponential();
  for (double& v : out) v /= total;
  return out;
}

// Indices of a uniform sample of k out of n without replacement, ascending.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (k > n) k = n;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace finestruct
