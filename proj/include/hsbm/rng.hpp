#pragma once

// Reproducible random streams.
//
// A stream is identified by a 64-bit master seed and a 64-bit key. The pair is
// mixed with SplitMix64 into a single seed for std::mt19937_64, whose output
// sequence is fixed by the C++ standard. The variate generators below are
// written out explicitly (the std:: distributions are implementation defined),
// so a given (seed, key) produces the same draws on every platform.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>

namespace hsbm {

inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Folds a list of integers into one stream key.
inline std::uint64_t stream_key(std::initializer_list<std::uint64_t> parts)
{
  std::uint64_t h = 0x6A09E667F3BCC909ULL;
  for (auto p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

class RngStream
{
public:
  static constexpr const char* kAlgorithm = "mt19937_64/splitmix64";

  RngStream(std::uint64_t seed, std::uint64_t key)
      : seed_(seed), key_(key), engine_(splitmix64(splitmix64(seed) ^ key))
  {
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t key() const { return key_; }

  /// Independent child stream; `sub` plays the role of a counter.
  RngStream split(std::uint64_t sub) const { return {seed_, stream_key({key_, sub})}; }

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), Lemire's multiply-and-reject.
  std::uint64_t below(std::uint64_t bound)
  {
    if (bound == 0) throw std::invalid_argument("RngStream::below: bound must be positive");
    unsigned __int128 prod = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(prod);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        prod = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(prod);
      }
    }
    return static_cast<std::uint64_t>(prod >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Binomial(trials, p) as a sum of Bernoulli draws. Trial counts here are
  /// interaction sizes, so the linear cost is irrelevant.
  int binomial(int trials, double p)
  {
    int hits = 0;
    for (int t = 0; t < trials; ++t) hits += bernoulli(p) ? 1 : 0;
    return hits;
  }

private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::mt19937_64 engine_;
};

} // namespace hsbm
