#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hospsim {

using Rng = std::mt19937_64;

// 53-bit uniform on [0, 1).
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

// Unbiased uniform integer on [0, n). n must be > 0.
std::size_t uniform_index(Rng& rng, std::size_t n);

// Draws an index with probability proportional to weights[i]; throws DomainError when
// every weight is zero.
std::size_t weighted_index(std::span<const double> weights, Rng& rng);

template <class T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

std::uint64_t fnv1a(std::string_view text, std::uint64_t hash = 0xcbf29ce484222325ULL);

// One independent generator per named purpose, all derived from the master seed, so
// draws in one subsystem never perturb another.
class RngStreams {
 public:
  explicit RngStreams(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  Rng& operator[](const std::string& name);

 private:
  std::uint64_t seed_;
  std::map<std::string, Rng, std::less<>> streams_;
};

Rng make_stream(std::uint64_t seed, std::string_view name);

// Splits total into integer parts proportional to weights (largest remainder). All zeros
// when the weights sum to zero.
std::vector<long long> apportion(long long total, const std::vector<double>& weights);

}  // namespace hospsim
