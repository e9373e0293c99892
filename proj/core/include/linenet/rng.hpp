#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

#include "linenet/geometry.hpp"

namespace linenet {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Folds a tuple of words into one stream key. Order matters.
constexpr std::uint64_t derive_key(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t w : words) {
    h = mix64(h ^ mix64(w + 0x9e3779b97f4a7c15ULL));
  }
  return h;
}

// Counter-based generator: output n is mix64(key + n * golden). Two streams
// with different keys are independent for all practical purposes, and the
// output at a given position never depends on how many other streams exist.
// Satisfies UniformRandomBitGenerator so std distributions can draw from it.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform on (0, 1], 53-bit resolution.
  double uniform_open_closed() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }
  // Uniform on [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double normal();
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Uniform point on S^{d-1}.
Vec random_unit_vector(Stream& rng, int d);
// Uniform point in the k-ball of the given radius (direction + radius^(1/k) method).
Vec random_in_ball(Stream& rng, int k, double radius);

}  // namespace linenet
