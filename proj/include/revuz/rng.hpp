#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "revuz/types.hpp"

namespace revuz {

// Stateless splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a root seed and a tag path, e.g.
// derive_stream(seed, {replica}) or derive_stream(seed, {cell, replica}).
// Deterministic and independent of any threading layout.
inline std::uint64_t derive_stream(std::uint64_t root,
                                   std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = root;
  for (std::uint64_t tag : tags) {
    s = mix64(s + 0x9E3779B97F4A7C15ull * (tag + 1));
  }
  return mix64(s + 0x9E3779B97F4A7C15ull);
}

// mt19937_64 with hand-rolled variate transforms. The standard library's
// distributions are implementation-defined, which would break bit-level
// reproducibility of reports; the raw engine output sequence is not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on (0,1), never exactly 0 or 1.
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential(double rate) {
    if (!(rate > 0.0)) throw BadParameter("exponential needs rate > 0");
    return -std::log(uniform()) / rate;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace revuz
