#pragma once

#include <cstdint>
#include <random>

namespace binfam {

// Deterministic 64-bit-seeded random stream. All variate generation is
// implemented on top of raw mt19937_64 output so that identical seeds give
// identical draws regardless of standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform draw strictly inside (0,1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal();

  // Poisson count; exact inversion by uniform products, chunked so the
  // method stays stable for large rates.
  long poisson(double rate);

 private:
  std::mt19937_64 gen_;
};

}  // namespace binfam
