#pragma once

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace lexlaw {

// Malformed or unusable input data. The CLI maps this family to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computation that cannot proceed on otherwise well-formed data: zero
// variance, degenerate ties, non-PSD correlation matrix, non-convergence.
// The CLI maps this family to exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic 64-bit generator (splitmix64 stream). Synthetic corpora and
// test fixtures must be byte-stable across standard libraries, so <random>
// engines and distributions are not used anywhere in this project.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * next_double(); }

  // Uniform integer in [lo, hi], inclusive, rejection-sampled (no modulo bias).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Standard normal via Box-Muller; caches the spare deviate.
  double normal();

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// FNV-1a 64-bit content hash (non-cryptographic; manifest integrity only).
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace lexlaw
