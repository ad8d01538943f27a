#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qseqlab {

// Thrown when an enumeration or table would exceed a configured resource cap.
// The CLI maps this to its own exit code, distinct from bad input.
class CapError : public std::runtime_error {
 public:
  explicit CapError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by the sequence-spec JSON reader; message carries the failing path.
class SpecParseError : public std::runtime_error {
 public:
  explicit SpecParseError(const std::string& what) : std::runtime_error(what) {}
};

// Counter-based 64-bit generator (splitmix64 finalizer over seed ^ counter).
// Draw i is a pure function of (seed, i), so parallel consumers can index
// disjoint counter ranges and still reproduce the single-threaded stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t at(std::uint64_t counter) const {
    std::uint64_t z = seed_ + counter * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() { return at(counter_++); }

  // Uniform in [0,1), 53 random bits.
  double next_unit() { return (next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n) without modulo bias.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below: n must be positive");
    if ((n & (n - 1)) == 0) return next() & (n - 1);
    std::uint64_t limit = ~0ULL - ((~0ULL % n) + 1) % n;
    std::uint64_t x = next();
    while (x > limit) x = next();
    return x % n;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace qseqlab
