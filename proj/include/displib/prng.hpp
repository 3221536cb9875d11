#pragma once

#include <cstdint>

namespace displib {

// Deterministic splitmix64 generator. Reports promise byte-identical output
// for a fixed seed across platforms, so no std:: distributions anywhere.
class Prng {
 public:
  explicit Prng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n); n = 0 returns 0.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    return next() % n;
  }

  Prng fork() { return Prng(next() ^ 0xa5a5a5a5a5a5a5a5ULL); }

 private:
  std::uint64_t state_;
};

}  // namespace displib
