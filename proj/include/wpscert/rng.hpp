#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string_view>

namespace wpscert {

// Deterministic pseudo-random stream.  mt19937_64 output is fixed by the
// standard, and rejection sampling below avoids std::uniform_int_distribution,
// whose output is implementation-defined.  Same seed, same platform-independent
// stream.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform draw from [0, n).  Unbiased via rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t rem = (max % n + 1) % n;  // 2^64 mod n
    std::uint64_t r = next();
    if (rem != 0) {
      const std::uint64_t bound = max - rem + 1;  // accept r < bound
      while (r >= bound) r = next();
    }
    return r % n;
  }

  // Independent stream for a named sub-task of a seeded run.
  static std::uint64_t derive(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = 14695981039346656037ULL ^ seed;
    for (unsigned char c : tag) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return h;
  }

private:
  std::mt19937_64 eng_;
};

}
