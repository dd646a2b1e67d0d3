#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace clbench {

/// Seeded random stream. A single root seed fans out into named sub-streams
/// (rng.stream("noise"), rng.stream("ranks")) so independent consumers never
/// share state and runs stay reproducible end to end. Uniform and normal
/// variates are mapped from raw 64-bit draws by fixed arithmetic rather than
/// std::*_distribution, which keeps byte-identical output across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix(seed)) {}

  Rng stream(std::string_view name) const {
    // FNV-1a over the name, mixed with this stream's seed.
    std::uint64_t h = 14695981039346656037ull;
    for (char ch : name) {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ull;
    }
    return Rng(splitmix(seed_ ^ h));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace clbench
