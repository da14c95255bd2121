#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace roodbench {

/// 64-bit FNV-1a over a byte string.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/// Per-sample seed for one (sample, transform, severity) cell.
///
/// FNV-1a over the '|'-joined decimal/UTF-8 fields, so regenerating any
/// subset of a benchmark reproduces the exact same streams regardless of
/// processing order.
inline std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view sample_id,
                                 std::string_view kind_name, int severity) {
  std::string key = std::to_string(global_seed);
  key += '|';
  key += sample_id;
  key += '|';
  key += kind_name;
  key += '|';
  key += std::to_string(severity);
  return fnv1a64(key);
}

/// Deterministic random stream with portable output.
///
/// mt19937_64 has a fully specified sequence; the uniform and normal
/// draws below avoid std::*_distribution, whose output is
/// implementation-defined, so identical seeds give identical volumes on
/// every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    // rejection sampling on the top of the range
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  /// Zero-mean Gaussian via Box-Muller.
  double normal(double sigma) {
    if (have_spare_) {
      have_spare_ = false;
      return spare_ * sigma;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double two_pi_u2 = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(two_pi_u2);
    have_spare_ = true;
    return r * std::cos(two_pi_u2) * sigma;
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace roodbench
