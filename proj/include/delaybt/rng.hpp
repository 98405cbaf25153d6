#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace dbt {

// splitmix64 (Steele/Lea/Flood); platform-independent stream.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double u64_to_unit(std::uint64_t x) {
  // (0,1]: avoids log(0) in Box-Muller
  return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

/// Counter-based standard normal keyed by (seed, path, term, step); independent
/// of evaluation order, so parallel path execution is schedule-independent.
inline double counter_normal(std::uint64_t seed, std::uint64_t path, std::uint64_t term,
                             std::uint64_t step) {
  std::uint64_t s = seed;
  s ^= splitmix64(path ^= 0xd6e8feb86659fd93ULL);
  s ^= splitmix64(term ^= 0xa5a5a5a5a5a5a5a5ULL);
  s ^= splitmix64(step ^= 0xc2b2ae3d27d4eb4fULL);
  const double u1 = u64_to_unit(splitmix64(s));
  const double u2 = u64_to_unit(splitmix64(s));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Sequential Gaussian/uniform stream for reproducible matrix generation.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : state_(seed ^ 0x6a09e667f3bcc909ULL) {}

  double uniform01() { return u64_to_unit(splitmix64(state_)); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dbt
