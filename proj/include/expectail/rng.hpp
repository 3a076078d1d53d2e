#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace expectail {

/// Identifies one reproducible substream of the global random sequence.
/// Equal (seed, replicate_index) pairs yield bit-identical draws no matter
/// how work is scheduled across threads.
struct SeededStream {
  std::uint64_t seed = 0;
  std::uint64_t replicate_index = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Substream generator: mt19937_64 seeded by a splitmix64 hash of
/// (seed, replicate_index). The mt19937_64 output sequence is fixed by the
/// standard, so draws are platform-independent. Variates are produced by
/// explicit inverse-transform / Box-Muller recipes rather than the
/// implementation-defined std distributions.
class SubstreamRng {
 public:
  explicit SubstreamRng(SeededStream stream) {
    // Hash the seed first, then fold the replicate index into the avalanched
    // value and hash again. Mixing the raw index with the raw seed would let
    // nearby seeds share substreams (seed s, replicate m colliding with seed
    // s+1, replicate m^1), making studies under adjacent seeds overlap.
    std::uint64_t state = stream.seed;
    std::uint64_t mixed = detail::splitmix64(state);
    state = mixed ^ stream.replicate_index;
    engine_.seed(detail::splitmix64(state));
  }

  /// Uniform draw on the open interval (0,1), 53-bit resolution.
  double uniform01() {
    for (;;) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  /// Standard normal draw (Box-Muller, second variate cached).
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  static constexpr const char* algorithm() { return "mt19937_64/splitmix64-substream"; }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace expectail
