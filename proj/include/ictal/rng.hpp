#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace ictal {

// SplitMix64 (Steele, Lea & Flood, OOPSLA 2014): 64-bit state, period 2^64.
// All randomness in the library flows through this generator so that seeded
// runs and fixtures reproduce bit-exactly across platforms; Gaussian draws
// use Box-Muller on top of it.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // SplitMix64 finalizer. Also the documented hash used to derive per-signal
  // and per-fold sub-seeds (seed ^ mix(index)).
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal. Box-Muller produces variates in pairs; the second one
  // is cached and returned by the next call.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 =
        static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  return base ^ Rng::mix(tag);
}

// Fisher-Yates driven by Rng::below; deterministic for a fixed stream.
template <typename Container>
void shuffle(Container& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace ictal
