#pragma once

#include <cmath>
#include <cstdint>

namespace csgd::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// splitmix64 finalizer: bijective 64-bit mixer with full avalanche.
constexpr std::uint64_t finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// One splitmix64 output for the given state value.
constexpr std::uint64_t mix64(std::uint64_t x) { return finalize(x + kGolden); }

// Logical stream families. Keeping every consumer in its own family makes
// draws independent across uses of the same user-facing seed.
enum class Purpose : std::uint64_t {
  minimizer = 1,    // synthetic minimizer generation
  sample = 2,       // per-draw stochastic gradients
  dataset = 3,      // synthetic dataset generation
  constants = 4,    // Monte-Carlo constant estimation
  start_point = 5,  // randomized start points
  probe = 6,        // test probes
  partition = 7,    // dataset-to-worker shuffling
};

// Deterministic key for a (seed, purpose, coordinates) tuple.
constexpr std::uint64_t stream_key(std::uint64_t seed, Purpose purpose,
                                   std::uint64_t a = 0, std::uint64_t b = 0,
                                   std::uint64_t c = 0) {
  std::uint64_t k = mix64(seed);
  k = mix64(k ^ static_cast<std::uint64_t>(purpose));
  k = mix64(k ^ a);
  k = mix64(k ^ b);
  k = mix64(k ^ c);
  return k;
}

// Counter-based splitmix64 stream. Construction costs a few integer mixes,
// so the intended usage is one throwaway stream per logical draw site.
// std::mt19937 + std::normal_distribution are avoided on purpose: the
// standard distributions are implementation-defined, which would break the
// reproducibility contract across toolchains.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() { return finalize(state_ += kGolden); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), n > 0. Multiply-shift map; the bias of
  // roughly n/2^64 is irrelevant at simulation scales and keeps the
  // consumption of stream values fixed at one per call.
  std::uint64_t uniform_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via the Marsaglia polar method with a cached spare.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace csgd::rng
