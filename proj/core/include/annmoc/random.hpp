#pragma once

#include <cstdint>
#include <random>

namespace annmoc {

/// Seeded 64-bit Mersenne Twister with a library-independent uniform
/// transform, so the same seed gives the same doubles on every platform.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t next() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

/// Decorrelates sub-stream seeds derived from one user seed (SplitMix64).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace annmoc
