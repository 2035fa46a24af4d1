#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace geoform {

/// SplitMix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic sub-seed for stream `stream` of `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

/// Seeded generator with platform-independent draws. The standard
/// distributions are implementation-defined, so draws are derived from the
/// raw 64-bit engine output directly.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : m_seed(seed), m_engine(seed) {}

    std::uint64_t seed() const noexcept { return m_seed; }

    std::uint64_t next() { return m_engine(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(m_engine() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    std::size_t index(std::size_t n) {
        auto const bound = static_cast<std::uint64_t>(n);
        auto const limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x = m_engine();
        while (x >= limit) {
            x = m_engine();
        }
        return static_cast<std::size_t>(x % bound);
    }

    /// Independent generator for a named sub-task.
    Rng split(std::uint64_t stream) const { return Rng(derive_seed(m_seed, stream)); }

  private:
    std::uint64_t m_seed;
    std::mt19937_64 m_engine;
};

}  // namespace geoform
