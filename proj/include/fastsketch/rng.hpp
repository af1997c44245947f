#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace fastsketch {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// 64-bit FNV-1a over the bytes of `s`.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Child seed for (master, trial, purpose). The mix is
///   splitmix64(splitmix64(splitmix64(master) ^ fnv1a64(purpose)) ^ trial)
/// and depends only on 64-bit integer arithmetic, so it is identical on every platform.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                                    std::string_view purpose) noexcept {
    return splitmix64(splitmix64(splitmix64(master) ^ fnv1a64(purpose)) ^ trial);
}

/// Seeded stream over std::mt19937_64, whose output sequence is fixed by the C++ standard.
/// The distributions below are implemented here rather than through <random> distributions,
/// whose algorithms are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, n) by rejection sampling; n must be positive.
    std::uint64_t uniform_index(std::uint64_t n);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Rademacher variable: +1 or -1 with equal probability.
    int sign() { return (engine_() >> 63) ? -1 : 1; }

    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal();

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

}  // namespace fastsketch
