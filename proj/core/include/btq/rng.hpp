// SPDX-License-Identifier: Apache-2.0
//
// Deterministic seed derivation. Every Monte Carlo stream is keyed by a
// tuple (master seed, labels...) hashed through the SplitMix64 finalizer, so
// results never depend on scheduling or worker count.
#pragma once

#include <cstdint>
#include <initializer_list>

namespace btq {

/// SplitMix64 output function.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::int64_t> keys) noexcept {
    std::uint64_t h = mix64(master);
    for (const auto k : keys) h = mix64(h ^ mix64(static_cast<std::uint64_t>(k)));
    return h;
}

/// xoshiro256++ (Blackman and Vigna), state filled from SplitMix64 of the seed.
/// Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
public:
    using result_type = std::uint64_t;

    explicit constexpr Xoshiro256pp(std::uint64_t seed) noexcept {
        for (auto& word : state_) {
            seed += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = seed;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    constexpr result_type operator()() noexcept {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4]{};
};

/// Samples per independently seeded chunk. Part of the reproducibility
/// contract: changing it changes every Monte Carlo result.
inline constexpr std::int64_t kSamplesPerChunk = 4096;

}  // namespace btq
