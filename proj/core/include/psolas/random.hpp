// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace psolas {

/// SplitMix64 finalizer. Used to derive independent seeds from a counter.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31U);
}

/// Seed of stream `index` derived from `master`.
///
/// Counter-based: the result depends only on (master, index), so trial k can
/// be replayed without generating trials 0..k-1.
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) noexcept
{
    return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/*!
 * Deterministic random stream owned by one trial.
 *
 * The engine is mt19937_64, whose output sequence is fixed by the standard.
 * All derived variates are computed here rather than through
 * <random> distributions so that outputs are identical across standard
 * library implementations.
 */
class RngStream
{
  public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    /// Independent child stream; does not advance this stream.
    RngStream split(std::uint64_t index) const { return RngStream(split_seed(seed_, index)); }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11U) * 0x1.0p-53; }

    /// True with probability p. p <= 0 and p >= 1 consume no randomness.
    bool bernoulli(double p)
    {
        if (p <= 0.0)
            return false;
        if (p >= 1.0)
            return true;
        return uniform() < p;
    }

    /// Uniform integer in [0, n). Requires n > 0.
    std::uint64_t uniform_index(std::uint64_t n)
    {
        // Reject the incomplete top bucket so the modulo is unbiased.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = engine_();
        while (x >= limit)
            x = engine_();
        return x % n;
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace psolas
