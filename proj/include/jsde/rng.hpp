// SPDX-License-Identifier: MIT
#pragma once
//
// Counter-based random number generation for reproducible parallel Monte Carlo.
//
// The generator is Philox4x32-10. A draw is addressed, not sequenced: the
// 128-bit counter encodes (step, slot, stream) and the 64-bit key is the user
// seed, so any (seed, stream, step, slot) tuple maps to the same output no
// matter which thread asks for it, or in which order. Streams are intended to
// be path indices; slots separate the per-step consumers (Brownian dimensions,
// Poisson chunks) within one path.

#include <array>
#include <cstdint>

namespace jsde {

// Identifies one independent random stream. Two sources with equal
// (seed, stream_id) produce identical sequences; distinct stream_id values
// give statistically independent streams.
struct RandomSource {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

namespace detail {

// One Philox4x32-10 block: 4x32-bit counter, 2x32-bit key, 10 rounds.
// Constants are the standard Philox multipliers and Weyl increments.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept;

}  // namespace detail

// Addressed draws for one stream. Stateless between calls: every method is a
// pure function of (source, step, slot arguments), which is what makes the
// increment generators order- and thread-insensitive.
class CounterRng {
  public:
    explicit CounterRng(RandomSource source) noexcept : src_(source) {}

    // Standard normal draw for (step, dim), dim < 65536. Box-Muller on two
    // 53-bit uniforms from one Philox block; the sine partner is discarded so
    // each (step, dim) address yields exactly one normal.
    double normal(std::uint64_t step, std::uint32_t dim) const noexcept;

    // Uniform in (0,1] from the block at (step, slot). 53-bit resolution,
    // never exactly zero so it is safe under a logarithm.
    double uniform(std::uint64_t step, std::uint32_t slot) const noexcept;

    // Poisson(mean) count for the given step. Inversion by sequential search
    // for mean <= 10; larger means are split additively into chunks of mean
    // <= 10, one uniform per chunk. mean > 1e6 is rejected by the callers
    // before reaching here (see increments.hpp).
    std::uint64_t poisson(std::uint64_t step, double mean) const noexcept;

  private:
    RandomSource src_;
};

}  // namespace jsde
