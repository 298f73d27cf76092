// SPDX-License-Identifier: MIT

#include "jsde/rng.hpp"

#include <cmath>

namespace jsde {

namespace detail {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;  // golden ratio
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;  // sqrt(3) - 1

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

}  // namespace detail

namespace {

// Packs (step, slot, stream) into the counter and runs one block.
inline std::array<std::uint32_t, 4> block_at(const RandomSource& src, std::uint64_t step,
                                             std::uint32_t slot) noexcept {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32), slot,
        static_cast<std::uint32_t>(src.stream_id)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(src.seed),
                                              static_cast<std::uint32_t>(src.seed >> 32)};
    // The upper stream half is folded into the key's upper word so all 64 bits
    // of stream_id participate; streams used here are path indices well below
    // 2^32, so this never collides in practice.
    return detail::philox4x32(
        ctr, {key[0], key[1] ^ static_cast<std::uint32_t>(src.stream_id >> 32)});
}

// 53-bit uniform in (0,1]: (x >> 11) + 1 over 2^53. Never zero.
inline double u53_pos(std::uint64_t x) noexcept {
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

// 53-bit uniform in [0,1).
inline double u53(std::uint64_t x) noexcept {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

inline std::uint64_t lo_hi(std::uint32_t lo, std::uint32_t hi) noexcept {
    return static_cast<std::uint64_t>(lo) | (static_cast<std::uint64_t>(hi) << 32);
}

// Poisson slots live above the Brownian-dimension slots.
constexpr std::uint32_t kPoissonSlotBase = 0x10000u;

// Inversion by sequential search for one Poisson(mean) draw from uniform u.
// Walks the CDF: p_k = e^-mean * mean^k / k!. The cap bounds the walk at
// mean + 12*sqrt(mean) + 60, beyond which the tail mass is < 1e-20.
std::uint64_t poisson_inversion(double u, double mean) noexcept {
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    const std::uint64_t cap =
        static_cast<std::uint64_t>(mean + 12.0 * std::sqrt(mean) + 60.0);
    while (u > cdf && k < cap) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

}  // namespace

double CounterRng::normal(std::uint64_t step, std::uint32_t dim) const noexcept {
    const auto b = block_at(src_, step, dim);
    const double u1 = u53_pos(lo_hi(b[0], b[1]));
    const double u2 = u53(lo_hi(b[2], b[3]));
    // Box-Muller: r*cos(2*pi*u2) with r = sqrt(-2 ln u1).
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

double CounterRng::uniform(std::uint64_t step, std::uint32_t slot) const noexcept {
    const auto b = block_at(src_, step, slot);
    return u53_pos(lo_hi(b[0], b[1]));
}

std::uint64_t CounterRng::poisson(std::uint64_t step, double mean) const noexcept {
    if (mean <= 0.0) {
        return 0;
    }
    if (mean <= 10.0) {
        return poisson_inversion(uniform(step, kPoissonSlotBase), mean);
    }
    // Additive split: Poisson(m1) + Poisson(m2) = Poisson(m1+m2) for
    // independent summands, so chunks of mean <= 10 keep the inversion walk
    // short while preserving the exact law.
    const auto chunks = static_cast<std::uint32_t>(std::ceil(mean / 10.0));
    const double chunk_mean = mean / static_cast<double>(chunks);
    std::uint64_t total = 0;
    for (std::uint32_t k = 0; k < chunks; ++k) {
        total += poisson_inversion(uniform(step, kPoissonSlotBase + k), chunk_mean);
    }
    return total;
}

}  // namespace jsde
