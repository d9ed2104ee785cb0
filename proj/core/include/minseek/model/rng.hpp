// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace minseek {

/// SplitMix64 finalizer; a stateless 64-bit mixing function.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Uniform double in [0, 1) built from the top 53 bits.
constexpr double to_unit_double(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/**
 * Counter-based generator: the n-th draw of stream s under seed k is a pure
 * function of (k, s, n), so results do not depend on the standard library's
 * distribution implementations.
 */
class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept
        : m_key(mix64(seed ^ mix64(stream + 0x5851F42D4C957F2Dull))) {}

    constexpr std::uint64_t next_u64() noexcept { return mix64(m_key + mix64(m_counter++)); }

    constexpr double next_unit() noexcept { return to_unit_double(next_u64()); }

    /// Standard normal draw via Box-Muller (one value per two uniforms).
    double next_gaussian() noexcept {
        double u1 = next_unit();
        const double u2 = next_unit();
        if (u1 < 0x1.0p-60) {
            u1 = 0x1.0p-60;
        }
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    constexpr std::uint64_t counter() const noexcept { return m_counter; }

private:
    std::uint64_t m_key;
    std::uint64_t m_counter = 0;
};

}  // namespace minseek
