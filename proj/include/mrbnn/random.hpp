// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace mrbnn {

// Counter-based generators: every draw is a pure function of (seed, index),
// so results never depend on evaluation order or thread count.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_draw(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Uniform in (0, 1].
inline double uniform_open0(std::uint64_t seed, std::uint64_t index) noexcept {
    return (static_cast<double>(hash_draw(seed, index) >> 11) + 1.0) * 0x1.0p-53;
}

/// Uniform in [0, 1).
inline double uniform01(std::uint64_t seed, std::uint64_t index) noexcept {
    return static_cast<double>(hash_draw(seed, index) >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on draws 2*index and 2*index+1.
inline double standard_normal(std::uint64_t seed, std::uint64_t index) noexcept {
    const double u1 = uniform_open0(seed, 2 * index);
    const double u2 = uniform01(seed, 2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Derive an independent stream seed from a parent seed and a label.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t label) noexcept {
    return splitmix64(parent ^ splitmix64(label ^ 0xd1b54a32d192ed03ULL));
}

} // namespace mrbnn
