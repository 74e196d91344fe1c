// Copyright 2026 The haflab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace haflab {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer applied to (root, index): replicate `index` of a run seeded with `root`
/// always gets the same stream, independent of how replicates are scheduled.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) noexcept {
    std::uint64_t z = root + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

[[nodiscard]] inline Rng stream(std::uint64_t root, std::uint64_t index) {
    return Rng(derive_seed(root, index));
}

}  // namespace haflab
