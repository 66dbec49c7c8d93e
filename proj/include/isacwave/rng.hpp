// SPDX-License-Identifier: Apache-2.0
//
// rng.hpp - deterministic, platform-independent random number helpers.
//
// std::uniform_real_distribution is not bit-reproducible across standard
// library implementations, so everything that must be replayable (phase
// initialization, test fixtures, per-cell seed derivation) goes through
// this splitmix64 generator instead.

#pragma once

#include <cstdint>

namespace isacwave {

class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    uint64_t state_;
};

// Counter-based seed derivation: parallel and serial schedules hand the
// same (master, stream, counter) triple to each job, so results match.
inline uint64_t derive_seed(uint64_t master, uint64_t stream, uint64_t counter = 0) {
    SplitMix64 g(master ^ (0xA24BAED4963EE407ULL * (stream + 1)) ^
                 (0x9FB21C651E98DF25ULL * (counter + 1)));
    return g.next_u64();
}

} // namespace isacwave
