// Copyright (C) 2026 the crowdagg authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <utility>
#include <vector>

namespace crowdagg::rng {

// All randomness goes through this header so outputs are reproducible from
// the task seed alone -- std::hash and std::uniform_int_distribution are
// implementation-defined and must not leak into results.

constexpr std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Stream {
  public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return splitmix64(state_); }

    // Unbiased draw in [0, n); n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / n * n;
        for (;;) {
            std::uint64_t x = next();
            if (x < limit) return x % n;
        }
    }

    // Uniform in [0, 1) with 53 bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

  private:
    std::uint64_t state_;
};

// Independent substream keyed by purpose and entity. Deriving draws from
// (seed, tag, key) instead of one shared sequential generator keeps results
// identical no matter in which order units are processed.
inline Stream substream(std::uint64_t seed, std::string_view tag, std::string_view key = {}) {
    std::uint64_t h = fnv1a(tag);
    h = fnv1a(key, h ^ 0x9e3779b97f4a7c15ull);
    return Stream(seed ^ h);
}

template <typename T>
void shuffle(std::vector<T>& v, Stream& s) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::swap(v[i - 1], v[s.below(i)]);
    }
}

}  // namespace crowdagg::rng
