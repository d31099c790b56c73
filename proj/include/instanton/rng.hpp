#pragma once

#include <cstdint>

namespace instanton {

// SplitMix64. Deterministic across platforms, one explicit seed per run;
// sub-streams are forked with a tag so independent draws never share state.
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // unbiased draw in [0, n)
    uint64_t below(uint64_t n) {
        uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            uint64_t v = next();
            if (v >= threshold) return v % n;
        }
    }

    // inclusive range
    int64_t int_in(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo + 1)));
    }

    Rng fork(uint64_t tag) {
        uint64_t z = next() ^ (tag * 0xd6e8feb86659fd93ULL + 0xa5a5a5a5a5a5a5a5ULL);
        return Rng(z);
    }
};

} // namespace instanton
