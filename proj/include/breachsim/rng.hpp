#pragma once

#include <cstdint>

namespace breachsim {

// Small deterministic generator (splitmix64). Hand-rolled so that seeded
// sequences are stable across platforms and standard library versions,
// which keeps frozen test values and replay transcripts valid everywhere.
class Rng {
public:
    explicit Rng(uint64_t seed = 0) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, n). Rejects the low tail (2^64 mod n values)
    // so every residue is equally likely.
    uint64_t below(uint64_t n) {
        const uint64_t threshold = (0 - n) % n;
        uint64_t x;
        do {
            x = next_u64();
        } while (x < threshold);
        return x % n;
    }

    // Inclusive range.
    int range(int lo, int hi) {
        return lo + static_cast<int>(below(static_cast<uint64_t>(hi - lo + 1)));
    }

    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    uint64_t state() const { return state_; }

private:
    uint64_t state_;
};

} // namespace breachsim
