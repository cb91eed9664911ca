#pragma once

#include <cstdint>
#include <limits>

namespace qkd {

// SplitMix64 (Steele/Lea/Vigna).  Used to expand seeds and to derive
// per-cell sweep seeds.
struct SplitMix64 {
    std::uint64_t state;

    explicit constexpr SplitMix64(std::uint64_t seed) : state(seed) {}

    constexpr std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

// xoshiro256** 1.0 (Blackman/Vigna).  Small state, 64-bit output, bit-stable
// across platforms.  The state is expanded from the seed through SplitMix64,
// so every 64-bit seed (including 0) is valid.
class Xoshiro256ss {
public:
    explicit Xoshiro256ss(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& word : state_) word = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int n) {
        return (x << n) | (x >> (64 - n));
    }

    std::uint64_t state_[4];
};

// Maps a probability to a threshold so a Bernoulli trial reduces to one
// integer compare: next() < threshold fires with probability p at 2^-64
// resolution, exactly never at p <= 0 and always at p >= 1.
inline std::uint64_t probability_threshold(double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return std::numeric_limits<std::uint64_t>::max();
    const long double scaled =
        static_cast<long double>(p) * 18446744073709551616.0L;
    if (scaled >= 18446744073709551615.0L) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(scaled);
}

// Deterministic per-cell seed for sweeps: the master seed and the cell index
// are mixed through one SplitMix64 step.  Documented so sweep CSV output can
// be reproduced cell by cell.
inline std::uint64_t derive_cell_seed(std::uint64_t master_seed,
                                      std::uint64_t cell_index) {
    SplitMix64 sm(master_seed ^ (0x9E3779B97F4A7C15ULL * (cell_index + 1)));
    return sm.next();
}

}  // namespace qkd
