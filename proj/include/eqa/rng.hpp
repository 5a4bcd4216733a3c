#pragma once

#include <cstdint>
#include <vector>

namespace eqa {

/// Deterministic 64-bit generator (splitmix64). The sequence depends only on
/// the seed, not on the standard library, so seeded runs are reproducible
/// byte for byte across builds.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t next_below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    /// Derives an independent stream seed from (a, b). Used to give each
    /// restart / grid cell its own generator.
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        Rng r(a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2)));
        return r.next_u64();
    }

private:
    std::uint64_t state_;
};

/// In-place Fisher-Yates shuffle driven by the deterministic generator.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace eqa
