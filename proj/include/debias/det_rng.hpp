#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace debias {

// Counter-based deterministic random stream. std::shuffle and the standard
// distributions are implementation-defined, so anything that must be
// bit-reproducible across toolchains goes through these helpers instead.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Stateful stream seeded once; each next() call advances a counter.
class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : state_(splitmix64(seed)) {}

    std::uint64_t next() {
        state_ = splitmix64(state_);
        return state_;
    }

    /// Uniform draw in [0, n). n must be nonzero.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    /// Uniform double in [0, 1) with 53 bits of entropy.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

/// Stateless positional draw: same (seed, key, counter) always yields the
/// same value regardless of evaluation order.
inline std::uint64_t positional_draw(std::uint64_t seed, std::uint64_t key,
                                     std::uint64_t counter) {
    return splitmix64(splitmix64(seed ^ key) + counter);
}

inline std::uint64_t draw_below(std::uint64_t raw, std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(raw) * n) >> 64);
}

/// Deterministic Fisher-Yates over indices [0, n).
inline std::vector<std::size_t> shuffled_indices(std::size_t n,
                                                 std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    DetRng rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

}  // namespace debias
