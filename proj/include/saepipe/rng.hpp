#pragma once

#include <cmath>
#include <cstdint>

// Counter-based randomness: every draw is a pure function of (seed, stream,
// counter words), so generation order and thread schedule cannot change the
// output and results are identical across platforms.

namespace saepipe {

namespace detail {
inline std::uint64_t mix64(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}
} // namespace detail

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                  std::uint64_t c = 0) {
    std::uint64_t h = detail::mix64(seed);
    h = detail::mix64(h ^ a);
    h = detail::mix64(h ^ b);
    h = detail::mix64(h ^ c);
    return h;
}

// Uniform double in [0,1) from the top 53 bits.
inline double counter_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                              std::uint64_t c = 0) {
    return static_cast<double>(counter_hash(seed, a, b, c) >> 11) * 0x1.0p-53;
}

// Uniform integer in [lo, hi] inclusive. Modulo bias is below 2^-32 for the
// desk-scale ranges used here.
inline std::int64_t counter_uniform_int(std::uint64_t seed, std::int64_t lo, std::int64_t hi,
                                        std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(counter_hash(seed, a, b, c) % span);
}

// Small labeled streams so unrelated draws never share a counter.
enum class RngStream : std::uint64_t {
    subsample = 1,
    planted = 2,
    doc_date = 3,
    doc_tokens = 4,
    token_activation = 5,
    earnings_margin = 6,
    earnings_mean = 7,
    earnings_spread = 8,
};

inline std::uint64_t stream_id(RngStream s) { return static_cast<std::uint64_t>(s); }

} // namespace saepipe
