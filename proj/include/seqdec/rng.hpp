#pragma once

// Deterministic random number generation.
//
// Generator: splitmix64 in counter mode — the k-th output is a fixed mix of
// seed + (k+1) * golden gamma, so a stream is a pure function of (seed, k) and
// reproduces bit-for-bit across platforms and runs.  Substreams are derived by
// hashing (seed, stream id) through the same mixer.  Standard normals come
// from the inverse-cdf transform of the 53-bit uniform, so the whole chain is
// documented and implementation-independent: splitmix64 + inverse normal cdf.

#include <cstdint>

#include "normal.hpp"

namespace seqdec {

inline constexpr const char* kRngAlgorithm = "splitmix64/inverse-normal-cdf";

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace detail

// Derives an independent substream seed from (seed, stream).
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
    return detail::mix64(seed + (stream + 1) * detail::kGolden);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += detail::kGolden;
        return detail::mix64(state_);
    }

    // Uniform on the open interval (0, 1): 53-bit mantissa, half-ulp offset
    // keeps 0 and 1 unreachable so the inverse cdf is always defined.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_gaussian() { return norm_cdf_inverse(next_uniform()); }

private:
    std::uint64_t state_;
};

} // namespace seqdec
