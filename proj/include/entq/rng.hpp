#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

#include "entq/errors.hpp"

namespace entq {

namespace detail {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

// xoshiro256++ seeded from a (seed, stream_id) pair through SplitMix64.
// Distinct stream ids give independent-looking sequences from the same seed,
// which is what makes per-row parallel generation reproducible: row i of a
// dataset always uses stream i regardless of which worker produced it.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}

    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id) {
        std::uint64_t x = seed;
        x = detail::splitmix64_next(x) ^ stream_id;
        s_[0] = detail::splitmix64_next(x);
        s_[1] = detail::splitmix64_next(x);
        s_[2] = detail::splitmix64_next(x);
        s_[3] = detail::splitmix64_next(x);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[3] = 1;  // all-zero state is invalid
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl64(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl64(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as a log argument.
    double uniform_pos() { return 1.0 - uniform(); }

    double uniform(double lo, double hi) {
        if (!(lo < hi)) throw DomainError("uniform: need lo < hi");
        return lo + (hi - lo) * uniform();
    }

    // Unbiased integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) throw DomainError("uniform_int: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double a = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::complex<double> complex_gaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return {re, im};
    }

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::uint64_t s_[4] = {};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace entq
