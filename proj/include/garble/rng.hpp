#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <random>

namespace garble {

namespace detail {

// SplitMix64 finalizer; used to decorrelate (seed, stream) pairs.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace detail

// Seeded random stream. Substreams are derived from (seed, stream) so that
// replicate i can be given its own stream and parallel/serial execution
// produce identical results.
//
// normal() uses Box-Muller on raw 53-bit uniforms and always consumes exactly
// two engine outputs, so draw counts per operation are fixed and a consumer
// can reproduce another party's stream position exactly.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(detail::splitmix64(seed)), seed_(seed) {}

    Rng(std::uint64_t seed, std::uint64_t stream)
        : engine_(detail::splitmix64(detail::splitmix64(seed) ^
                                     detail::splitmix64(stream * 0x9E3779B97F4A7C15ULL + 1))),
          seed_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double normal() {
        // u1 in (0, 1] keeps the log finite.
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Independent substream derived from this stream's base seed.
    Rng split(std::uint64_t stream) const { return Rng(seed_, stream); }

    std::uint64_t seed() const { return seed_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

// Anything that can hand out standard-normal draws; lets tests pin epsilon.
template <typename R>
concept RandomStream = requires(R r) {
    { r.normal() } -> std::convertible_to<double>;
};

}  // namespace garble
