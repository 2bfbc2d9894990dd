#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace mincam {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer; full-avalanche 64-bit mix.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace detail

// Counter-based deterministic generator. A stream is keyed by
// (seed, tag, index); any sample in a run can therefore be regenerated in
// isolation, independent of batching or worker count. Platform-stable:
// no std:: distributions are used.
class Rng {
public:
    static Rng keyed(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0) {
        std::uint64_t h = detail::mix64(seed ^ detail::kGolden);
        h = detail::mix64(h ^ detail::fnv1a(tag));
        h = detail::mix64(h ^ (index * detail::kGolden));
        return Rng(h);
    }

    // Stable sub-seed for naming derived streams (data, mask-init, ...).
    static std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
        return detail::mix64(detail::mix64(seed ^ detail::kGolden) ^ detail::fnv1a(tag));
    }

    std::uint64_t next_u64() {
        state_ += detail::kGolden;
        return detail::mix64(state_);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_unit();
    }

    // Box-Muller; consumes two draws per call.
    double normal(double mean, double stddev) {
        double u1 = 1.0 - next_unit();  // (0, 1]
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Unbiased integer in [0, n); rejection sampling.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t x = next_u64();
            if (x >= threshold) return x % n;
        }
    }

private:
    explicit Rng(std::uint64_t state) : state_(state) {}
    std::uint64_t state_;
};

}  // namespace mincam
