#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace banditboost {

/// Counter-based generator. The output for draw n of a stream is a pure
/// function of (key, n), so streams can be split by tag without sharing
/// state and any draw can be replayed from its key alone.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) noexcept : key_(mix(seed ^ 0x243f6a8885a308d3ULL)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return next_u64(); }

    result_type next_u64() noexcept {
        return mix(key_ + (counter_++ + 1) * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept {
        // Lemire's multiply-shift with rejection
        __uint128_t m = static_cast<__uint128_t>(next_u64()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<__uint128_t>(next_u64()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Standard normal via Box-Muller (one value per call, two uniforms).
    double normal() noexcept;

    /// Derived stream; independent of how many draws the parent has made.
    [[nodiscard]] Rng split(std::uint64_t tag) const noexcept {
        Rng child;
        child.key_ = mix(key_ ^ mix(tag + 0x632be59bd9b4e019ULL));
        child.counter_ = 0;
        return child;
    }

    [[nodiscard]] std::uint64_t key() const noexcept { return key_; }
    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

private:
    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

/// Index drawn with probability proportional to weights[i]. Weights must be
/// nonnegative with a positive sum; the draw is scale invariant.
std::size_t draw_categorical(std::span<const double> weights, Rng& rng);

}  // namespace banditboost
