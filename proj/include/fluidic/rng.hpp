#pragma once

#include <cstdint>
#include <limits>

namespace fluidic {

// SplitMix64 finalizer (Steele, Lea, Flood). Used for seeding and for
// deriving independent per-game / per-purpose seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(seed ^ splitmix64(stream + 0xD1B54A32D192ED03ull));
}

// xorshift64* (Vigna 2016): shifts 12/25/27, multiplier 0x2545F4914F6CDD1D.
// All engine randomness flows through this generator so a replay is
// portable to any implementation that reproduces these constants.
class Rng {
public:
    static constexpr std::uint64_t kMultiplier = 0x2545F4914F6CDD1Dull;
    static constexpr int kShiftA = 12;
    static constexpr int kShiftB = 25;
    static constexpr int kShiftC = 27;

    constexpr explicit Rng(std::uint64_t seed = 0) noexcept : state_(splitmix64(seed)) {
        if (state_ == 0) state_ = 0x9E3779B97F4A7C15ull;
    }

    constexpr std::uint64_t next() noexcept {
        state_ ^= state_ >> kShiftA;
        state_ ^= state_ << kShiftB;
        state_ ^= state_ >> kShiftC;
        return state_ * kMultiplier;
    }

    // Uniform in [0, 1) with 53 bits of precision.
    constexpr double uniform() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    constexpr double uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * uniform();
    }

    // Uniform integer in [0, bound). Rejection keeps it unbiased.
    constexpr std::uint64_t below(std::uint64_t bound) noexcept {
        if (bound <= 1) return 0;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t r = next();
        while (r >= limit) r = next();
        return r % bound;
    }

    // Uniform integer in [lo, hi] (inclusive).
    constexpr std::int64_t between(std::int64_t lo, std::int64_t hi) noexcept {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    constexpr bool bernoulli(double p) noexcept { return uniform() < p; }

    constexpr std::uint64_t state() const noexcept { return state_; }
    constexpr bool operator==(const Rng&) const = default;

private:
    std::uint64_t state_;
};

// Fingerprint of the generator constants: first output after seeding with 0.
// Stored in replay headers so logs from a build with different constants are rejected.
constexpr std::uint64_t rng_fingerprint() noexcept {
    Rng r(0);
    return r.next();
}

} // namespace fluidic
