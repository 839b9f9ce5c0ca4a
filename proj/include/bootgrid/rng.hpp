#pragma once

#include <cstdint>
#include <limits>

namespace bootgrid {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator, so it can be
/// handed to <random> distributions, but the library itself only consumes raw
/// 64-bit draws.
class Stream {
public:
    using result_type = std::uint64_t;

    explicit constexpr Stream(std::uint64_t state) noexcept : state_(state) {}

    constexpr result_type operator()() noexcept {
        state_ += kGamma;
        return mix64(state_);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr std::uint64_t state() const noexcept { return state_; }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
    std::uint64_t state_;
};

/// Stream for trial `trial` of an experiment keyed by `seed`:
/// initial state = mix64(seed ^ mix64(trial + 0x9E3779B97F4A7C15)).
/// Trials are independent of scheduling, so any worker may run any trial.
constexpr Stream trial_stream(std::uint64_t seed, std::uint64_t trial) noexcept {
    return Stream(mix64(seed ^ mix64(trial + 0x9E3779B97F4A7C15ULL)));
}

/// Integer threshold for a Bernoulli(p) draw from one 64-bit uniform u:
/// the event is `u < threshold` (or always, when p >= 1). Monotone in p, so
/// thresholding a shared uniform couples draws at different p.
struct BernoulliThreshold {
    explicit BernoulliThreshold(double p) noexcept
        : always(p >= 1.0),
          bound(p <= 0.0 || always ? 0 : static_cast<std::uint64_t>(p * 18446744073709551616.0)) {}

    bool operator()(std::uint64_t u) const noexcept { return always || u < bound; }

    bool always;
    std::uint64_t bound;
};

}  // namespace bootgrid
