#pragma once

// Counter-based random streams. A stream is identified by
// (master seed, operation id, entity id); draw i of a stream is a pure
// function of that key and i, so results never depend on how work is
// split across threads.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace echoscope {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Operation ids used to derive substreams.
enum class StreamOp : std::uint64_t {
    SynthIdeology = 1,
    SynthFollow = 2,
    SynthOriginals = 3,
    SynthRetweets = 4,
    SynthReshares = 5,
    SynthDomains = 6,
    IndegreeSample = 10,
    RandomBaseline = 11,
    BaselineUserPick = 12,
    UserScoreSample = 13,
    Bootstrap = 14,
    Test = 99,
};

class Stream {
public:
    Stream(std::uint64_t seed, StreamOp op, std::uint64_t entity)
        : key_(splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(op)) ^ entity)) {}

    std::uint64_t next() { return splitmix64(key_ + 0x632be59bd9b4e019ULL * ++counter_); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), n > 0. Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t x = next();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = -n % n;
            while (low < threshold) {
                x = next();
                m = static_cast<__uint128_t>(x) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller (one value per call).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Poisson by inversion for small means, normal approximation otherwise.
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean > 500.0) {
            const double v = std::round(mean + std::sqrt(mean) * normal());
            return v < 0.0 ? 0 : static_cast<std::uint64_t>(v);
        }
        const double u = uniform();
        double p = std::exp(-mean);
        double cdf = p;
        std::uint64_t k = 0;
        while (u > cdf && k < 100000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
            if (p == 0.0 && cdf < u) break;
        }
        return k;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace echoscope
