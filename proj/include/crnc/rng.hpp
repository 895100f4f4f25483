#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace crnc {

/// Counter-based generator: draw i of stream s under seed k is a pure function
/// of (k, s, i), so parallel trials reproduce regardless of scheduling.
class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : _key{mix(seed ^ 0x243f6a8885a308d3ULL) ^ mix(stream + 0x13198a2e03707344ULL)}
    {}

    /// Derives an independent child stream (e.g. per trial, per coordinate).
    [[nodiscard]] constexpr CounterRng substream(std::uint64_t tag) const noexcept
    {
        CounterRng r{0, 0};
        r._key = mix(_key ^ mix(tag + 0xa4093822299f31d0ULL));
        return r;
    }

    constexpr std::uint64_t next_u64() noexcept { return mix(_key + 0x9e3779b97f4a7c15ULL * ++_counter); }

    /// Uniform in [0, 1).
    constexpr double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (one draw per call).
    double normal() noexcept
    {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    // splitmix64 finalizer
    static constexpr std::uint64_t mix(std::uint64_t z) noexcept
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t _key;
    std::uint64_t _counter = 0;
};

} // namespace crnc
