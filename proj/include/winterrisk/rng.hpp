#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace winterrisk::rng {

__extension__ using u128 = unsigned __int128;

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based stream: draw k of stream (seed, key) is a pure function of
/// (seed, key, k). Independent iterations therefore reproduce regardless of
/// the order or thread they run on.
class Stream {
public:
    constexpr Stream(std::uint64_t seed, std::uint64_t key)
        : base_(mix64(mix64(seed) ^ (key * 0xd1b54a32d192ed03ULL)))
    {
    }

    constexpr std::uint64_t at(std::uint64_t k) const { return mix64(base_ ^ mix64(k)); }
    constexpr std::uint64_t next() { return at(counter_++); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open()
    {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n) by multiply-shift.
    std::uint64_t index(std::uint64_t n)
    {
        return static_cast<std::uint64_t>((static_cast<u128>(next()) * n) >> 64);
    }

    /// Standard normal via Box-Muller (one value per call).
    double normal()
    {
        const double u1 = uniform_open();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

}  // namespace winterrisk::rng
