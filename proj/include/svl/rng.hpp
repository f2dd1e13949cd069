#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace svl {

/// Identifier written into run manifests. Bump whenever the bit stream changes.
inline constexpr const char* kRngAlgorithm = "xoshiro256++/splitmix64-seeded; normals: Marsaglia polar (53-bit uniforms); v1";

/// SplitMix64 finalizer. Used for seeding and for per-trajectory seed derivation.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Stable seed for trajectory `index` of an ensemble started from `base_seed`.
/// Independent of execution order, so results do not depend on thread count.
constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(base_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// xoshiro256++ (Blackman & Vigna). Satisfies UniformRandomBitGenerator, and
/// additionally produces uniform doubles and standard normals with a fixed,
/// platform-independent transform (std::normal_distribution is not portable).
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept {
        // splitmix64 stream: state advances by the golden gamma, each word is its finalized value.
        std::uint64_t x = seed;
        for (auto& word : s_) {
            word = splitmix64(x);
            x += 0x9e3779b97f4a7c15ULL;
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Lemire's multiply-shift without rejection;
    /// bias is below 2^-40 for the n used here (resampling indices).
    std::uint64_t below(std::uint64_t n) noexcept {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
    }

    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        has_spare_ = true;
        return u * scale;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4]{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace svl
