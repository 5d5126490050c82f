#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace fairweight {

// splitmix64 step; also used to derive independent seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stable seed derivation: one master seed spawns per-purpose streams so that
// parallel evaluation order cannot change results.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t purpose, std::uint64_t index = 0) {
    std::uint64_t s = base;
    std::uint64_t h = splitmix64(s);
    s = h ^ (purpose * 0x9e3779b97f4a7c15ULL);
    h = splitmix64(s);
    s = h ^ (index * 0xd1b54a32d192ed03ULL);
    return splitmix64(s);
}

namespace seed_purpose {
constexpr std::uint64_t kReplicate = 1;
constexpr std::uint64_t kSplit = 2;
constexpr std::uint64_t kUndersample = 3;
constexpr std::uint64_t kFolds = 4;
constexpr std::uint64_t kModelEval = 5;
constexpr std::uint64_t kGa = 6;
constexpr std::uint64_t kEwModel = 7;
constexpr std::uint64_t kGaInit = 8;
constexpr std::uint64_t kGaOps = 9;
constexpr std::uint64_t kTree = 10;
constexpr std::uint64_t kJitter = 11;
} // namespace seed_purpose

// xoshiro256++ with hand-rolled distributions. The standard <random>
// distributions are implementation-defined, which would break the
// byte-identical reproducibility contract across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform on [0, 1), 53-bit resolution
    double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double real(double lo, double hi) { return lo + (hi - lo) * real(); }

    // uniform integer in [0, n), n > 0; Lemire's multiply-shift with rejection
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t x = next();
        __uint128_t m = static_cast<__uint128_t>(x) * static_cast<__uint128_t>(n);
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                x = next();
                m = static_cast<__uint128_t>(x) * static_cast<__uint128_t>(n);
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool coin() { return (next() >> 63) != 0; }

    // standard normal via Box-Muller (uncached; two uniforms per draw)
    double normal() {
        double u1 = real();
        while (u1 <= 0.0) u1 = real();
        const double u2 = real();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

} // namespace fairweight
