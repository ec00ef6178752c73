#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace sdot {

/// splitmix64 finalizer, used as the mixing primitive for seed derivation.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Per-purpose seed derivation: a master seed plus a path of stream ids
/// (purpose, replicate index, draw index, ...). Each path element is folded
/// in with one mixing round, so the derivation is order-sensitive and
/// collisions across purposes are avoided without coordination.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(master);
    for (std::uint64_t id : path) s = mix64(s ^ mix64(id));
    return s;
}

/// Stream ids for derive_seed. Keeping them in one place documents which
/// purposes draw from which streams.
namespace streams {
inline constexpr std::uint64_t sample_discrete = 1;
inline constexpr std::uint64_t mc_integrate = 2;
inline constexpr std::uint64_t solver_sample = 3;
inline constexpr std::uint64_t replicate = 4;
inline constexpr std::uint64_t law_sample = 5;
inline constexpr std::uint64_t law_draw = 6;
inline constexpr std::uint64_t property = 7;
} // namespace streams

/// Deterministic generator: mt19937_64 (output sequence fixed by the
/// standard) with hand-rolled uniform and normal transforms so that streams
/// are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Standard normal via Box-Muller; the spare draw is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace sdot
