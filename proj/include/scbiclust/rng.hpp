#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace scb {

/// Deterministic splittable random generator (xoshiro256++ seeded via
/// SplitMix64). A generator is identified by (seed, stream_id); identical
/// pairs produce identical draw sequences on every run and thread count.
/// Independent streams for parallel work are derived with stream().
///
/// All distributions are hand-rolled so sequences do not depend on the
/// standard library implementation.
class Rng {
public:
    Rng() : Rng(0, 0) {}

    explicit Rng(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_(stream_id) {
        std::uint64_t x = mix64(seed ^ 0x5851F42D4C957F2DULL) ^
                          mix64(stream_id * 0xDA942042E4DD58B5ULL + 0x9E3779B97F4A7C15ULL);
        for (auto& word : state_) {
            x += 0x9E3779B97F4A7C15ULL;
            word = mix64(x);
        }
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

    /// Derives an independent child stream, e.g. one per (replicate, purpose).
    /// Pure: the same (seed, stream_id, purpose, index) always yields the
    /// same child.
    Rng stream(std::uint64_t purpose, std::uint64_t index = 0) const {
        std::uint64_t child = mix64(stream_ ^ mix64(purpose * 0x9E3779B97F4A7C15ULL +
                                                    index * 0xBF58476D1CE4E5B9ULL + 1));
        return Rng(seed_, child);
    }

    /// Splits off a child stream by consuming state, so successive splits
    /// from the same generator never coincide.
    Rng split(std::uint64_t purpose = 0) {
        const std::uint64_t child =
            mix64(next_u64() ^ mix64(stream_ + purpose * 0x9E3779B97F4A7C15ULL));
        return Rng(seed_, child);
    }

    std::uint64_t next_u64() {
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

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n), unbiased (Lemire rejection). n must be > 0.
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t threshold = (0 - bound) % bound;
        while (true) {
            const std::uint64_t r = next_u64();
            const unsigned __int128 m = static_cast<unsigned __int128>(r) * bound;
            if (static_cast<std::uint64_t>(m) >= threshold)
                return static_cast<std::size_t>(m >> 64);
        }
    }

    /// Standard normal via Marsaglia's polar method (caches the spare value).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double cauchy(double location, double scale) {
        double u;
        do {
            u = uniform01();
        } while (u == 0.5);  // avoid tan singularity exactly at the median
        return location + scale * std::tan(3.14159265358979323846 * (u - 0.5));
    }

    /// Gamma(shape, 1) via Marsaglia-Tsang.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double u = uniform01();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        while (true) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Chi-square with df degrees of freedom. Sums squared normals for
    /// df <= 256, switches to Gamma(df/2, 2) above that for speed.
    double chi_squared(std::uint64_t df) {
        if (df <= 256) {
            double sum = 0.0;
            for (std::uint64_t i = 0; i < df; ++i) {
                const double z = normal();
                sum += z * z;
            }
            return sum;
        }
        return 2.0 * gamma(0.5 * static_cast<double>(df));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    // SplitMix64 finalizer.
    static std::uint64_t mix64(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace scb
