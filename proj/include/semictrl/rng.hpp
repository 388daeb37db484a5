#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

// Self-contained PRNG so that seeded runs are bit-reproducible across
// platforms and standard library implementations (std::normal_distribution
// is implementation-defined).

namespace semictrl {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller (second deviate cached).
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    std::vector<double> normal_vec(std::size_t n) {
        std::vector<double> v(n);
        for (auto& x : v) x = normal();
        return v;
    }

    // Uniformly distributed in the closed Euclidean ball of the given radius.
    std::vector<double> uniform_ball(std::size_t n, double radius) {
        std::vector<double> v = normal_vec(n);
        double s = 0.0;
        for (double x : v) s += x * x;
        if (s == 0.0) {
            v[0] = 1.0;
            s = 1.0;
        }
        const double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(n));
        const double f = r / std::sqrt(s);
        for (auto& x : v) x *= f;
        return v;
    }

    std::vector<double> unit_vector(std::size_t n) {
        std::vector<double> v = normal_vec(n);
        double s = 0.0;
        for (double x : v) s += x * x;
        if (s == 0.0) {
            v[0] = 1.0;
            s = 1.0;
        }
        const double f = 1.0 / std::sqrt(s);
        for (auto& x : v) x *= f;
        return v;
    }

    // Derive an independent deterministic stream.
    Rng fork(std::uint64_t stream) const {
        Rng r(state_ ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
        r.next_u64();
        return r;
    }

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace semictrl
