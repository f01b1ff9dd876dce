// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace wiser {

/// SplitMix64 mixing step; the backbone of deterministic seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives a sub-seed from a base seed and a path of tags
/// (stage, drug index, fold index, ...). Order-sensitive.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = splitmix64(base);
    for (std::uint64_t tag : path) s = splitmix64(s ^ tag);
    return s;
}

/// Deterministic RNG wrapper. Distribution sampling is implemented here
/// rather than via std distributions so streams are identical across
/// standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    /// Uniform double in [0, 1).
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (cached second draw).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n) { return std::size_t(eng_() % n); }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

    /// Random permutation of [0, n).
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        shuffle(p);
        return p;
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace wiser
