#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>

#include "l1inf/errors.hpp"
#include "l1inf/matrix.hpp"

namespace l1inf {

/// Portable random source: std::mt19937_64 (whose output sequence is fixed
/// by the standard) with explicit conversions, so matrices are identical
/// across standard libraries. std::*_distribution is not used because its
/// algorithms are implementation-defined.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) from the top 53 bits of one draw.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller; the second variate is discarded.
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) {
            u1 = uniform01();
        }
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// n x m matrix with i.i.d. entries uniform on [-0.5, 0.5), filled in
/// row-major order from RandomSource(seed).
inline DenseMatrix gen_random_matrix(std::size_t n, std::size_t m, std::uint64_t seed) {
    detail::require(n >= 1 && m >= 1, "gen_random_matrix: dimensions must be >= 1");
    RandomSource rng(seed);
    DenseMatrix out(n, m);
    for (double& v : out.data()) {
        v = rng.uniform01() - 0.5;
    }
    return out;
}

inline DenseMatrix gen_gaussian_matrix(std::size_t n, std::size_t m, std::uint64_t seed) {
    detail::require(n >= 1 && m >= 1, "gen_gaussian_matrix: dimensions must be >= 1");
    RandomSource rng(seed);
    DenseMatrix out(n, m);
    for (double& v : out.data()) {
        v = rng.normal();
    }
    return out;
}

} // namespace l1inf
