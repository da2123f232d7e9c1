#pragma once

// Test-only helpers: random inputs and brute-force references that do not
// go through the library's projection code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "l1inf/matrix.hpp"

namespace l1inf::testing {

inline DenseMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t m,
                                 double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    DenseMatrix out(n, m);
    for (double& v : out.data()) {
        v = dist(rng);
    }
    return out;
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(std::log(lo), std::log(hi));
    return std::exp(dist(rng));
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    std::uniform_int_distribution<std::size_t> dist(lo, hi);
    return dist(rng);
}

/// Threshold theta >= 0 with sum max(u - theta, 0) == radius, found by
/// bisection on theta. Zero when u is inside the ball.
inline double bisect_simplex_threshold(const std::vector<double>& u, double radius) {
    auto mass = [&](double theta) {
        double s = 0;
        for (double x : u) {
            s += std::max(x - theta, 0.0);
        }
        return s;
    };
    if (mass(0) <= radius) {
        return 0;
    }
    double lo = 0;
    double hi = *std::max_element(u.begin(), u.end());
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mass(mid) > radius ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Column-major view of |V| as vectors.
inline std::vector<std::vector<double>> abs_columns(const DenseMatrix& v) {
    std::vector<std::vector<double>> out(v.cols(), std::vector<double>(v.rows()));
    for (std::size_t c = 0; c < v.cols(); ++c) {
        for (std::size_t r = 0; r < v.rows(); ++r) {
            out[c][r] = std::abs(v(r, c));
        }
    }
    return out;
}

inline int sign_of(double x) { return (x > 0) - (x < 0); }

} // namespace l1inf::testing
