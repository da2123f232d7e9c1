#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <span>
#include <vector>

#include "l1inf/errors.hpp"
#include "l1inf/matrix.hpp"

namespace l1inf {

/// l1 norm of every column, accumulated row by row.
template <std::floating_point Real>
std::vector<Real> column_l1_norms(const Matrix<Real>& m) {
    std::vector<Real> out(m.cols(), Real(0));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out[c] += std::abs(row[c]);
        }
    }
    return out;
}

template <std::floating_point Real>
std::vector<Real> column_linf_norms(const Matrix<Real>& m) {
    std::vector<Real> out(m.cols(), Real(0));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out[c] = std::max(out[c], std::abs(row[c]));
        }
    }
    return out;
}

/// Mixed l1,inf norm: the largest column l1 norm (induced l1 operator norm).
template <std::floating_point Real>
Real mixed_norm_1inf(const Matrix<Real>& m) {
    detail::require_finite(m, "matrix");
    auto norms = column_l1_norms(m);
    return *std::max_element(norms.begin(), norms.end());
}

/// Mixed inf,1 norm: sum over columns of the column max-abs entry. Dual of
/// mixed_norm_1inf.
template <std::floating_point Real>
Real mixed_norm_inf1(const Matrix<Real>& m) {
    detail::require_finite(m, "matrix");
    Real acc = 0;
    for (Real v : column_linf_norms(m)) {
        acc += v;
    }
    return acc;
}

/// sign(v) * max(|v| - theta, 0), elementwise.
template <std::floating_point Real>
std::vector<Real> soft_threshold(std::span<const Real> v, Real theta) {
    detail::require(theta >= 0 && std::isfinite(theta), "soft_threshold: theta must be >= 0");
    std::vector<Real> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        Real mag = std::abs(v[k]) - theta;
        out[k] = mag > 0 ? std::copysign(mag, v[k]) : Real(0);
    }
    return out;
}

template <std::floating_point Real>
std::vector<Real> soft_threshold(const std::vector<Real>& v, Real theta) {
    return soft_threshold(std::span<const Real>(v), theta);
}

} // namespace l1inf
