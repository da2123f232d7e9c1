#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "l1inf/errors.hpp"

namespace l1inf {

/// Dense real matrix stored in row-major order.
///
/// Shape is fixed at construction and always positive in both dimensions.
/// Finiteness of the entries is not enforced here since intermediate
/// results may legitimately be anything; the algorithms validate their
/// inputs with all_finite().
template <std::floating_point Real>
class Matrix {
public:
    using value_type = Real;

    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, Real fill = Real(0))
        : rows_(rows), cols_(cols), data_(checked_size(rows, cols), fill) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<Real> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        detail::require(data_.size() == checked_size(rows, cols),
                        "matrix data length " + std::to_string(data_.size()) +
                            " does not match shape " + std::to_string(rows) + "x" +
                            std::to_string(cols));
    }

    Matrix(std::initializer_list<std::initializer_list<Real>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        checked_size(rows_, cols_);
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            detail::require(r.size() == cols_, "ragged initializer for matrix");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix column(std::span<const Real> values) {
        return Matrix(values.size(), 1, std::vector<Real>(values.begin(), values.end()));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    Real& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    Real operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<Real> data() noexcept { return data_; }
    std::span<const Real> data() const noexcept { return data_; }

    std::span<Real> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const Real> row(std::size_t r) const noexcept {
        return {data_.data() + r * cols_, cols_};
    }

    /// Copy of column c.
    std::vector<Real> col(std::size_t c) const {
        std::vector<Real> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            out[r] = (*this)(r, c);
        }
        return out;
    }

    bool all_finite() const noexcept {
        for (Real v : data_) {
            if (!std::isfinite(v)) {
                return false;
            }
        }
        return true;
    }

    Matrix transposed() const {
        Matrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                out(c, r) = (*this)(r, c);
            }
        }
        return out;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    static std::size_t checked_size(std::size_t rows, std::size_t cols) {
        detail::require(rows > 0 && cols > 0, "matrix dimensions must be positive");
        return rows * cols;
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Real> data_;
};

using DenseMatrix = Matrix<double>;

template <std::floating_point Real>
Real max_abs_diff(const Matrix<Real>& a, const Matrix<Real>& b) {
    detail::require(a.rows() == b.rows() && a.cols() == b.cols(), "shape mismatch");
    Real out = 0;
    auto da = a.data();
    auto db = b.data();
    for (std::size_t k = 0; k < da.size(); ++k) {
        out = std::max(out, std::abs(da[k] - db[k]));
    }
    return out;
}

template <std::floating_point Real>
Real frobenius_norm(const Matrix<Real>& a) {
    Real acc = 0;
    for (Real v : a.data()) {
        acc += v * v;
    }
    return std::sqrt(acc);
}

namespace detail {

template <std::floating_point Real>
void require_finite(const Matrix<Real>& m, const char* name) {
    require(m.size() > 0, std::string(name) + " is empty");
    require(m.all_finite(), std::string(name) + " has non-finite entries");
}

} // namespace detail

} // namespace l1inf
