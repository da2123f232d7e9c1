#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "l1inf/errors.hpp"
#include "l1inf/matrix.hpp"
#include "l1inf/norms.hpp"

namespace l1inf {

enum class BoundProvenance {
    subset_max, ///< best column-subset bound (top-k prefixes of sorted column norms)
    global,     ///< bound from the inf,1 norm of the whole matrix
    zero_clamp, ///< both bounds were negative; zero was used instead
};

inline std::string_view to_string(BoundProvenance p) {
    switch (p) {
    case BoundProvenance::subset_max: return "subset_max";
    case BoundProvenance::global: return "global";
    case BoundProvenance::zero_clamp: return "zero_clamp";
    }
    return "unknown";
}

/// A lower bound on the l1,inf norm of the prox solution.
template <std::floating_point Real>
struct LowerBound {
    Real value = 0;
    BoundProvenance provenance = BoundProvenance::zero_clamp;
};

namespace detail {

template <std::floating_point Real>
void require_lambda(Real lambda) {
    require(lambda > 0 && std::isfinite(lambda), "lambda must be a positive finite number");
}

/// max_k (s_k - rows * lambda) / k over prefix sums of the descending
/// column norms.
template <std::floating_point Real>
Real best_prefix_bound(std::vector<Real> col_norms, std::size_t rows, Real lambda) {
    std::sort(col_norms.begin(), col_norms.end(), std::greater<>());
    const Real penalty = static_cast<Real>(rows) * lambda;
    Real best = -std::numeric_limits<Real>::infinity();
    Real partial = 0;
    for (std::size_t k = 0; k < col_norms.size(); ++k) {
        partial += col_norms[k];
        best = std::max(best, (partial - penalty) / static_cast<Real>(k + 1));
    }
    return best;
}

} // namespace detail

/// (sum of l1 norms of the chosen columns - rows * lambda) / |subset|.
/// Valid for any non-empty subset; may be negative.
template <std::floating_point Real>
LowerBound<Real> lower_bound_subset(const Matrix<Real>& v, Real lambda,
                                    std::span<const std::size_t> subset) {
    detail::require_finite(v, "V");
    detail::require_lambda(lambda);
    detail::require(!subset.empty(), "lower_bound_subset: subset must be non-empty");
    auto norms = column_l1_norms(v);
    std::vector<bool> seen(v.cols(), false);
    Real sum = 0;
    for (std::size_t c : subset) {
        detail::require(c < v.cols(), "lower_bound_subset: column index out of range");
        detail::require(!seen[c], "lower_bound_subset: duplicate column index");
        seen[c] = true;
        sum += norms[c];
    }
    const Real value =
        (sum - static_cast<Real>(v.rows()) * lambda) / static_cast<Real>(subset.size());
    return {value, BoundProvenance::subset_max};
}

template <std::floating_point Real>
LowerBound<Real> lower_bound_subset(const Matrix<Real>& v, Real lambda,
                                    const std::vector<std::size_t>& subset) {
    return lower_bound_subset(v, lambda, std::span<const std::size_t>(subset));
}

/// Largest subset bound, found by sorting the column l1 norms and scanning
/// the top-k prefixes.
template <std::floating_point Real>
LowerBound<Real> maximize_lower_bound(const Matrix<Real>& v, Real lambda) {
    detail::require_finite(v, "V");
    detail::require_lambda(lambda);
    return {detail::best_prefix_bound(column_l1_norms(v), v.rows(), lambda),
            BoundProvenance::subset_max};
}

/// (||V||_inf,1 - lambda) / cols. Negative exactly when the prox is zero.
template <std::floating_point Real>
LowerBound<Real> lower_bound_global(const Matrix<Real>& v, Real lambda) {
    detail::require_lambda(lambda);
    const Real norm = mixed_norm_inf1(v);
    return {(norm - lambda) / static_cast<Real>(v.cols()), BoundProvenance::global};
}

} // namespace l1inf
