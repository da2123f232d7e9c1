#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "l1inf/errors.hpp"
#include "l1inf/l1_ball.hpp"
#include "l1inf/lower_bounds.hpp"
#include "l1inf/matrix.hpp"
#include "l1inf/norms.hpp"

namespace l1inf {

/// Column thresholds of the l1,inf prox, without the assembled matrix.
///
/// Column i is soft-thresholded at lambda * mu[i]. mu is zero outside
/// active_cols and sums to one unless the solution is the zero matrix, in
/// which case mu[i] = ||v_i||_inf / lambda (the smallest multipliers that
/// annihilate each column).
template <std::floating_point Real>
struct ProxThresholds {
    Real lambda = 0;
    Real t_star = 0;
    std::vector<Real> mu;
    /// lambda * mu[i], computed directly rather than by multiplying back.
    std::vector<Real> theta;
    std::vector<std::size_t> active_cols;
    /// supports[k] belongs to active_cols[k]; ascending row indices.
    std::vector<std::vector<std::size_t>> supports;
    std::size_t iterations = 0;
    /// t at the start of each outer iteration followed by every update.
    std::vector<Real> t_history;
    LowerBound<Real> initial_bound;
    bool zero_solution = false;
};

template <std::floating_point Real>
struct ProxSolution : ProxThresholds<Real> {
    Matrix<Real> x_star;
};

namespace detail {

template <std::floating_point Real>
Real monotone_slack(Real t) {
    return Real(1e-12) * std::max(Real(1), std::abs(t));
}

template <std::floating_point Real, class Projector>
void run_outer_loop(const Matrix<Real>& v, Real lambda, const std::vector<Real>& col_norms,
                    ProxThresholds<Real>& out) {
    const std::size_t rows = v.rows();

    std::vector<std::size_t> active;
    for (std::size_t c = 0; c < v.cols(); ++c) {
        if (col_norms[c] > out.initial_bound.value) {
            active.push_back(c);
        }
    }
    if (active.empty()) {
        throw InternalError("lower bound froze every column of a non-zero problem");
    }

    // Columns at or below the initial bound are never thresholded and never
    // get a projector.
    std::vector<Projector> projectors;
    projectors.reserve(active.size());
    {
        std::vector<Real> buf(rows);
        for (std::size_t c : active) {
            for (std::size_t r = 0; r < rows; ++r) {
                buf[r] = std::abs(v(r, c));
            }
            projectors.emplace_back(std::span<const Real>(buf));
        }
    }
    // slot[k] indexes projectors for active[k]; both shrink together.
    std::vector<std::size_t> slot(active.size());
    for (std::size_t k = 0; k < slot.size(); ++k) {
        slot[k] = k;
    }

    // Each support can grow at most `rows` times and each column can leave
    // the active set once, so this bound is never reached on exact input.
    const std::size_t max_iterations = active.size() * (rows + 1) + 2;

    Real t = out.initial_bound.value;
    out.t_history.push_back(t);
    for (std::size_t iter = 1;; ++iter) {
        if (iter > max_iterations) {
            throw InternalError("prox outer loop failed to stabilize");
        }
        bool changed = iter == 1;

        std::size_t kept = 0;
        for (std::size_t k = 0; k < active.size(); ++k) {
            if (col_norms[active[k]] > t) {
                active[kept] = active[k];
                slot[kept] = slot[k];
                ++kept;
            }
        }
        if (kept != active.size()) {
            changed = true;
            active.resize(kept);
            slot.resize(kept);
        }
        if (active.empty()) {
            throw InternalError("active column set became empty");
        }

        Real weighted = 0;
        Real weights = 0;
        for (std::size_t k = 0; k < active.size(); ++k) {
            auto& p = projectors[slot[k]];
            changed = p.update(t) || changed;
            const Real inv = Real(1) / static_cast<Real>(p.support_size());
            weighted += p.support_sum() * inv;
            weights += inv;
        }
        out.iterations = iter;
        if (!changed) {
            break;
        }
        const Real next = (weighted - lambda) / weights;
        if (!std::isfinite(next) || next < t - monotone_slack(t)) {
            throw InternalError("t decreased between iterations: " + std::to_string(t) +
                                " -> " + std::to_string(next));
        }
        // A decrease within the slack is rounding in the update.
        t = std::max(t, next);
        out.t_history.push_back(t);
    }

    out.active_cols = active;
    out.supports.reserve(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
        out.supports.push_back(projectors[slot[k]].support());
    }
}

} // namespace detail

/// Per-column thresholds of prox_{lambda ||.||_{1,inf}}(V).
///
/// Starts from the best of the two lower bounds, freezes every column whose
/// l1 norm does not exceed it, then alternates column projections onto the
/// l1 ball of radius t with the closed-form t update until the active
/// columns and their supports stop changing. The final t and multipliers
/// are recomputed from the converged sets with sums taken in index order,
/// so both strategies give bitwise-equal output whenever they agree on
/// the sets.
template <std::floating_point Real>
ProxThresholds<Real> prox_thresholds(const Matrix<Real>& v, Real lambda,
                                     Strategy strategy = Strategy::michelot) {
    detail::require_finite(v, "V");
    detail::require_lambda(lambda);

    ProxThresholds<Real> out;
    out.lambda = lambda;
    out.mu.assign(v.cols(), Real(0));
    out.theta.assign(v.cols(), Real(0));

    const auto col_l1 = column_l1_norms(v);
    const auto col_inf = column_linf_norms(v);
    Real norm_inf1 = 0;
    for (Real x : col_inf) {
        norm_inf1 += x;
    }

    if (norm_inf1 <= lambda) {
        out.zero_solution = true;
        out.initial_bound = {(norm_inf1 - lambda) / static_cast<Real>(v.cols()),
                             BoundProvenance::global};
        for (std::size_t c = 0; c < v.cols(); ++c) {
            if (col_l1[c] > 0) {
                out.mu[c] = col_inf[c] / lambda;
                out.theta[c] = col_inf[c];
                out.active_cols.push_back(c);
                std::vector<std::size_t> argmax;
                for (std::size_t r = 0; r < v.rows(); ++r) {
                    if (std::abs(v(r, c)) == col_inf[c]) {
                        argmax.push_back(r);
                    }
                }
                out.supports.push_back(std::move(argmax));
            }
        }
        return out;
    }

    const Real subset_bound = detail::best_prefix_bound(col_l1, v.rows(), lambda);
    const Real global_bound = (norm_inf1 - lambda) / static_cast<Real>(v.cols());
    if (subset_bound >= global_bound && subset_bound > 0) {
        out.initial_bound = {subset_bound, BoundProvenance::subset_max};
    } else if (global_bound > 0) {
        out.initial_bound = {global_bound, BoundProvenance::global};
    } else {
        out.initial_bound = {Real(0), BoundProvenance::zero_clamp};
    }

    if (strategy == Strategy::sort) {
        detail::run_outer_loop<Real, detail::SortedColumnProjector<Real>>(v, lambda, col_l1, out);
    } else {
        detail::run_outer_loop<Real, detail::ActiveSetColumnProjector<Real>>(v, lambda, col_l1,
                                                                             out);
    }

    std::vector<Real> sums(out.active_cols.size(), Real(0));
    Real weighted = 0;
    Real weights = 0;
    for (std::size_t k = 0; k < out.active_cols.size(); ++k) {
        const std::size_t c = out.active_cols[k];
        for (std::size_t r : out.supports[k]) {
            sums[k] += std::abs(v(r, c));
        }
        const Real inv = Real(1) / static_cast<Real>(out.supports[k].size());
        weighted += sums[k] * inv;
        weights += inv;
    }
    out.t_star = (weighted - lambda) / weights;
    // theta_c = (S_c - t) / k_c rewritten as (lambda + S_c W - A) / (k_c W),
    // which is exactly lambda when a single column is active.
    for (std::size_t k = 0; k < out.active_cols.size(); ++k) {
        const std::size_t c = out.active_cols[k];
        const Real inv = Real(1) / static_cast<Real>(out.supports[k].size());
        const Real share = inv / weights;
        out.theta[c] = std::max(Real(0), (lambda + (sums[k] * weights - weighted)) * share);
        out.mu[c] = std::max(Real(0), (Real(1) + (sums[k] * weights - weighted) / lambda) * share);
    }
    return out;
}

/// prox of lambda * ||.||_{1,inf} at V: each column soft-thresholded at its
/// own level lambda * mu[i]; columns outside the active set pass through.
template <std::floating_point Real>
ProxSolution<Real> prox_l1inf(const Matrix<Real>& v, Real lambda,
                              Strategy strategy = Strategy::michelot) {
    ProxSolution<Real> out;
    static_cast<ProxThresholds<Real>&>(out) = prox_thresholds(v, lambda, strategy);

    if (out.zero_solution) {
        out.x_star = Matrix<Real>(v.rows(), v.cols());
        return out;
    }
    const auto& theta = out.theta;
    out.x_star = v;
    for (std::size_t r = 0; r < v.rows(); ++r) {
        auto row = out.x_star.row(r);
        for (std::size_t c = 0; c < v.cols(); ++c) {
            if (theta[c] > 0) {
                const Real mag = std::abs(row[c]) - theta[c];
                row[c] = mag > 0 ? std::copysign(mag, row[c]) : Real(0);
            }
        }
    }
    return out;
}

/// Projection of V onto the inf,1 ball of radius tau:
/// sign(V) * min(|V|, tau * mu) per column, with mu from the prox of the
/// dual norm at parameter tau. Columns outside the active set have mu = 0
/// and are zeroed.
template <std::floating_point Real>
Matrix<Real> project_linf1(const Matrix<Real>& v, Real tau,
                           Strategy strategy = Strategy::michelot) {
    const auto th = prox_thresholds(v, tau, strategy);
    if (th.zero_solution) {
        return v;
    }
    const auto& cap = th.theta;
    Matrix<Real> out = v;
    for (std::size_t r = 0; r < v.rows(); ++r) {
        auto row = out.row(r);
        for (std::size_t c = 0; c < v.cols(); ++c) {
            if (std::abs(row[c]) > cap[c]) {
                row[c] = std::copysign(cap[c], row[c]);
            }
        }
    }
    return out;
}

} // namespace l1inf
