#pragma once

// Reference solvers for validating the prox. Deliberately slow and simple;
// nothing here shares code with prox.hpp or l1_ball.hpp.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "l1inf/errors.hpp"
#include "l1inf/matrix.hpp"

namespace l1inf::oracle {

template <std::floating_point Real>
struct OracleResult {
    Matrix<Real> x_star;
    Real t_star = 0;
    /// KKT violation expressed in units of t (bisection), or the largest
    /// slack violation of the chosen candidate (enumeration). Set to +inf
    /// by the enumerator when two candidates tie on the objective.
    Real residual = 0;
    std::vector<Real> mu;
    std::vector<std::size_t> active_cols;
    std::vector<std::vector<std::size_t>> supports;
};

namespace detail {

template <std::floating_point Real>
std::vector<std::vector<Real>> abs_columns(const Matrix<Real>& v) {
    std::vector<std::vector<Real>> cols(v.cols(), std::vector<Real>(v.rows()));
    for (std::size_t c = 0; c < v.cols(); ++c) {
        for (std::size_t r = 0; r < v.rows(); ++r) {
            cols[c][r] = std::abs(v(r, c));
        }
    }
    return cols;
}

template <std::floating_point Real>
Real sum_of(const std::vector<Real>& u) {
    Real s = 0;
    for (Real x : u) {
        s += x;
    }
    return s;
}

/// Threshold theta with sum_j max(u_j - theta, 0) == radius, by trying every
/// candidate support size k on the descending order and keeping the one
/// whose threshold is consistent (u_(k) >= theta > u_(k+1)). Zero if u is
/// already inside the ball.
template <std::floating_point Real>
Real simplex_threshold(std::vector<Real> u, Real radius) {
    if (sum_of(u) <= radius) {
        return 0;
    }
    std::sort(u.begin(), u.end(), [](Real a, Real b) { return a > b; });
    Real best = 0;
    Real prefix = 0;
    for (std::size_t k = 1; k <= u.size(); ++k) {
        prefix += u[k - 1];
        const Real theta = (prefix - radius) / static_cast<Real>(k);
        // The consistent k is also the one with the largest theta.
        best = std::max(best, theta);
    }
    return best;
}

} // namespace detail

/// phi(t) = sum_i theta_i(t) / lambda where theta_i(t) is the threshold that
/// projects column i onto the l1 ball of radius t. Continuous and
/// non-increasing in t; equals one at the optimal t of a non-zero prox.
template <std::floating_point Real>
Real multiplier_sum(const Matrix<Real>& v, Real lambda, Real t) {
    Real phi = 0;
    for (const auto& u : detail::abs_columns(v)) {
        phi += detail::simplex_threshold(u, t) / lambda;
    }
    return phi;
}

/// Bisection on t over [0, ||V||_{1,inf}] for the smallest t with
/// phi(t) <= 1, then per-column projection onto the l1 ball of radius t.
template <std::floating_point Real>
OracleResult<Real> oracle_prox_bisection(const Matrix<Real>& v, Real lambda, Real tol) {
    l1inf::detail::require_finite(v, "V");
    l1inf::detail::require(lambda > 0 && std::isfinite(lambda), "lambda must be > 0");
    l1inf::detail::require(tol > 0 && std::isfinite(tol), "tol must be > 0");

    const auto cols = detail::abs_columns(v);
    Real upper = 0;
    Real inf1 = 0;
    for (const auto& u : cols) {
        upper = std::max(upper, detail::sum_of(u));
        inf1 += *std::max_element(u.begin(), u.end());
    }

    OracleResult<Real> out;
    out.mu.assign(v.cols(), Real(0));
    if (inf1 <= lambda) {
        out.x_star = Matrix<Real>(v.rows(), v.cols());
        return out;
    }

    Real lo = 0;
    Real hi = upper;
    constexpr int max_steps = 200;
    int step = 0;
    for (; step < max_steps && hi - lo > tol; ++step) {
        const Real mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) {
            break; // bracket is down to adjacent floats
        }
        if (multiplier_sum(v, lambda, mid) <= 1) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if (hi - lo > tol && step == max_steps) {
        throw InternalError("bisection oracle exceeded its iteration cap");
    }

    const Real t = hi;
    out.t_star = t;
    out.x_star = Matrix<Real>(v.rows(), v.cols());
    Real phi = 0;
    Real slope = 0;
    Real feasibility = 0;
    for (std::size_t c = 0; c < v.cols(); ++c) {
        const Real theta = detail::simplex_threshold(cols[c], t);
        out.mu[c] = theta / lambda;
        phi += out.mu[c];
        Real l1 = 0;
        std::vector<std::size_t> support;
        for (std::size_t r = 0; r < v.rows(); ++r) {
            const Real mag = std::max(cols[c][r] - theta, Real(0));
            out.x_star(r, c) = mag > 0 ? std::copysign(mag, v(r, c)) : Real(0);
            l1 += mag;
            if (theta > 0 && cols[c][r] > 0 && cols[c][r] >= theta) {
                support.push_back(r);
            }
        }
        feasibility = std::max(feasibility, l1 - t);
        if (theta > 0) {
            slope += Real(1) / (lambda * static_cast<Real>(support.size()));
            out.active_cols.push_back(c);
            out.supports.push_back(std::move(support));
        }
    }
    out.residual = std::max(slope > 0 ? std::abs(phi - 1) / slope : Real(0), feasibility);
    return out;
}

/// Maximum n * m the exhaustive enumerator accepts.
inline constexpr std::size_t enumerate_budget = 16;

/// Exhaustive search over every (active column set, per-column support)
/// pair. For each candidate the closed-form t and multipliers are solved,
/// the full KKT system is checked, and the feasible candidate with the
/// smallest prox objective t + ||X - U||_F^2 / (2 lambda) is returned.
template <std::floating_point Real>
OracleResult<Real> oracle_prox_enumerate(const Matrix<Real>& v, Real lambda) {
    l1inf::detail::require_finite(v, "V");
    l1inf::detail::require(lambda > 0 && std::isfinite(lambda), "lambda must be > 0");
    l1inf::detail::require(v.rows() * v.cols() <= enumerate_budget,
                           "oracle_prox_enumerate: matrix exceeds the enumeration budget");

    const std::size_t n = v.rows();
    const std::size_t m = v.cols();
    const auto cols = detail::abs_columns(v);

    OracleResult<Real> out;
    out.mu.assign(m, Real(0));
    Real inf1 = 0;
    Real scale = 0;
    for (const auto& u : cols) {
        inf1 += *std::max_element(u.begin(), u.end());
        scale = std::max(scale, detail::sum_of(u));
    }
    if (inf1 <= lambda) {
        out.x_star = Matrix<Real>(n, m);
        return out;
    }
    const Real eps = Real(1e-12) * std::max(Real(1), scale);

    // Per column a code in [0, 2^n]: 0 means "not active", otherwise the
    // support mask is code. Codes are walked like an odometer, which gives
    // lexicographic order over the candidate sets.
    const std::uint32_t codes = (std::uint32_t(1) << n);
    std::vector<std::uint32_t> code(m, 0);

    bool found = false;
    Real best_obj = std::numeric_limits<Real>::infinity();
    Real best_slack = 0;
    bool tie = false;
    std::vector<std::uint32_t> best_code;
    Real best_t = 0;
    std::vector<Real> best_mu;

    std::vector<Real> mu(m);
    for (;;) {
        // advance odometer
        std::size_t pos = 0;
        while (pos < m && ++code[pos] == codes) {
            code[pos] = 0;
            ++pos;
        }
        if (pos == m) {
            break;
        }

        Real weighted = 0;
        Real weights = 0;
        std::vector<Real> sums(m, Real(0));
        std::vector<std::size_t> sizes(m, 0);
        for (std::size_t c = 0; c < m; ++c) {
            if (code[c] == 0) {
                continue;
            }
            for (std::size_t r = 0; r < n; ++r) {
                if (code[c] & (std::uint32_t(1) << r)) {
                    sums[c] += cols[c][r];
                    ++sizes[c];
                }
            }
            weighted += sums[c] / static_cast<Real>(sizes[c]);
            weights += Real(1) / static_cast<Real>(sizes[c]);
        }
        const Real t = (weighted - lambda) / weights;
        if (t < -eps) {
            continue;
        }

        bool ok = true;
        Real slack = 0;
        Real obj = t;
        for (std::size_t c = 0; c < m && ok; ++c) {
            if (code[c] == 0) {
                mu[c] = 0;
                // x_c = u_c must satisfy the norm constraint
                const Real l1 = detail::sum_of(cols[c]);
                slack = std::max(slack, l1 - t);
                ok = l1 <= t + eps;
                continue;
            }
            const Real theta = (sums[c] - t) / static_cast<Real>(sizes[c]);
            mu[c] = theta / lambda;
            slack = std::max(slack, -theta);
            ok = theta >= -eps;
            for (std::size_t r = 0; r < n && ok; ++r) {
                const Real gap = cols[c][r] - theta;
                if (code[c] & (std::uint32_t(1) << r)) {
                    // member: must survive thresholding (x >= 0)
                    slack = std::max(slack, -gap);
                    ok = gap >= -eps;
                    obj += theta * theta / (2 * lambda);
                } else {
                    // non-member: sigma = (theta - u) / lambda >= 0
                    slack = std::max(slack, gap);
                    ok = gap <= eps;
                    obj += cols[c][r] * cols[c][r] / (2 * lambda);
                }
            }
        }
        if (!ok) {
            continue;
        }
        if (found && std::abs(obj - best_obj) <= Real(1e-12) * std::max(Real(1), best_obj)) {
            tie = true;
            continue;
        }
        if (obj < best_obj) {
            found = true;
            tie = false;
            best_obj = obj;
            best_slack = slack;
            best_code = code;
            best_t = t;
            best_mu = mu;
        }
    }
    if (!found) {
        throw InternalError("enumeration found no KKT point");
    }

    out.t_star = best_t;
    out.mu = best_mu;
    out.residual = tie ? std::numeric_limits<Real>::infinity() : std::max(Real(0), best_slack);
    out.x_star = Matrix<Real>(n, m);
    for (std::size_t c = 0; c < m; ++c) {
        if (best_code[c] == 0) {
            for (std::size_t r = 0; r < n; ++r) {
                out.x_star(r, c) = v(r, c);
            }
            continue;
        }
        const Real theta = lambda * best_mu[c];
        std::vector<std::size_t> support;
        for (std::size_t r = 0; r < n; ++r) {
            const Real mag = std::max(cols[c][r] - theta, Real(0));
            out.x_star(r, c) = mag > 0 ? std::copysign(mag, v(r, c)) : Real(0);
            if (best_code[c] & (std::uint32_t(1) << r)) {
                support.push_back(r);
            }
        }
        out.active_cols.push_back(c);
        out.supports.push_back(std::move(support));
    }
    return out;
}

} // namespace l1inf::oracle
