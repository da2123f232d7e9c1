#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "l1inf/errors.hpp"

namespace l1inf {

/// Inner l1-ball projection method.
enum class Strategy {
    sort,     ///< sort each column once, grow the support as a prefix
    michelot, ///< active-set elimination with warm-started re-entry tests
};

inline std::string_view to_string(Strategy s) {
    return s == Strategy::sort ? "sort" : "michelot";
}

inline std::optional<Strategy> parse_strategy(std::string_view name) {
    if (name == "sort") {
        return Strategy::sort;
    }
    if (name == "michelot" || name == "active-set") {
        return Strategy::michelot;
    }
    return std::nullopt;
}

/// Projection of a nonnegative vector onto {x >= 0 : sum(x) <= radius}.
///
/// x[j] = max(u[j] - lambda * mu, 0). The support lists, in ascending order,
/// every positive u[j] with u[j] - lambda * mu >= 0; entries sitting exactly
/// on the threshold are members even though they contribute zero.
template <std::floating_point Real>
struct L1BallProjection {
    std::vector<Real> x;
    Real mu = 0;
    std::vector<std::size_t> support;
};

namespace detail {

/// Sort-based projector for one column. The column is sorted once; the
/// support is always a prefix of the descending order and only grows as
/// the radius grows, so repeated calls to update() with a non-decreasing
/// radius cost O(number of newly admitted entries).
template <std::floating_point Real>
class SortedColumnProjector {
public:
    explicit SortedColumnProjector(std::span<const Real> u) : entries_(u.size()) {
        for (std::size_t j = 0; j < u.size(); ++j) {
            entries_[j] = {u[j], j};
        }
        std::stable_sort(entries_.begin(), entries_.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
    }

    /// Requires sum(u) > radius. Returns true if the support changed.
    bool update(Real radius) {
        const std::size_t before = count_;
        if (count_ == 0) {
            count_ = 1;
            sum_ = entries_[0].first;
        }
        while (count_ < entries_.size()) {
            const Real next = entries_[count_].first;
            const Real sum = sum_ + next;
            const Real theta = (sum - radius) / static_cast<Real>(count_ + 1);
            if (next <= 0 || next < theta) {
                break;
            }
            sum_ = sum;
            ++count_;
        }
        theta_ = (sum_ - radius) / static_cast<Real>(count_);
        return count_ != before;
    }

    Real threshold() const noexcept { return theta_; }
    Real support_sum() const noexcept { return sum_; }
    std::size_t support_size() const noexcept { return count_; }

    std::vector<std::size_t> support() const {
        std::vector<std::size_t> out(count_);
        for (std::size_t k = 0; k < count_; ++k) {
            out[k] = entries_[k].second;
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::vector<std::pair<Real, std::size_t>> entries_;
    std::size_t count_ = 0;
    Real sum_ = 0;
    Real theta_ = 0;
};

/// Michelot-style active-set projector for one column.
///
/// The first call starts from the full index set and discards entries below
/// the running threshold until nothing moves. Later calls (non-decreasing
/// radius) keep the previous support, admit excluded entries that clear the
/// new threshold, and re-run the elimination only when something entered.
template <std::floating_point Real>
class ActiveSetColumnProjector {
public:
    explicit ActiveSetColumnProjector(std::span<const Real> u) {
        inside_.reserve(u.size());
        for (std::size_t j = 0; j < u.size(); ++j) {
            inside_.push_back({u[j], j});
            top_ = std::max(top_, u[j]);
        }
    }

    /// Requires sum(u) > radius. Returns true if the support changed.
    bool update(Real radius) {
        bool changed = false;
        if (first_) {
            first_ = false;
            changed = true;
            sum_ = 0;
            for (const auto& e : inside_) {
                sum_ += e.first;
            }
            eliminate(radius);
        } else {
            theta_ = (sum_ - radius) / static_cast<Real>(inside_.size());
            std::size_t kept = 0;
            for (std::size_t k = 0; k < outside_.size(); ++k) {
                if (outside_[k].first > 0 && outside_[k].first >= theta_) {
                    sum_ += outside_[k].first;
                    inside_.push_back(outside_[k]);
                    changed = true;
                } else {
                    outside_[kept++] = outside_[k];
                }
            }
            outside_.resize(kept);
            if (changed) {
                eliminate(radius);
            }
        }
        theta_ = (sum_ - radius) / static_cast<Real>(inside_.size());
        return changed;
    }

    Real threshold() const noexcept { return theta_; }
    Real support_sum() const noexcept { return sum_; }
    std::size_t support_size() const noexcept { return inside_.size(); }

    std::vector<std::size_t> support() const {
        std::vector<std::size_t> out;
        out.reserve(inside_.size());
        for (const auto& e : inside_) {
            out.push_back(e.second);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    // Drop entries strictly below the threshold until stable. The support
    // sum is recomputed from the survivors on every pass. The threshold never
    // exceeds the largest entry in exact arithmetic; clamping keeps rounding
    // from evicting a run of tied maxima when the radius is below ulp scale.
    void eliminate(Real radius) {
        for (;;) {
            theta_ = std::min(top_, (sum_ - radius) / static_cast<Real>(inside_.size()));
            std::size_t kept = 0;
            Real sum = 0;
            for (std::size_t k = 0; k < inside_.size(); ++k) {
                const auto e = inside_[k];
                if (e.first > 0 && e.first >= theta_) {
                    sum += e.first;
                    inside_[kept++] = e;
                } else {
                    outside_.push_back(e);
                }
            }
            const bool removed = kept != inside_.size();
            inside_.resize(kept);
            sum_ = sum;
            if (!removed) {
                return;
            }
            if (inside_.empty()) {
                throw InternalError("l1-ball elimination emptied the support");
            }
        }
    }

    std::vector<std::pair<Real, std::size_t>> inside_;
    std::vector<std::pair<Real, std::size_t>> outside_;
    Real sum_ = 0;
    Real theta_ = 0;
    Real top_ = 0;
    bool first_ = true;
};

} // namespace detail

/// Euclidean projection of u >= 0 onto the l1 ball of the given radius.
/// `lambda` only rescales the reported multiplier (threshold = lambda * mu).
template <std::floating_point Real>
L1BallProjection<Real> project_l1_ball(std::span<const Real> u, Real radius, Strategy strategy,
                                       Real lambda = Real(1)) {
    detail::require(!u.empty(), "project_l1_ball: empty vector");
    detail::require(radius >= 0 && std::isfinite(radius), "project_l1_ball: radius must be >= 0");
    detail::require(lambda > 0 && std::isfinite(lambda), "project_l1_ball: lambda must be > 0");
    Real total = 0;
    for (Real v : u) {
        detail::require(std::isfinite(v), "project_l1_ball: non-finite entry");
        detail::require(v >= 0, "project_l1_ball: entries must be nonnegative");
        total += v;
    }

    L1BallProjection<Real> out;
    if (total <= radius) {
        out.x.assign(u.begin(), u.end());
        for (std::size_t j = 0; j < u.size(); ++j) {
            if (u[j] > 0) {
                out.support.push_back(j);
            }
        }
        return out;
    }

    Real theta = 0;
    if (strategy == Strategy::sort) {
        detail::SortedColumnProjector<Real> p(u);
        p.update(radius);
        theta = p.threshold();
        out.support = p.support();
    } else {
        detail::ActiveSetColumnProjector<Real> p(u);
        p.update(radius);
        theta = p.threshold();
        out.support = p.support();
    }
    out.mu = theta / lambda;
    out.x.resize(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
        out.x[j] = std::max(u[j] - theta, Real(0));
    }
    return out;
}

template <std::floating_point Real>
L1BallProjection<Real> project_l1_ball(const std::vector<Real>& u, Real radius, Strategy strategy,
                                       Real lambda = Real(1)) {
    return project_l1_ball(std::span<const Real>(u), radius, strategy, lambda);
}

} // namespace l1inf
