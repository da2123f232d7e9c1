#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "l1inf/errors.hpp"
#include "l1inf/matrix.hpp"
#include "l1inf/norms.hpp"
#include "l1inf/prox.hpp"
#include "l1inf/random.hpp"

namespace l1inf::solver {

/// min ||Y - X W^T||_F^2  s.t.  ||W||_inf,1 <= tau
///
/// x is samples x features, y is samples x tasks and the unknown W is
/// tasks x features. The inf,1 groups are the columns of W, one per
/// feature, so a feature is dropped by zeroing its whole column.
struct MultiTaskProblem {
    DenseMatrix x;
    DenseMatrix y;
    double tau = 1.0;
};

enum class StepRule { fixed_inverse_lipschitz, backtracking };

struct SolverConfig {
    std::size_t max_iters = 100000;
    StepRule step_rule = StepRule::fixed_inverse_lipschitz;
    double grad_tol = 1e-8;
    bool history = true;
    Strategy strategy = Strategy::sort;
    std::size_t power_iters = 100;
    /// Overrides the 1/L step of the fixed rule (and the starting step of
    /// backtracking) when set.
    std::optional<double> step_size;
};

struct FitResult {
    DenseMatrix w;
    std::vector<double> objective_history;
    std::size_t iterations = 0;
    std::vector<std::size_t> feature_ranking;
    bool converged = false;
    double step = 0;
    double lipschitz = 0;
};

inline DenseMatrix one_hot_encode(std::span<const long long> labels, std::size_t n_classes) {
    detail::require(n_classes >= 1, "one_hot_encode: n_classes must be >= 1");
    detail::require(!labels.empty(), "one_hot_encode: no labels");
    DenseMatrix out(labels.size(), n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        detail::require(labels[i] >= 0 && static_cast<std::size_t>(labels[i]) < n_classes,
                        "one_hot_encode: label " + std::to_string(labels[i]) + " at row " +
                            std::to_string(i) + " outside [0, " + std::to_string(n_classes) +
                            ")");
        out(i, static_cast<std::size_t>(labels[i])) = 1.0;
    }
    return out;
}

inline DenseMatrix one_hot_encode(const std::vector<long long>& labels, std::size_t n_classes) {
    return one_hot_encode(std::span<const long long>(labels), n_classes);
}

struct Standardization {
    std::vector<double> mean;
    std::vector<double> scale; ///< 1 for zero-variance features
};

/// Centers every column and divides by its population standard deviation.
/// Zero-variance columns are only centered.
inline Standardization standardize(DenseMatrix& x) {
    const std::size_t p = x.rows();
    Standardization s{std::vector<double>(x.cols(), 0.0), std::vector<double>(x.cols(), 1.0)};
    for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            s.mean[c] += x(r, c);
        }
    }
    for (double& mu : s.mean) {
        mu /= static_cast<double>(p);
    }
    std::vector<double> var(x.cols(), 0.0);
    for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            x(r, c) -= s.mean[c];
            var[c] += x(r, c) * x(r, c);
        }
    }
    for (std::size_t c = 0; c < x.cols(); ++c) {
        const double sd = std::sqrt(var[c] / static_cast<double>(p));
        if (sd > 0) {
            s.scale[c] = sd;
        }
    }
    for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            x(r, c) /= s.scale[c];
        }
    }
    return s;
}

/// X W^T, samples x tasks.
inline DenseMatrix predict(const DenseMatrix& x, const DenseMatrix& w) {
    detail::require(x.cols() == w.cols(), "predict: feature count mismatch between X and W");
    DenseMatrix out(x.rows(), w.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto xi = x.row(i);
        for (std::size_t k = 0; k < w.rows(); ++k) {
            auto wk = w.row(k);
            double acc = 0;
            for (std::size_t j = 0; j < x.cols(); ++j) {
                acc += xi[j] * wk[j];
            }
            out(i, k) = acc;
        }
    }
    return out;
}

inline void validate(const MultiTaskProblem& prob) {
    detail::require_finite(prob.x, "X");
    detail::require_finite(prob.y, "Y");
    detail::require(prob.x.rows() == prob.y.rows(),
                    "X has " + std::to_string(prob.x.rows()) + " samples but Y has " +
                        std::to_string(prob.y.rows()));
    detail::require(prob.tau > 0 && std::isfinite(prob.tau), "tau must be > 0");
}

inline void check_w_shape(const MultiTaskProblem& prob, const DenseMatrix& w) {
    detail::require(w.rows() == prob.y.cols() && w.cols() == prob.x.cols(),
                    "W must be tasks x features");
}

/// Residual Y - X W^T.
inline DenseMatrix residual(const MultiTaskProblem& prob, const DenseMatrix& w) {
    DenseMatrix r = predict(prob.x, w);
    auto rd = r.data();
    auto yd = prob.y.data();
    for (std::size_t k = 0; k < rd.size(); ++k) {
        rd[k] = yd[k] - rd[k];
    }
    return r;
}

inline double objective(const MultiTaskProblem& prob, const DenseMatrix& w) {
    check_w_shape(prob, w);
    const double f = frobenius_norm(residual(prob, w));
    return f * f;
}

/// -2 (Y - X W^T)^T X from a precomputed residual.
inline DenseMatrix gradient_from_residual(const MultiTaskProblem& prob, const DenseMatrix& r) {
    DenseMatrix g(r.cols(), prob.x.cols());
    for (std::size_t i = 0; i < r.rows(); ++i) {
        auto xi = prob.x.row(i);
        for (std::size_t k = 0; k < r.cols(); ++k) {
            const double coeff = -2.0 * r(i, k);
            auto gk = g.row(k);
            for (std::size_t j = 0; j < xi.size(); ++j) {
                gk[j] += coeff * xi[j];
            }
        }
    }
    return g;
}

inline DenseMatrix gradient(const MultiTaskProblem& prob, const DenseMatrix& w) {
    check_w_shape(prob, w);
    return gradient_from_residual(prob, residual(prob, w));
}

/// 2 * sigma_max(X)^2 by power iteration on X^T X from a fixed start.
inline double lipschitz_constant(const DenseMatrix& x, std::size_t iters = 100) {
    const std::size_t m = x.cols();
    std::vector<double> v(m);
    RandomSource rng(0x5eed);
    for (double& e : v) {
        e = rng.uniform(0.5, 1.5);
    }
    double eig = 0;
    std::vector<double> xv(x.rows());
    std::vector<double> next(m);
    for (std::size_t it = 0; it < std::max<std::size_t>(iters, 1); ++it) {
        double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
        if (norm == 0) {
            return 0;
        }
        for (double& e : v) {
            e /= norm;
        }
        for (std::size_t i = 0; i < x.rows(); ++i) {
            auto xi = x.row(i);
            xv[i] = std::inner_product(xi.begin(), xi.end(), v.begin(), 0.0);
        }
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < x.rows(); ++i) {
            auto xi = x.row(i);
            for (std::size_t j = 0; j < m; ++j) {
                next[j] += xi[j] * xv[i];
            }
        }
        eig = std::inner_product(v.begin(), v.end(), next.begin(), 0.0);
        v.swap(next);
    }
    return 2.0 * eig;
}

/// Feature indices by decreasing l2 norm of the matching column of W;
/// ties keep ascending index order.
inline std::vector<std::size_t> rank_features(const DenseMatrix& w) {
    detail::require_finite(w, "W");
    std::vector<double> norms(w.cols(), 0.0);
    for (std::size_t r = 0; r < w.rows(); ++r) {
        for (std::size_t c = 0; c < w.cols(); ++c) {
            norms[c] += w(r, c) * w(r, c);
        }
    }
    std::vector<std::size_t> order(w.cols());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });
    return order;
}

/// Row-wise argmax of X W^T; ties go to the lowest class index.
inline std::vector<std::size_t> classify(const DenseMatrix& x, const DenseMatrix& w) {
    const DenseMatrix scores = predict(x, w);
    std::vector<std::size_t> out(scores.rows());
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        auto row = scores.row(i);
        out[i] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return out;
}

inline double accuracy(std::span<const std::size_t> predicted, std::span<const long long> labels) {
    detail::require(predicted.size() == labels.size(), "accuracy: length mismatch");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        hits += static_cast<long long>(predicted[i]) == labels[i];
    }
    return static_cast<double>(hits) / static_cast<double>(labels.size());
}

namespace internal {

inline void projected_step(const DenseMatrix& w, const DenseMatrix& grad, double step, double tau,
                           Strategy strategy, DenseMatrix& out) {
    out = w;
    auto od = out.data();
    auto gd = grad.data();
    for (std::size_t k = 0; k < od.size(); ++k) {
        od[k] -= step * gd[k];
        if (!std::isfinite(od[k])) {
            throw DivergenceError("gradient step overflowed; the step size is too large");
        }
    }
    out = project_linf1(out, tau, strategy);
}

inline void check_finite_objective(double f, std::size_t iter) {
    if (!std::isfinite(f)) {
        throw DivergenceError("objective became non-finite at iteration " + std::to_string(iter) +
                              "; the step size is too large");
    }
}

} // namespace internal

/// Projected gradient descent on the inf,1-constrained multi-task least
/// squares problem. Stops when the gradient-mapping norm
/// ||W_k - W_{k+1}||_F / step drops to config.grad_tol or after
/// config.max_iters iterations. Every iterate, and the result, is feasible.
inline FitResult pgd_fit(const MultiTaskProblem& prob, const SolverConfig& config,
                         const std::optional<DenseMatrix>& initial = std::nullopt) {
    validate(prob);
    l1inf::detail::require(config.max_iters >= 1, "max_iters must be >= 1");
    l1inf::detail::require(config.grad_tol > 0, "grad_tol must be > 0");

    FitResult out;
    DenseMatrix w(prob.y.cols(), prob.x.cols());
    if (initial) {
        check_w_shape(prob, *initial);
        w = project_linf1(*initial, prob.tau, config.strategy);
    }

    out.lipschitz = lipschitz_constant(prob.x, config.power_iters);
    double step = out.lipschitz > 0 ? 1.0 / out.lipschitz : 1.0;
    if (config.step_size) {
        l1inf::detail::require(*config.step_size > 0, "step size must be > 0");
        step = *config.step_size;
    }

    DenseMatrix r = residual(prob, w);
    double f = std::pow(frobenius_norm(r), 2);
    internal::check_finite_objective(f, 0);
    if (config.history) {
        out.objective_history.push_back(f);
    }

    DenseMatrix next;
    for (std::size_t iter = 1; iter <= config.max_iters; ++iter) {
        const DenseMatrix grad = gradient_from_residual(prob, r);
        DenseMatrix r_next;
        double f_next = 0;
        if (config.step_rule == StepRule::fixed_inverse_lipschitz) {
            internal::projected_step(w, grad, step, prob.tau, config.strategy, next);
            r_next = residual(prob, next);
            f_next = std::pow(frobenius_norm(r_next), 2);
        } else {
            // Halve until the quadratic upper model at W majorizes f.
            for (int halvings = 0;; ++halvings) {
                internal::projected_step(w, grad, step, prob.tau, config.strategy, next);
                r_next = residual(prob, next);
                f_next = std::pow(frobenius_norm(r_next), 2);
                double lin = 0;
                double quad = 0;
                auto nd = next.data();
                auto wd = w.data();
                auto gd = grad.data();
                for (std::size_t k = 0; k < nd.size(); ++k) {
                    const double d = nd[k] - wd[k];
                    lin += gd[k] * d;
                    quad += d * d;
                }
                if (!std::isfinite(f_next) || f_next > f + lin + quad / (2 * step)) {
                    if (halvings > 200) {
                        internal::check_finite_objective(f_next, iter);
                        break;
                    }
                    step /= 2;
                    continue;
                }
                break;
            }
        }
        internal::check_finite_objective(f_next, iter);

        double move = 0;
        auto nd = next.data();
        auto wd = w.data();
        for (std::size_t k = 0; k < nd.size(); ++k) {
            move += (nd[k] - wd[k]) * (nd[k] - wd[k]);
        }
        const double grad_map = std::sqrt(move) / step;

        std::swap(w, next);
        std::swap(r, r_next);
        f = f_next;
        out.iterations = iter;
        if (config.history) {
            out.objective_history.push_back(f);
        }
        if (grad_map <= config.grad_tol) {
            out.converged = true;
            break;
        }
    }
    out.step = step;
    out.feature_ranking = rank_features(w);
    out.w = std::move(w);
    return out;
}

/// Synthetic instance with a known answer: Gaussian X, a W with only
/// `support` non-zero feature columns, Y = X W^T and tau = ||W||_inf,1.
struct PlantedInstance {
    MultiTaskProblem problem;
    DenseMatrix w_true;
    std::vector<std::size_t> support;
    std::vector<long long> labels; ///< argmax of each row of Y
};

inline PlantedInstance make_planted_instance(std::size_t samples, std::size_t features,
                                             std::size_t tasks, std::size_t support,
                                             std::uint64_t seed) {
    l1inf::detail::require(support >= 1 && support <= features,
                           "planted support must be in [1, features]");
    l1inf::detail::require(tasks >= 1, "planted instance needs at least one task");
    PlantedInstance inst;
    inst.problem.x = gen_gaussian_matrix(samples, features, seed);

    RandomSource rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> idx(features);
    std::iota(idx.begin(), idx.end(), std::size_t(0));
    for (std::size_t k = 0; k < support; ++k) {
        const std::size_t pick = k + static_cast<std::size_t>(rng.next() % (features - k));
        std::swap(idx[k], idx[pick]);
    }
    inst.support.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(support));
    std::sort(inst.support.begin(), inst.support.end());

    inst.w_true = DenseMatrix(tasks, features);
    for (std::size_t c : inst.support) {
        for (std::size_t k = 0; k < tasks; ++k) {
            const double mag = rng.uniform(0.5, 1.5);
            inst.w_true(k, c) = rng.uniform01() < 0.5 ? -mag : mag;
        }
    }
    inst.problem.y = predict(inst.problem.x, inst.w_true);
    inst.problem.tau = mixed_norm_inf1(inst.w_true);
    inst.labels.resize(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        auto row = inst.problem.y.row(i);
        inst.labels[i] = std::max_element(row.begin(), row.end()) - row.begin();
    }
    return inst;
}

/// Labelled data where class c is marked by a mean shift of `shift` on one
/// planted feature. Labels cycle through the classes in sample order.
struct PlantedClassification {
    DenseMatrix x;
    std::vector<long long> labels;
    std::vector<std::size_t> support; ///< support[c] is the feature of class c
};

inline PlantedClassification make_planted_classification(std::size_t samples,
                                                         std::size_t features,
                                                         std::size_t classes,
                                                         std::uint64_t seed,
                                                         double shift = 3.0) {
    l1inf::detail::require(classes >= 1 && classes <= features,
                           "planted classes must be in [1, features]");
    PlantedClassification out;
    out.x = gen_gaussian_matrix(samples, features, seed);
    RandomSource rng(seed ^ 0xd1b54a32d192ed03ULL);
    std::vector<std::size_t> idx(features);
    std::iota(idx.begin(), idx.end(), std::size_t(0));
    for (std::size_t k = 0; k < classes; ++k) {
        const std::size_t pick = k + static_cast<std::size_t>(rng.next() % (features - k));
        std::swap(idx[k], idx[pick]);
    }
    out.support.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(classes));
    out.labels.resize(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const std::size_t c = i % classes;
        out.labels[i] = static_cast<long long>(c);
        out.x(i, out.support[c]) += shift;
    }
    return out;
}

/// Features whose column of W is not identically zero, ascending.
inline std::vector<std::size_t> nonzero_features(const DenseMatrix& w) {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < w.cols(); ++c) {
        for (std::size_t r = 0; r < w.rows(); ++r) {
            if (w(r, c) != 0) {
                out.push_back(c);
                break;
            }
        }
    }
    return out;
}

} // namespace l1inf::solver
