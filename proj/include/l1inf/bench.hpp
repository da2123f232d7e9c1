#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "l1inf/errors.hpp"
#include "l1inf/l1_ball.hpp"
#include "l1inf/matrix.hpp"
#include "l1inf/norms.hpp"
#include "l1inf/prox.hpp"
#include "l1inf/random.hpp"

namespace l1inf::bench {

struct BenchRecord {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    double alpha = 0;
    Strategy method = Strategy::michelot;
    double seconds_mean = 0;
    double seconds_std = 0;
    double seconds_max = 0; ///< not part of the CSV
    std::size_t trials = 0;
    double checksum = 0;    ///< sum of every projected entry over all trials
};

struct BenchConfig {
    std::vector<std::pair<std::size_t, std::size_t>> sizes{{100, 100}, {1000, 100}, {100, 1000},
                                                           {1000, 1000}};
    std::vector<double> alphas{1e-4, 1e-3, 1e-2, 1e-1};
    std::size_t trials = 20;
    std::vector<Strategy> methods{Strategy::sort, Strategy::michelot};
    std::uint64_t seed = 42;
};

/// The full grid: four sizes, four radius fractions, 100 trials.
inline BenchConfig full_grid() {
    BenchConfig c;
    c.trials = 100;
    return c;
}

/// Seed of trial `trial` at size n x m. Matrices depend only on these, so
/// every alpha and method sees the same inputs.
inline std::uint64_t trial_seed(std::uint64_t seed, std::size_t n, std::size_t m,
                                std::size_t trial) {
    return seed + 0x9E3779B97F4A7C15ULL * (trial + 1) + 0x632BE59BD9B4E019ULL * n +
           0x85EBCA77C2B2AE63ULL * m;
}

inline void validate(const BenchConfig& config) {
    detail::require(config.trials >= 1, "trials must be >= 1");
    detail::require(!config.sizes.empty(), "no sizes given");
    detail::require(!config.alphas.empty(), "no alphas given");
    detail::require(!config.methods.empty(), "no methods given");
    for (auto [n, m] : config.sizes) {
        detail::require(n >= 1 && m >= 1, "sizes must be >= 1");
    }
    for (double a : config.alphas) {
        detail::require(a > 0 && a <= 1, "alphas must lie in (0, 1]");
    }
}

/// Times project_linf1(V, alpha * ||V||_inf,1) for every size, alpha and
/// method. Only the projection call is inside the timed region; one
/// untimed warm-up call is made per configuration.
inline std::vector<BenchRecord> run_benchmark(const BenchConfig& config) {
    validate(config);
    using clock = std::chrono::steady_clock;

    std::vector<BenchRecord> records;
    for (auto [n, m] : config.sizes) {
        const std::size_t first = records.size();
        for (double alpha : config.alphas) {
            for (Strategy method : config.methods) {
                BenchRecord rec;
                rec.n_rows = n;
                rec.n_cols = m;
                rec.alpha = alpha;
                rec.method = method;
                rec.trials = config.trials;
                records.push_back(rec);
            }
        }
        std::vector<std::vector<double>> times(records.size() - first);

        for (std::size_t trial = 0; trial < config.trials; ++trial) {
            const DenseMatrix v = gen_random_matrix(n, m, trial_seed(config.seed, n, m, trial));
            const double norm = mixed_norm_inf1(v);
            std::size_t k = first;
            for (double alpha : config.alphas) {
                const double tau = alpha * norm;
                for (Strategy method : config.methods) {
                    if (trial == 0) {
                        (void)project_linf1(v, tau, method);
                    }
                    const auto start = clock::now();
                    const DenseMatrix p = project_linf1(v, tau, method);
                    const auto stop = clock::now();
                    times[k - first].push_back(std::chrono::duration<double>(stop - start).count());
                    double sum = 0;
                    for (double x : p.data()) {
                        sum += x;
                    }
                    records[k].checksum += sum;
                    ++k;
                }
            }
        }

        for (std::size_t k = first; k < records.size(); ++k) {
            const auto& t = times[k - first];
            double mean = 0;
            double worst = 0;
            for (double s : t) {
                mean += s;
                worst = std::max(worst, s);
            }
            mean /= static_cast<double>(t.size());
            double var = 0;
            for (double s : t) {
                var += (s - mean) * (s - mean);
            }
            records[k].seconds_mean = mean;
            records[k].seconds_std =
                t.size() > 1 ? std::sqrt(var / static_cast<double>(t.size() - 1)) : 0.0;
            records[k].seconds_max = worst;
        }
    }
    return records;
}

inline std::string format_g9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline constexpr const char* csv_header = "n,m,alpha,method,trials,seconds_mean,seconds_std,checksum";

inline void write_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
    os << csv_header << '\n';
    for (const auto& r : records) {
        os << r.n_rows << ',' << r.n_cols << ',' << format_g9(r.alpha) << ',' << to_string(r.method)
           << ',' << r.trials << ',' << format_g9(r.seconds_mean) << ','
           << format_g9(r.seconds_std) << ',' << format_g9(r.checksum) << '\n';
    }
}

/// One line per (size, alpha) with the mean time of each method.
inline void write_summary(std::ostream& os, const std::vector<BenchRecord>& records) {
    std::map<std::tuple<std::size_t, std::size_t, double>, std::vector<const BenchRecord*>> rows;
    std::vector<std::tuple<std::size_t, std::size_t, double>> order;
    for (const auto& r : records) {
        auto key = std::make_tuple(r.n_rows, r.n_cols, r.alpha);
        if (!rows.count(key)) {
            order.push_back(key);
        }
        rows[key].push_back(&r);
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-12s %-8s", "size", "alpha");
    os << buf;
    if (!order.empty()) {
        for (const auto* r : rows[order.front()]) {
            std::snprintf(buf, sizeof buf, " %12s", std::string(to_string(r->method)).c_str());
            os << buf;
        }
    }
    os << '\n';
    for (const auto& key : order) {
        const std::string size =
            std::to_string(std::get<0>(key)) + "x" + std::to_string(std::get<1>(key));
        std::snprintf(buf, sizeof buf, "%-12s %-8.0e", size.c_str(), std::get<2>(key));
        os << buf;
        for (const auto* r : rows[key]) {
            std::snprintf(buf, sizeof buf, " %12.3e", r->seconds_mean);
            os << buf;
        }
        os << '\n';
    }
}

} // namespace l1inf::bench
