#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "l1inf/bench.hpp"
#include "l1inf/random.hpp"

using l1inf::Strategy;
namespace bench = l1inf::bench;

TEST(RandomSource, EngineIsStandardMt19937_64) {
    // The C++ standard pins the 10000th output for the default seed.
    l1inf::RandomSource rng(5489u);
    std::uint64_t v = 0;
    for (int i = 0; i < 10000; ++i) {
        v = rng.next();
    }
    EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(GenRandomMatrix, DeterministicPerSeed) {
    EXPECT_EQ(l1inf::gen_random_matrix(7, 5, 123), l1inf::gen_random_matrix(7, 5, 123));
    EXPECT_NE(l1inf::gen_random_matrix(7, 5, 123), l1inf::gen_random_matrix(7, 5, 124));
}

TEST(GenRandomMatrix, UniformStatistics) {
    const auto v = l1inf::gen_random_matrix(1000, 1000, 2024);
    double sum = 0;
    for (double x : v.data()) {
        EXPECT_LE(std::abs(x), 0.5);
        sum += x;
    }
    const double mean = sum / static_cast<double>(v.size());
    const double sigma = 1.0 / std::sqrt(12.0);
    EXPECT_LT(std::abs(mean), 3 * sigma / 1000.0);
}

TEST(GenRandomMatrix, RejectsEmpty) {
    EXPECT_THROW(l1inf::gen_random_matrix(0, 3, 1), l1inf::InvalidInput);
}

TEST(RunBenchmark, RecordCardinalityAndChecksums) {
    bench::BenchConfig cfg;
    cfg.sizes = {{40, 30}};
    cfg.alphas = {1e-3, 1e-2, 1e-1};
    cfg.trials = 1;
    const auto recs = bench::run_benchmark(cfg);
    ASSERT_EQ(recs.size(), cfg.alphas.size() * cfg.methods.size());
    for (std::size_t k = 0; k < recs.size(); k += 2) {
        EXPECT_EQ(recs[k].method, Strategy::sort);
        EXPECT_EQ(recs[k + 1].method, Strategy::michelot);
        EXPECT_NEAR(recs[k].checksum, recs[k + 1].checksum, 1e-9);
        EXPECT_EQ(recs[k].trials, 1u);
        EXPECT_GE(recs[k].seconds_mean, 0.0);
        EXPECT_EQ(recs[k].seconds_std, 0.0);
    }
}

TEST(RunBenchmark, ResultsDeterministicUnderSeed) {
    bench::BenchConfig cfg;
    cfg.sizes = {{30, 30}, {10, 50}};
    cfg.alphas = {1e-2, 0.5};
    cfg.trials = 3;
    const auto a = bench::run_benchmark(cfg);
    const auto b = bench::run_benchmark(cfg);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].checksum, b[k].checksum);
    }
    cfg.seed += 1;
    EXPECT_NE(bench::run_benchmark(cfg)[0].checksum, a[0].checksum);
}

TEST(RunBenchmark, RejectsBadGrid) {
    bench::BenchConfig cfg;
    cfg.sizes = {{10, 10}};
    cfg.alphas = {0.0};
    EXPECT_THROW(bench::run_benchmark(cfg), l1inf::InvalidInput);
    cfg.alphas = {1.5};
    EXPECT_THROW(bench::run_benchmark(cfg), l1inf::InvalidInput);
    cfg.alphas = {0.5};
    cfg.trials = 0;
    EXPECT_THROW(bench::run_benchmark(cfg), l1inf::InvalidInput);
}

TEST(RunBenchmark, FullGridShape) {
    const auto g = bench::full_grid();
    EXPECT_EQ(g.trials, 100u);
    EXPECT_EQ(g.sizes.size(), 4u);
    EXPECT_EQ(g.alphas, (std::vector<double>{1e-4, 1e-3, 1e-2, 1e-1}));
    EXPECT_EQ(std::set(g.sizes.begin(), g.sizes.end()),
              (std::set<std::pair<std::size_t, std::size_t>>{
                  {100, 100}, {1000, 100}, {100, 1000}, {1000, 1000}}));
}

TEST(BenchCsv, HeaderAndNineDigits) {
    bench::BenchRecord r;
    r.n_rows = 100;
    r.n_cols = 1000;
    r.alpha = 1e-3;
    r.method = Strategy::sort;
    r.trials = 20;
    r.seconds_mean = 1.0 / 3.0;
    r.seconds_std = 0.0;
    r.checksum = -12.345678912345;
    std::ostringstream os;
    bench::write_csv(os, {r});
    EXPECT_EQ(os.str(), "n,m,alpha,method,trials,seconds_mean,seconds_std,checksum\n"
                        "100,1000,0.001,sort,20,0.333333333,0,-12.3456789\n");
}
