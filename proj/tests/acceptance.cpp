// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli_runner.hpp"
#include "l1inf/l1inf.hpp"
#include "support.hpp"

using l1inf::DenseMatrix;
using l1inf::Strategy;
namespace t = l1inf::testing;

namespace {

constexpr Strategy kStrategies[] = {Strategy::sort, Strategy::michelot};

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) {
            detail = why;
        }
        pass = false;
    }
};

int failures = 0;

void report(const char* name, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out.fail(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %-22s %6.2fs  %s\n", out.pass ? "PASS" : "FAIL", name, secs,
                out.detail.c_str());
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point s) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - s).count();
}

struct Case {
    DenseMatrix v;
    double lambda;
};

// Sizes up to 200 x 200, lambda a log-uniform fraction of ||V||_inf,1 so a
// few cases land on the zero solution.
std::vector<Case> medium_cases(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    std::vector<Case> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const auto n = t::uniform_index(rng, 1, 200);
        const auto m = t::uniform_index(rng, 1, 200);
        const double scale = t::log_uniform(rng, 1e-2, 1e2);
        auto v = t::random_matrix(rng, n, m, scale);
        const double lambda = t::log_uniform(rng, 1e-4, 1.2) * l1inf::mixed_norm_inf1(v);
        out.push_back({std::move(v), lambda});
    }
    return out;
}

Outcome oracle_equivalence() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(0xACCE55);
    double worst_exact = 0;
    double worst_bisect = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const auto n = t::uniform_index(rng, 1, 4);
        const auto m = t::uniform_index(rng, 1, 4);
        const auto v = t::random_matrix(rng, n, m);
        const double lambda = t::log_uniform(rng, 1e-3, 10.0);
        const auto exact = l1inf::oracle::oracle_prox_enumerate(v, lambda);
        const auto bisect = l1inf::oracle::oracle_prox_bisection(v, lambda, 1e-13);
        for (Strategy s : kStrategies) {
            const auto sol = l1inf::prox_l1inf(v, lambda, s);
            const double de = l1inf::max_abs_diff(sol.x_star, exact.x_star);
            const double db = l1inf::max_abs_diff(sol.x_star, bisect.x_star);
            worst_exact = std::max(worst_exact, de);
            worst_bisect = std::max(worst_bisect, db);
            if (!(de <= 1e-10)) {
                o.fail(fmt("trial %.0f: enumerate diff %.3g", trial, de));
            }
            if (!(db <= 1e-8)) {
                o.fail(fmt("trial %.0f: bisection diff %.3g", trial, db));
            }
            if (!sol.zero_solution &&
                (sol.active_cols != exact.active_cols || sol.supports != exact.supports)) {
                o.fail(fmt("trial %.0f: support mismatch", trial));
            }
        }
    }
    const double secs = seconds_since(start);
    if (secs >= 60) {
        o.fail(fmt("runtime %.1fs >= 60s", secs));
    }
    if (o.pass) {
        o.detail = fmt("2000 matrices; max diff enumerate %.2g, bisection %.2g", worst_exact,
                       worst_bisect);
    }
    return o;
}

Outcome moreau_identity(const std::vector<Case>& cases) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    double worst = 0;
    for (std::size_t k = 0; k < cases.size(); ++k) {
        const auto& [v, lambda] = cases[k];
        for (Strategy s : kStrategies) {
            const auto x = l1inf::prox_l1inf(v, lambda, s).x_star;
            const auto p = l1inf::project_linf1(v, lambda, s);
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double d = std::abs(x.data()[i] + p.data()[i] - v.data()[i]);
                worst = std::max(worst, d);
            }
        }
    }
    const double secs = seconds_since(start);
    if (!(worst <= 1e-12)) {
        o.fail(fmt("max |prox + proj - V| = %.3g", worst));
    }
    if (secs >= 30) {
        o.fail(fmt("runtime %.1fs >= 30s", secs));
    }
    if (o.pass) {
        o.detail = fmt("%.0f matrices; max residual %.2g", static_cast<double>(cases.size()), worst);
    }
    return o;
}

Outcome kkt_suite(const std::vector<Case>& cases) {
    Outcome o;
    double worst_mu = 0;
    double worst_norm = 0;
    std::size_t zero = 0;
    for (std::size_t k = 0; k < cases.size(); ++k) {
        const auto& [v, lambda] = cases[k];
        const double lb_subset = l1inf::maximize_lower_bound(v, lambda).value;
        const double lb_global = l1inf::lower_bound_global(v, lambda).value;
        for (Strategy s : kStrategies) {
            const auto sol = l1inf::prox_l1inf(v, lambda, s);
            const auto& x = sol.x_star;
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double xi = x.data()[i];
                const double vi = v.data()[i];
                if (std::abs(xi) > std::abs(vi) || (xi != 0 && (xi > 0) != (vi > 0))) {
                    o.fail(fmt("case %.0f: sign or magnitude violated", k));
                }
            }
            for (std::size_t h = 1; h < sol.t_history.size(); ++h) {
                if (sol.t_history[h] < sol.t_history[h - 1]) {
                    o.fail(fmt("case %.0f: t decreased at step %.0f", k, h));
                }
            }
            if (sol.zero_solution) {
                zero += s == Strategy::sort;
                continue;
            }
            double mu_sum = 0;
            for (double mu : sol.mu) {
                mu_sum += mu;
            }
            worst_mu = std::max(worst_mu, std::abs(mu_sum - 1));
            const auto norms = l1inf::column_l1_norms(x);
            for (std::size_t c : sol.active_cols) {
                worst_norm = std::max(worst_norm, std::abs(norms[c] - sol.t_star));
            }
            for (std::size_t c = 0; c < norms.size(); ++c) {
                if (norms[c] > sol.t_star + 1e-10) {
                    o.fail(fmt("case %.0f: column %.0f norm above t*", k, c));
                }
            }
            if (lb_subset > sol.t_star + 1e-12 || lb_global > sol.t_star + 1e-12) {
                o.fail(fmt("case %.0f: lower bound %.17g exceeds t* %.17g", k,
                           std::max(lb_subset, lb_global), sol.t_star));
            }
        }
    }
    if (!(worst_mu <= 1e-10)) {
        o.fail(fmt("|sum mu - 1| = %.3g", worst_mu));
    }
    if (!(worst_norm <= 1e-10)) {
        o.fail(fmt("active column l1 norm off t* by %.3g", worst_norm));
    }
    if (o.pass) {
        o.detail = fmt("max |sum mu - 1| %.2g, max |norm - t*| %.2g, %.0f zero solutions",
                       worst_mu, worst_norm, static_cast<double>(zero));
    }
    return o;
}

Outcome closed_form() {
    Outcome o;
    for (Strategy s : kStrategies) {
        const auto a = l1inf::prox_l1inf(DenseMatrix{{4, 1}, {2, 1}}, 1.0, s);
        if (a.t_star != 4.0 || a.x_star != DenseMatrix{{3, 1}, {1, 1}}) {
            o.fail("[[4,1],[2,1]] fixture");
        }
        const auto b = l1inf::prox_l1inf(DenseMatrix{{2, 2}, {0, 0}}, 1.0, s);
        if (b.t_star != 1.5 || b.x_star != DenseMatrix{{1.5, 1.5}, {0, 0}}) {
            o.fail("[[2,2],[0,0]] fixture");
        }
        for (double lambda : {5.0, 6.0, 100.0}) {
            const auto z = l1inf::prox_l1inf(DenseMatrix{{4, 1}, {2, 1}}, lambda, s);
            if (!z.zero_solution || z.x_star != DenseMatrix(2, 2)) {
                o.fail("lambda >= ||V||_inf,1 does not give zero");
            }
        }
    }
    std::mt19937_64 rng(0xC0FFEE);
    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = t::uniform_index(rng, 1, 200);
        const auto v = t::random_matrix(rng, n, 1, t::log_uniform(rng, 1e-2, 1e2));
        double vmax = 0;
        for (double x : v.data()) {
            vmax = std::max(vmax, std::abs(x));
        }
        const double lambda = t::log_uniform(rng, 1e-3, 1.5) * vmax;
        for (Strategy s : kStrategies) {
            const auto x = l1inf::prox_l1inf(v, lambda, s).x_star;
            for (std::size_t i = 0; i < n; ++i) {
                const double vi = v.data()[i];
                const double ref = std::copysign(std::max(std::abs(vi) - lambda, 0.0), vi);
                worst = std::max(worst, std::abs(x.data()[i] - ref));
            }
        }
    }
    if (!(worst <= 1e-14)) {
        o.fail(fmt("single column differs from soft-thresholding by %.3g", worst));
    }
    if (o.pass) {
        o.detail = fmt("fixtures exact; 1000 single columns, max diff %.2g", worst);
    }
    return o;
}

Outcome strategy_equivalence() {
    Outcome o;
    const auto cases = medium_cases(0x5717, 1000);
    double worst = 0;
    for (const auto& [v, lambda] : cases) {
        const auto a = l1inf::prox_l1inf(v, lambda, Strategy::sort);
        const auto b = l1inf::prox_l1inf(v, lambda, Strategy::michelot);
        worst = std::max(worst, l1inf::max_abs_diff(a.x_star, b.x_star));
    }
    if (!(worst <= 1e-12)) {
        o.fail(fmt("max |sort - michelot| = %.3g", worst));
    } else {
        o.detail = fmt("1000 matrices; max diff %.2g", worst);
    }
    return o;
}

Outcome benchmark_trend() {
    Outcome o;
    l1inf::bench::BenchConfig cfg;
    cfg.sizes = {{1000, 1000}};
    cfg.alphas = {1e-4, 1e-3, 1e-2, 1e-1};
    cfg.trials = 20;
    const auto recs = l1inf::bench::run_benchmark(cfg);
    std::ostringstream detail;
    double slowest = 0;
    for (Strategy s : cfg.methods) {
        std::vector<double> means;
        for (const auto& r : recs) {
            if (r.method == s) {
                means.push_back(r.seconds_mean);
                slowest = std::max(slowest, r.seconds_max);
            }
        }
        int inversions = 0;
        for (std::size_t k = 1; k < means.size(); ++k) {
            inversions += means[k] < means[k - 1];
        }
        if (inversions > 1) {
            o.fail(std::string(l1inf::to_string(s)) + " mean time not monotone in alpha");
        }
        detail << l1inf::to_string(s) << " means";
        for (double m : means) {
            detail << ' ' << fmt("%.3g", m);
        }
        detail << " (" << inversions << " inversions); ";
    }
    if (!(slowest < 1.0)) {
        o.fail(fmt("slowest projection %.3gs", slowest));
    }
    detail << "slowest " << fmt("%.3g", slowest) << "s";
    if (o.pass) {
        o.detail = detail.str();
    }
    return o;
}

Outcome solver_recovery() {
    namespace solver = l1inf::solver;
    Outcome o;
    const auto inst = solver::make_planted_instance(200, 50, 3, 5, 1);
    solver::SolverConfig cfg;
    cfg.max_iters = 100000;
    const auto fit = solver::pgd_fit(inst.problem, cfg);
    DenseMatrix diff = fit.w;
    for (std::size_t k = 0; k < diff.size(); ++k) {
        diff.data()[k] -= inst.w_true.data()[k];
    }
    const double err = l1inf::frobenius_norm(diff);
    const double acc = solver::accuracy(solver::classify(inst.problem.x, fit.w), inst.labels);
    if (!(err <= 1e-4)) {
        o.fail(fmt("Frobenius error %.3g", err));
    }
    if (acc != 1.0) {
        o.fail(fmt("training accuracy %.4f", acc));
    }
    if (fit.iterations > 100000) {
        o.fail("iteration cap exceeded");
    }
    const auto& h = fit.objective_history;
    for (std::size_t k = 1; k < h.size(); ++k) {
        if (h[k] > h[k - 1]) {
            o.fail(fmt("objective rose at iteration %.0f", k));
            break;
        }
    }

    std::mt19937_64 rng(0x6AD);
    const auto w = t::random_matrix(rng, inst.problem.y.cols(), inst.problem.x.cols());
    const auto g = solver::gradient(inst.problem, w);
    const double step = 1e-6;
    double num = 0;
    double den = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        DenseMatrix plus = w;
        DenseMatrix minus = w;
        plus.data()[k] += step;
        minus.data()[k] -= step;
        const double fd =
            (solver::objective(inst.problem, plus) - solver::objective(inst.problem, minus)) /
            (2 * step);
        num += (fd - g.data()[k]) * (fd - g.data()[k]);
        den += g.data()[k] * g.data()[k];
    }
    const double rel = std::sqrt(num / den);
    if (!(rel <= 1e-5)) {
        o.fail(fmt("finite-difference gradient error %.3g", rel));
    }
    if (o.pass) {
        o.detail = fmt("error %.2g after %.0f iterations; gradient rel. error %.2g", err,
                       static_cast<double>(fit.iterations), rel);
    }
    return o;
}

Outcome cli_contract() {
    Outcome o;
    const auto dir = t::scratch_dir("cli");
    auto path = [&](const char* name) { return t::q(dir / name); };

    std::mt19937_64 rng(0xC11);
    DenseMatrix r(17, 23);
    for (double& x : r.data()) {
        std::uint64_t bits = 0;
        do {
            bits = rng();
            std::memcpy(&x, &bits, sizeof x);
        } while (!std::isfinite(x));
    }
    l1inf::io::write_matrix_csv((dir / "r.csv").string(), r);
    const auto back = l1inf::io::read_matrix_csv((dir / "r.csv").string());
    if (std::memcmp(back.data().data(), r.data().data(), r.size() * sizeof(double)) != 0) {
        o.fail("matrix CSV round trip is lossy");
    }

    const auto u = l1inf::gen_random_matrix(31, 19, 5);
    l1inf::io::write_matrix_csv((dir / "u.csv").string(), u);
    if (t::run_cli("prox -i " + path("u.csv") + " -l 0.7 -o " + path("ux.csv") + " --meta " +
                   path("um.json")) != 0) {
        o.fail("prox on random input failed");
    } else {
        const auto ref = l1inf::prox_l1inf(u, 0.7);
        const auto got = l1inf::io::read_matrix_csv((dir / "ux.csv").string());
        if (std::memcmp(got.data().data(), ref.x_star.data().data(), got.size() * sizeof(double))) {
            o.fail("CLI prox output differs from library");
        }
        if (t::read_json(dir / "um.json")["t_star"].get<double>() != ref.t_star) {
            o.fail("CLI t_star differs from library");
        }
    }

    struct Fixture {
        const char* text;
        const char* cmd;
        double t_star;
        DenseMatrix x;
    };
    const Fixture fixtures[] = {
        {"4,1\n2,1\n", "prox -l 1", 4.0, DenseMatrix{{3, 1}, {1, 1}}},
        {"2,2\n0,0\n", "prox -l 1", 1.5, DenseMatrix{{1.5, 1.5}, {0, 0}}},
        {"4,1\n2,1\n", "project -t 1", 4.0, DenseMatrix{{1, 0}, {1, 0}}},
    };
    for (const auto& f : fixtures) {
        t::write_text(dir / "f.csv", f.text);
        for (const char* s : {"sort", "michelot"}) {
            if (t::run_cli(std::string(f.cmd) + " --strategy " + s + " -i " + path("f.csv") +
                           " -o " + path("fx.csv") + " --meta " + path("fm.json")) != 0) {
                o.fail(std::string("fixture run failed: ") + f.cmd);
                continue;
            }
            const double ts = t::read_json(dir / "fm.json")["t_star"].get<double>();
            const auto lib =
                l1inf::prox_l1inf(l1inf::io::read_matrix_csv((dir / "f.csv").string()), 1.0);
            if (ts != f.t_star || ts != lib.t_star) {
                o.fail(std::string("metadata t_star mismatch: ") + f.cmd);
            }
            if (l1inf::io::read_matrix_csv((dir / "fx.csv").string()) != f.x) {
                o.fail(std::string("fixture output mismatch: ") + f.cmd);
            }
        }
    }

    t::write_text(dir / "v.csv", "4,1\n2,1\n");
    t::write_text(dir / "ragged.csv", "1,2\n3\n");
    t::write_text(dir / "x.csv", "1,2\n3,4\n5,7\n");
    t::write_text(dir / "y.txt", "0\n0\n0\n");
    t::write_text(dir / "ybad.txt", "0\n3\n0\n");
    const std::pair<std::string, int> codes[] = {
        {"prox -i " + path("v.csv") + " -l 1 -o " + path("o.csv") + " --meta " + path("o.json"), 0},
        {"prox -i " + path("ragged.csv") + " -l 1", 2},
        {"prox -i " + path("v.csv") + " -l 0", 3},
        {"project -i " + path("missing.csv") + " -t 1", 2},
        {"bench --alphas 0", 3},
        {"bench --alphas 2", 3},
        {"fit -i " + path("x.csv") + " --labels " + path("ybad.txt") + " --tau 1 --n-classes 2", 2},
        {"fit -i " + path("x.csv") + " --labels " + path("y.txt") + " --tau 1 --step-size 1e308", 4},
        {"frobnicate", 3},
    };
    for (const auto& [args, want] : codes) {
        const int got = t::run_cli(args);
        if (got != want) {
            o.fail("'" + args + "' exited " + std::to_string(got) + ", expected " +
                   std::to_string(want));
        }
    }
    if (o.pass) {
        o.detail = "round trip bitwise, 3 fixtures x 2 strategies, 9 exit codes";
    }
    return o;
}

} // namespace

int main() {
    report("oracle-equivalence", oracle_equivalence);
    const auto cases = medium_cases(0x4D0E, 500);
    report("moreau-identity", [&] { return moreau_identity(cases); });
    report("kkt-suite", [&] { return kkt_suite(cases); });
    report("closed-form-fixtures", closed_form);
    report("strategy-equivalence", strategy_equivalence);
    report("benchmark-trend", benchmark_trend);
    report("solver-recovery", solver_recovery);
    report("cli-contract", cli_contract);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
