// l1inf command-line front end.
//
// Exit codes: 0 success, 1 internal error, 2 I/O or parse failure (including
// out-of-range labels), 3 invalid parameters, 4 solver divergence.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "l1inf/l1inf.hpp"

namespace {

using json = nlohmann::ordered_json;
using l1inf::DenseMatrix;

enum ExitCode { ok = 0, internal = 1, io_failure = 2, bad_params = 3, diverged = 4 };

/// A label that cannot be encoded. Reported like any other input error.
struct LabelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string input;
    std::string output;
    std::string meta;
    std::string strategy = "michelot";
    std::uint64_t seed = 42;
};

struct Clock {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

json base_meta(const std::string& command, const std::vector<std::string>& argv) {
    json j;
    j["command"] = command;
    j["argv"] = argv;
    j["t_star"] = nullptr;
    j["iterations"] = nullptr;
    j["lower_bound_used"] = nullptr;
    j["elapsed_seconds"] = 0.0;
    j["strategy"] = nullptr;
    return j;
}

void emit_meta(const json& meta, const std::string& path) {
    if (path.empty()) {
        std::cerr << meta.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw l1inf::io::IoError("cannot open '" + path + "' for writing");
    }
    out << meta.dump(2) << '\n';
    if (!out) {
        throw l1inf::io::IoError("write to '" + path + "' failed");
    }
}

void emit_matrix(const DenseMatrix& m, const std::string& path) {
    if (path.empty()) {
        l1inf::io::write_matrix_csv(std::cout, m);
    } else {
        l1inf::io::write_matrix_csv(path, m);
    }
}

void require_positive(double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v)) {
        throw l1inf::InvalidInput(std::string(name) + " must be positive and finite");
    }
}

void require_input(const Common& c) {
    if (c.input.empty()) {
        throw l1inf::InvalidInput("--input is required");
    }
}

l1inf::Strategy strategy_of(const std::string& name) {
    const auto s = l1inf::parse_strategy(name);
    if (!s) {
        throw l1inf::InvalidInput("unknown strategy '" + name + "'");
    }
    return *s;
}

json bound_json(const l1inf::LowerBound<double>& b) {
    return {{"value", b.value}, {"provenance", std::string(l1inf::to_string(b.provenance))}};
}

int cmd_prox(const Common& c, double lambda, const std::vector<std::string>& argv) {
    require_positive(lambda, "lambda");
    require_input(c);
    const auto strategy = strategy_of(c.strategy);
    const DenseMatrix v = l1inf::io::read_matrix_csv(c.input);
    Clock clock;
    const auto sol = l1inf::prox_l1inf(v, lambda, strategy);
    const double elapsed = clock.seconds();

    json meta = base_meta("prox", argv);
    meta["t_star"] = sol.t_star;
    meta["iterations"] = sol.iterations;
    meta["lower_bound_used"] = bound_json(sol.initial_bound);
    meta["elapsed_seconds"] = elapsed;
    meta["strategy"] = c.strategy;
    meta["lambda"] = lambda;
    meta["zero_solution"] = sol.zero_solution;
    meta["active_columns"] = sol.active_cols;
    meta["mu"] = sol.mu;

    emit_matrix(sol.x_star, c.output);
    emit_meta(meta, c.meta);
    return ok;
}

int cmd_project(const Common& c, double tau, const std::vector<std::string>& argv) {
    require_positive(tau, "tau");
    require_input(c);
    const auto strategy = strategy_of(c.strategy);
    const DenseMatrix v = l1inf::io::read_matrix_csv(c.input);
    Clock clock;
    const auto th = l1inf::prox_thresholds(v, tau, strategy);
    const DenseMatrix x = l1inf::project_linf1(v, tau, strategy);
    const double elapsed = clock.seconds();

    json meta = base_meta("project", argv);
    meta["t_star"] = th.t_star;
    meta["iterations"] = th.iterations;
    meta["lower_bound_used"] = bound_json(th.initial_bound);
    meta["elapsed_seconds"] = elapsed;
    meta["strategy"] = c.strategy;
    meta["tau"] = tau;
    meta["inside_ball"] = th.zero_solution;

    emit_matrix(x, c.output);
    emit_meta(meta, c.meta);
    return ok;
}

std::pair<std::size_t, std::size_t> parse_size(const std::string& s) {
    const auto x = s.find_first_of("xX");
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t used_n = 0;
    std::size_t used_m = 0;
    try {
        if (x == std::string::npos) {
            throw std::invalid_argument(s);
        }
        n = std::stoul(s.substr(0, x), &used_n);
        m = std::stoul(s.substr(x + 1), &used_m);
    } catch (const std::logic_error&) {
        throw l1inf::InvalidInput("bad size '" + s + "', expected ROWSxCOLS");
    }
    if (used_n != x || used_m != s.size() - x - 1 || n == 0 || m == 0) {
        throw l1inf::InvalidInput("bad size '" + s + "', expected ROWSxCOLS");
    }
    return {n, m};
}

struct BenchArgs {
    std::vector<std::string> sizes;
    std::vector<double> alphas;
    std::optional<std::size_t> trials;
    std::vector<std::string> methods;
    bool full_grid = false;
};

int cmd_bench(const Common& c, const BenchArgs& a, bool seed_given,
              const std::vector<std::string>& argv) {
    auto cfg = a.full_grid ? l1inf::bench::full_grid() : l1inf::bench::BenchConfig{};
    if (!a.sizes.empty()) {
        cfg.sizes.clear();
        for (const auto& s : a.sizes) {
            cfg.sizes.push_back(parse_size(s));
        }
    }
    if (!a.alphas.empty()) {
        cfg.alphas = a.alphas;
    }
    if (a.trials) {
        cfg.trials = *a.trials;
    }
    if (!a.methods.empty()) {
        cfg.methods.clear();
        for (const auto& m : a.methods) {
            cfg.methods.push_back(strategy_of(m));
        }
    }
    if (seed_given) {
        cfg.seed = c.seed;
    }
    l1inf::bench::validate(cfg);

    Clock clock;
    const auto records = l1inf::bench::run_benchmark(cfg);
    const double elapsed = clock.seconds();

    if (c.output.empty()) {
        l1inf::bench::write_csv(std::cout, records);
        l1inf::bench::write_summary(std::cerr, records);
    } else {
        std::ofstream out(c.output);
        if (!out) {
            throw l1inf::io::IoError("cannot open '" + c.output + "' for writing");
        }
        l1inf::bench::write_csv(out, records);
        if (!out) {
            throw l1inf::io::IoError("write to '" + c.output + "' failed");
        }
        l1inf::bench::write_summary(std::cout, records);
    }

    json meta = base_meta("bench", argv);
    meta["elapsed_seconds"] = elapsed;
    json sizes = json::array();
    for (const auto& [n, m] : cfg.sizes) {
        sizes.push_back({n, m});
    }
    json methods = json::array();
    for (auto m : cfg.methods) {
        methods.push_back(std::string(l1inf::to_string(m)));
    }
    meta["sizes"] = sizes;
    meta["alphas"] = cfg.alphas;
    meta["trials"] = cfg.trials;
    meta["methods"] = methods;
    meta["seed"] = cfg.seed;
    meta["records"] = records.size();
    if (!c.meta.empty()) {
        emit_meta(meta, c.meta);
    }
    return ok;
}

struct FitArgs {
    std::string labels;
    std::optional<double> tau;
    std::vector<double> tau_grid;
    std::size_t max_iters = 100000;
    double grad_tol = 1e-8;
    bool standardize = false;
    std::string step = "fixed";
    std::optional<double> step_size;
    std::optional<std::size_t> n_classes;
    std::string ranking;
    std::string predictions;
    bool planted = false;
};

inline constexpr std::size_t planted_samples = 200;
inline constexpr std::size_t planted_features = 50;
inline constexpr std::size_t planted_classes = 5;
inline constexpr double planted_tau = 0.5;

std::size_t check_labels(const std::vector<long long>& labels, std::size_t rows,
                         std::optional<std::size_t> n_classes) {
    if (labels.size() != rows) {
        throw LabelError("expected " + std::to_string(rows) + " labels but found " +
                         std::to_string(labels.size()));
    }
    long long top = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || (n_classes && labels[i] >= static_cast<long long>(*n_classes))) {
            throw LabelError("label " + std::to_string(labels[i]) + " on line " +
                             std::to_string(i + 1) + " is out of range");
        }
        top = std::max(top, labels[i]);
    }
    return n_classes ? *n_classes : static_cast<std::size_t>(top) + 1;
}

int cmd_fit(const Common& c, const FitArgs& a, const std::vector<std::string>& argv) {
    if (a.tau && !a.tau_grid.empty()) {
        throw l1inf::InvalidInput("--tau and --tau-grid are mutually exclusive");
    }
    std::vector<double> taus = a.tau_grid;
    if (a.tau) {
        taus = {*a.tau};
    }
    if (taus.empty()) {
        if (!a.planted) {
            throw l1inf::InvalidInput("one of --tau or --tau-grid is required");
        }
        taus = {planted_tau};
    }
    for (double t : taus) {
        require_positive(t, "tau");
    }
    if (a.step_size) {
        require_positive(*a.step_size, "step size");
    }
    if (a.n_classes && *a.n_classes == 0) {
        throw l1inf::InvalidInput("--n-classes must be positive");
    }

    l1inf::solver::SolverConfig cfg;
    cfg.max_iters = a.max_iters;
    cfg.grad_tol = a.grad_tol;
    cfg.strategy = strategy_of(c.strategy);
    cfg.step_rule = a.step == "backtracking" ? l1inf::solver::StepRule::backtracking
                                             : l1inf::solver::StepRule::fixed_inverse_lipschitz;
    cfg.step_size = a.step_size;
    if (!(cfg.grad_tol >= 0) || cfg.max_iters == 0) {
        throw l1inf::InvalidInput("--max-iters must be positive and --grad-tol non-negative");
    }

    DenseMatrix x;
    std::vector<long long> labels;
    std::vector<std::size_t> planted_support;
    bool standardized = a.standardize;
    if (a.planted) {
        auto inst = l1inf::solver::make_planted_classification(
            planted_samples, planted_features, planted_classes, c.seed);
        x = std::move(inst.x);
        labels = std::move(inst.labels);
        planted_support = inst.support;
        std::sort(planted_support.begin(), planted_support.end());
        standardized = true;
    } else {
        require_input(c);
        if (a.labels.empty()) {
            throw l1inf::InvalidInput("--labels is required");
        }
        x = l1inf::io::read_matrix_csv(c.input);
        labels = l1inf::io::read_labels(a.labels);
    }
    const std::size_t n_classes = check_labels(labels, x.rows(), a.n_classes);
    if (standardized) {
        l1inf::solver::standardize(x);
    }

    l1inf::solver::MultiTaskProblem prob{x, l1inf::solver::one_hot_encode(labels, n_classes),
                                         taus.front()};
    Clock clock;
    json grid = json::array();
    std::optional<l1inf::solver::FitResult> best;
    double best_acc = -1;
    double best_tau = 0;
    for (double t : taus) {
        prob.tau = t;
        auto fit = l1inf::solver::pgd_fit(prob, cfg);
        const auto pred = l1inf::solver::classify(prob.x, fit.w);
        const double acc = l1inf::solver::accuracy(pred, labels);
        grid.push_back({{"tau", t},
                        {"accuracy", acc},
                        {"iterations", fit.iterations},
                        {"converged", fit.converged},
                        {"objective", fit.objective_history.empty()
                                          ? l1inf::solver::objective(prob, fit.w)
                                          : fit.objective_history.back()},
                        {"nonzero_features", l1inf::solver::nonzero_features(fit.w).size()}});
        if (taus.size() > 1) {
            std::cerr << "tau " << t << "  accuracy " << acc << '\n';
        }
        if (acc > best_acc) {
            best_acc = acc;
            best_tau = t;
            best = std::move(fit);
        }
    }
    const double elapsed = clock.seconds();
    prob.tau = best_tau;
    const auto pred = l1inf::solver::classify(prob.x, best->w);

    emit_matrix(best->w, c.output);
    if (!a.ranking.empty()) {
        l1inf::io::write_lines(a.ranking, best->feature_ranking);
    }
    if (!a.predictions.empty()) {
        l1inf::io::write_lines(a.predictions, pred);
    }

    json meta = base_meta("fit", argv);
    meta["iterations"] = best->iterations;
    meta["elapsed_seconds"] = elapsed;
    meta["strategy"] = c.strategy;
    meta["tau"] = best_tau;
    meta["accuracy"] = best_acc;
    meta["converged"] = best->converged;
    meta["step"] = best->step;
    meta["lipschitz"] = best->lipschitz;
    meta["n_classes"] = n_classes;
    meta["standardized"] = standardized;
    meta["support"] = l1inf::solver::nonzero_features(best->w);
    if (a.planted) {
        meta["planted_support"] = planted_support;
    }
    meta["grid"] = grid;
    emit_meta(meta, c.meta);
    return ok;
}

int cmd_oracle(const Common& c, double lambda, const std::string& method, double tol,
               const std::vector<std::string>& argv) {
    require_positive(lambda, "lambda");
    require_input(c);
    const DenseMatrix v = l1inf::io::read_matrix_csv(c.input);
    Clock clock;
    const auto res = method == "enumerate" ? l1inf::oracle::oracle_prox_enumerate(v, lambda)
                                           : l1inf::oracle::oracle_prox_bisection(v, lambda, tol);
    json meta = base_meta("oracle", argv);
    meta["t_star"] = res.t_star;
    meta["elapsed_seconds"] = clock.seconds();
    meta["method"] = method;
    meta["lambda"] = lambda;
    meta["residual"] = std::isfinite(res.residual) ? json(res.residual) : json("inf");
    emit_matrix(res.x_star, c.output);
    emit_meta(meta, c.meta);
    return ok;
}

void add_common(CLI::App* sub, Common& c, bool with_input = true) {
    if (with_input) {
        sub->add_option("--input,-i", c.input, "input matrix CSV");
    }
    sub->add_option("--output,-o", c.output, "output CSV (default: stdout)");
    sub->add_option("--meta", c.meta, "metadata JSON (default: stderr)");
    sub->add_option("--strategy", c.strategy, "inner l1-ball projection")
        ->check(CLI::IsMember({"sort", "michelot"}));
    sub->add_option("--seed", c.seed, "random seed");
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);

    CLI::App app{"l1,inf proximal operator, l-inf,1 projection and multi-task solver"};
    app.require_subcommand(1);

    Common common;

    double lambda = 0;
    auto* prox = app.add_subcommand("prox", "prox of lambda * ||.||_{1,inf}");
    add_common(prox, common);
    prox->add_option("--lambda,-l", lambda, "regularization weight")->required();

    double tau = 0;
    auto* project = app.add_subcommand("project", "projection onto the l-inf,1 ball");
    add_common(project, common);
    project->add_option("--tau,-t", tau, "ball radius")->required();

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "projection timing sweep");
    add_common(bench, common, false);
    bench->add_option("--sizes", bench_args.sizes, "ROWSxCOLS list")->delimiter(',');
    bench->add_option("--alphas", bench_args.alphas, "radius fractions in (0,1]")->delimiter(',');
    bench->add_option("--trials", bench_args.trials, "matrices per configuration");
    bench->add_option("--methods", bench_args.methods, "sort,michelot")
        ->delimiter(',')
        ->check(CLI::IsMember({"sort", "michelot"}));
    bench->add_flag("--paper-grid", bench_args.full_grid, "four sizes, four alphas, 100 trials");

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "l-inf,1 constrained multi-task least squares");
    add_common(fit, common);
    fit->add_option("--labels", fit_args.labels, "integer labels, one per line");
    fit->add_option("--tau", fit_args.tau, "constraint radius");
    fit->add_option("--tau-grid", fit_args.tau_grid, "radii to try")->delimiter(',');
    fit->add_option("--max-iters", fit_args.max_iters, "iteration cap");
    fit->add_option("--grad-tol", fit_args.grad_tol, "gradient-mapping tolerance");
    fit->add_flag("--standardize", fit_args.standardize, "center and scale features");
    fit->add_option("--step", fit_args.step, "step rule")
        ->check(CLI::IsMember({"fixed", "backtracking"}));
    fit->add_option("--step-size", fit_args.step_size, "override the 1/L step");
    fit->add_option("--n-classes", fit_args.n_classes, "number of classes");
    fit->add_option("--ranking", fit_args.ranking, "write feature ranking here");
    fit->add_option("--predictions", fit_args.predictions, "write predicted labels here");
    fit->add_flag("--planted", fit_args.planted, "fit a built-in planted dataset");

    double oracle_lambda = 0;
    std::string oracle_method = "bisection";
    double oracle_tol = 1e-12;
    auto* oracle = app.add_subcommand("oracle", "reference prox (debugging)");
    oracle->group("");
    add_common(oracle, common);
    oracle->add_option("--lambda,-l", oracle_lambda)->required();
    oracle->add_option("--method", oracle_method)
        ->check(CLI::IsMember({"bisection", "enumerate"}));
    oracle->add_option("--tol", oracle_tol);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return bad_params;
    }

    try {
        if (*prox) {
            return cmd_prox(common, lambda, args);
        }
        if (*project) {
            return cmd_project(common, tau, args);
        }
        if (*bench) {
            return cmd_bench(common, bench_args, bench->count("--seed") > 0, args);
        }
        if (*fit) {
            return cmd_fit(common, fit_args, args);
        }
        if (*oracle) {
            return cmd_oracle(common, oracle_lambda, oracle_method, oracle_tol, args);
        }
    } catch (const l1inf::io::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return io_failure;
    } catch (const LabelError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return io_failure;
    } catch (const l1inf::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return bad_params;
    } catch (const l1inf::DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return diverged;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return internal;
    }
    return internal;
}
