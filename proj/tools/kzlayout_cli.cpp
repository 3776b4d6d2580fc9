// kzlayout command-line front end: solve, generate, bench, fit.
//
// Exit codes: 0 success, 2 input error (unreadable file, bad spec or CSV),
// 3 usage error (bad flags or configuration).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kzlayout/kzlayout.hpp"

namespace {

using namespace kzlayout;
using json = nlohmann::ordered_json;

constexpr int exit_input = 2;
constexpr int exit_usage = 3;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Selection parse_selection(const std::string& s) {
    if (s == "cyclic") return Selection::Cyclic;
    if (s == "uniform") return Selection::UniformRandom;
    if (s == "norm-weighted") return Selection::NormWeighted;
    throw UsageError("unknown selection '" + s + "' (expected cyclic, uniform or norm-weighted)");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

struct SolveArgs {
    std::string file;
    std::string solver = "kaczmarz";
    std::optional<double> omega, tol;
    std::optional<std::size_t> max_sweeps;
    std::string selection = "cyclic";
    std::uint64_t seed = 0;
    bool json = false;
};

int run_solve(const SolveArgs& a) {
    if (!is_solver(a.solver)) throw UsageError(UnknownSolver(a.solver).what());
    SolverConfig cfg = solver_defaults(a.solver);
    if (a.omega) cfg.omega = *a.omega;
    if (a.tol) cfg.tolerance = *a.tol;
    if (a.max_sweeps) cfg.max_sweeps = *a.max_sweeps;
    cfg.selection = parse_selection(a.selection);
    cfg.seed = a.seed;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const auto spec = parse_specification(read_file(a.file));
    const auto res = run_resolve(a.solver, spec, cfg);
    const double err = max_violation(spec, res.enabled, res.solution);

    if (a.json) {
        json out;
        out["solver"] = a.solver;
        out["x"] = res.solution;
        out["enabled"] = res.enabled;
        out["enabled_count"] = res.enabled.size();
        out["constraints"] = spec.size();
        out["iota"] = res.iota.to_hex();
        out["max_violation"] = err;
        out["sweeps"] = res.total_sweeps();
        std::cout << out.dump(2) << '\n';
        return 0;
    }
    for (std::size_t i = 0; i < res.solution.size(); ++i)
        std::cout << 'x' << i << '=' << number(res.solution[i]) << '\n';
    std::cout << "enabled=" << res.enabled.size() << " of " << spec.size() << '\n';
    std::cout << "iota=" << res.iota.to_hex() << '\n';
    std::cout << "max_violation=" << number(err) << '\n';
    std::cout << "sweeps=" << res.total_sweeps() << '\n';
    return 0;
}

struct GenerateArgs {
    std::size_t widgets = 0;
    std::string window = "800x600";
    std::uint64_t seed = 0;
    bool with_bounds = false;
    std::string out;
};

int run_generate(const GenerateArgs& a) {
    if (a.widgets == 0) throw UsageError("--widgets must be at least 1");
    LayoutOptions opt;
    const auto x = a.window.find('x');
    try {
        if (x == std::string::npos) throw std::invalid_argument("missing 'x'");
        std::size_t used = 0;
        opt.width = std::stod(a.window.substr(0, x), &used);
        if (used != x) throw std::invalid_argument("trailing text");
        const auto h = a.window.substr(x + 1);
        opt.height = std::stod(h, &used);
        if (used != h.size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
        throw UsageError("--window expects WIDTHxHEIGHT, got '" + a.window + "'");
    }
    if (!(opt.width > 0 && opt.height > 0)) throw UsageError("--window sizes must be positive");
    opt.with_bounds = a.with_bounds;

    const auto layout = generate_layout(a.widgets, a.seed, opt);
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw InputError("cannot write " + a.out);
    out << "# " << a.widgets << " widgets, window " << a.window << ", seed " << a.seed << '\n'
        << serialize_specification(layout.spec);
    if (!out.flush()) throw InputError("cannot write " + a.out);
    std::cout << layout.spec.size() << " constraints, " << layout.spec.num_vars()
              << " variables written to " << a.out << '\n';
    return 0;
}

struct BenchArgs {
    std::size_t min = 1, max = 1, step = 1, runs = 1, repetitions = 1;
    std::string solvers = "kaczmarz,relaxation";
    std::string out;
    std::string phase = "full";
    std::uint64_t seed = 0;
    bool with_bounds = false;
};

int run_bench(const BenchArgs& a) {
    ExperimentOptions opt;
    opt.solvers = split_list(a.solvers);
    if (opt.solvers.empty()) throw UsageError("--solvers is empty");
    for (const auto& s : opt.solvers)
        if (!is_solver(s)) throw UsageError(UnknownSolver(s).what());
    if (a.phase == "full")
        opt.phase = Phase::Full;
    else if (a.phase == "solve-only")
        opt.phase = Phase::SolveOnly;
    else
        throw UsageError("--phase expects full or solve-only, got '" + a.phase + "'");
    if (a.repetitions == 0) throw UsageError("--repetitions must be at least 1");
    opt.repetitions = a.repetitions;
    opt.layout.with_bounds = a.with_bounds;

    std::vector<SuiteEntry> plan;
    try {
        plan = plan_suite(a.min, a.max, a.step, a.runs, a.seed);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    std::ofstream csv(a.out, std::ios::binary);
    if (!csv) throw InputError("cannot write " + a.out);
    const auto sum = run_experiment(plan, opt, csv, [](const SuiteEntry& e, const BenchmarkRecord& r) {
        std::cerr << "widgets " << e.widgets << " run " << e.run << ' ' << r.solver << ": c=" << r.c
                  << " T=" << number(r.time_ms) << " ms enabled=" << r.enabled << '\n';
    });
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(sum.suite_hash));
    std::cerr << sum.specs << " specifications, " << sum.rows << " rows, suite hash " << hash << '\n';
    return 0;
}

struct FitArgs {
    std::string csv;
    std::string solver;
    std::size_t degree = 3;
    std::string plot_dir;
};

int run_fit(const FitArgs& a) {
    std::ifstream in(a.csv, std::ios::binary);
    if (!in) throw InputError("cannot open " + a.csv);
    std::vector<BenchmarkRecord> records;
    try {
        records = read_csv(in);
    } catch (const std::runtime_error& e) {
        throw InputError(a.csv + ": " + e.what());
    }
    auto groups = points_by_solver(records);
    if (!a.solver.empty()) {
        if (!groups.count(a.solver)) throw InputError("no rows for solver '" + a.solver + "'");
        groups = {{a.solver, groups[a.solver]}};
    }

    std::cout << "solver";
    for (std::size_t j = 0; j <= a.degree; ++j) std::cout << " beta" << j;
    std::cout << " r2\n";
    for (const auto& [name, pts] : groups) {
        RegressionFit fit;
        try {
            fit = fit_polynomial(pts, a.degree);
        } catch (const std::invalid_argument& e) {
            throw InputError(name + ": " + e.what());
        }
        std::cout << name;
        for (double b : fit.beta) {
            char buf[32];
            std::snprintf(buf, sizeof buf, " %.6e", b);
            std::cout << buf;
        }
        std::cout << ' ' << number(fit.r_squared) << '\n';
        if (!a.plot_dir.empty()) {
            std::filesystem::create_directories(a.plot_dir);
            const auto path = std::filesystem::path(a.plot_dir) / (name + ".dat");
            std::ofstream dat(path);
            if (!dat) throw InputError("cannot write " + path.string());
            write_plot_data(dat, name, median_by_size(pts));
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prioritized constraint solving for UI layouts"};
    app.require_subcommand(1);

    SolveArgs sa;
    auto* solve_cmd = app.add_subcommand("solve", "Solve a specification file");
    solve_cmd->add_option("spec-file", sa.file, "Specification file")->required();
    solve_cmd->add_option("--solver", sa.solver, "kaczmarz, relaxation, qr or givens");
    solve_cmd->add_option("--omega", sa.omega, "Relaxation parameter in (0, 2)");
    solve_cmd->add_option("--tol", sa.tol, "Convergence tolerance");
    solve_cmd->add_option("--max-sweeps", sa.max_sweeps, "Sweep budget per solve");
    solve_cmd->add_option("--selection", sa.selection, "cyclic, uniform or norm-weighted");
    solve_cmd->add_option("--seed", sa.seed, "Seed for random selection and pivots");
    solve_cmd->add_flag("--json", sa.json, "Machine-readable output");

    GenerateArgs ga;
    auto* gen_cmd = app.add_subcommand("generate", "Write a random layout specification");
    gen_cmd->add_option("--widgets", ga.widgets, "Number of widgets")->required();
    gen_cmd->add_option("--window", ga.window, "Window size WIDTHxHEIGHT");
    gen_cmd->add_option("--seed", ga.seed, "Generator seed");
    gen_cmd->add_flag("--with-bounds", ga.with_bounds, "Add minimum-size inequalities");
    gen_cmd->add_option("--out", ga.out, "Output file")->required();

    BenchArgs ba;
    auto* bench_cmd = app.add_subcommand("bench", "Time solvers on a generated suite");
    bench_cmd->add_option("--min", ba.min, "Smallest widget count")->required();
    bench_cmd->add_option("--max", ba.max, "Largest widget count")->required();
    bench_cmd->add_option("--step", ba.step, "Widget count increment");
    bench_cmd->add_option("--runs", ba.runs, "Layouts per size");
    bench_cmd->add_option("--solvers", ba.solvers, "Comma-separated solver names");
    bench_cmd->add_option("--out", ba.out, "CSV output file")->required();
    bench_cmd->add_option("--repetitions", ba.repetitions, "Timed runs per record (median)");
    bench_cmd->add_option("--phase", ba.phase, "full or solve-only");
    bench_cmd->add_option("--seed", ba.seed, "Suite base seed");
    bench_cmd->add_flag("--with-bounds", ba.with_bounds, "Add minimum-size inequalities");

    FitArgs fa;
    auto* fit_cmd = app.add_subcommand("fit", "Fit polynomial timing models to bench output");
    fit_cmd->add_option("results", fa.csv, "CSV written by bench")->required();
    fit_cmd->add_option("--solver", fa.solver, "Only this solver");
    fit_cmd->add_option("--degree", fa.degree, "Polynomial degree")->check(CLI::Range(0, 10));
    fit_cmd->add_option("--plot-dir", fa.plot_dir, "Write <solver>.dat median files here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*solve_cmd) return run_solve(sa);
        if (*gen_cmd) return run_generate(ga);
        if (*bench_cmd) return run_bench(ba);
        if (*fit_cmd) return run_fit(fa);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const SpecError& e) {
        std::cerr << "error: " << (sa.file.empty() ? "" : sa.file + ": ") << e.what() << '\n';
        return exit_input;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    }
    return exit_usage;
}
