#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "conflict_resolution.hpp"
#include "generator.hpp"
#include "kaczmarz.hpp"
#include "qr_solver.hpp"
#include "regression.hpp"
#include "relaxation.hpp"

namespace kzlayout {

/// Enabled constraints whose raw violation exceeds the tolerance.
inline std::size_t count_suboptimal(const Specification& s, std::span<const std::size_t> enabled,
                                    std::span<const double> x, double tolerance) {
    return static_cast<std::size_t>(std::count_if(enabled.begin(), enabled.end(), [&](std::size_t id) {
        return !(violation(s[id], x) <= tolerance);
    }));
}

enum class Phase { Full, SolveOnly };

class UnknownSolver : public std::invalid_argument {
public:
    explicit UnknownSolver(std::string_view name)
        : std::invalid_argument("unknown solver '" + std::string(name) +
                                "' (expected kaczmarz, relaxation, qr or givens)") {}
};

inline const std::vector<std::string>& solver_names() {
    static const std::vector<std::string> names{"kaczmarz", "relaxation", "qr", "givens"};
    return names;
}

inline bool is_solver(std::string_view name) {
    const auto& n = solver_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

/// Per-solver defaults: omega 1.0 everywhere except relaxation (0.7).
inline SolverConfig solver_defaults(std::string_view name) {
    if (!is_solver(name)) throw UnknownSolver(name);
    return name == "relaxation" ? relaxation_defaults() : SolverConfig{};
}

/// End-to-end prioritized solve with the named solver.
inline ResolutionResult run_resolve(std::string_view name, const Specification& s,
                                    const SolverConfig& cfg) {
    if (name == "kaczmarz") return resolve(s, KaczmarzBackend{}, cfg);
    if (name == "relaxation") return resolve(s, RelaxationBackend{}, cfg);
    if (name == "qr") return resolve_dense_qr(s, cfg);
    if (name == "givens") return resolve_qr(s, cfg);
    throw UnknownSolver(name);
}

/// Solve of a fixed enabled set from the zero vector, without conflict
/// resolution.
inline SolveOutcome run_fixed_solve(std::string_view name, const Specification& s,
                                    std::span<const std::size_t> enabled, const SolverConfig& cfg) {
    const Assignment zero(s.num_vars(), 0.0);
    if (name == "kaczmarz") return solve(s, enabled, zero, cfg);
    if (name == "relaxation") return relax_solve(s, enabled, zero, cfg);
    if (name == "givens") return qr_solve(s, enabled, cfg);
    if (name == "qr") {
        const auto r = resolve_dense_qr(s, cfg);
        SolveOutcome out;
        out.x = r.solution;
        out.final_error = max_violation(s, enabled, out.x);
        out.converged = count_suboptimal(s, enabled, out.x, cfg.tolerance) == 0 &&
                        out.final_error <= cfg.tolerance;
        return out;
    }
    throw UnknownSolver(name);
}

struct BenchmarkRecord {
    std::string solver;
    std::size_t c = 0;  // constraint count
    std::size_t run = 0;
    double time_ms = 0.0;
    bool converged = false;
    std::size_t suboptimal = 0;
    std::size_t enabled = 0;
    std::string iota_hex;

    bool same_outcome(const BenchmarkRecord& o) const {
        return solver == o.solver && c == o.c && run == o.run && converged == o.converged &&
               suboptimal == o.suboptimal && enabled == o.enabled && iota_hex == o.iota_hex;
    }
};

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

/// Times `repetitions` runs of the named solver and keeps the median. With
/// three or more repetitions the first run is a discarded warm-up. In the
/// solve-only phase the enabled set comes from one untimed resolve and only
/// the fixed solve of that set is timed.
inline BenchmarkRecord time_solver(std::string_view name, const Specification& s,
                                   const SolverConfig& cfg, std::size_t repetitions,
                                   Phase phase = Phase::Full) {
    if (!is_solver(name)) throw UnknownSolver(name);
    if (repetitions == 0) throw std::invalid_argument("repetitions must be at least 1");
    using clock = std::chrono::steady_clock;

    BenchmarkRecord rec;
    rec.solver = std::string(name);
    rec.c = s.size();
    std::vector<double> times;

    if (phase == Phase::Full) {
        for (std::size_t r = 0; r < repetitions; ++r) {
            const auto t0 = clock::now();
            auto res = run_resolve(name, s, cfg);
            times.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count());
            if (r == 0) {
                rec.enabled = res.enabled.size();
                rec.iota_hex = res.iota.to_hex();
                rec.suboptimal = count_suboptimal(s, res.enabled, res.solution, cfg.tolerance);
                rec.converged = all_finite(res.solution) &&
                                max_violation(s, res.enabled, res.solution) <= cfg.tolerance &&
                                (!cfg.raw_tolerance || rec.suboptimal == 0);
            }
        }
    } else {
        const auto res = run_resolve(name, s, cfg);
        rec.enabled = res.enabled.size();
        rec.iota_hex = res.iota.to_hex();
        for (std::size_t r = 0; r < repetitions; ++r) {
            const auto t0 = clock::now();
            auto out = run_fixed_solve(name, s, res.enabled, cfg);
            times.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count());
            if (r == 0) {
                rec.converged = out.converged;
                rec.suboptimal = count_suboptimal(s, res.enabled, out.x, cfg.tolerance);
            }
        }
    }
    if (repetitions >= 3) times.erase(times.begin());
    rec.time_ms = median(std::move(times));
    return rec;
}

// --- CSV -----------------------------------------------------------------

inline constexpr std::string_view csv_header =
    "solver,c,run,time_ms,converged,suboptimal,enabled,iota_hex";

inline std::string csv_field(std::string_view v) {
    if (v.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(v);
    std::string out = "\"";
    for (char ch : v) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

inline void write_csv_row(std::ostream& os, const BenchmarkRecord& r) {
    char ms[64];
    std::snprintf(ms, sizeof ms, "%.4f", r.time_ms);
    os << csv_field(r.solver) << ',' << r.c << ',' << r.run << ',' << ms << ','
       << (r.converged ? 1 : 0) << ',' << r.suboptimal << ',' << r.enabled << ','
       << csv_field(r.iota_hex) << "\r\n";
}

/// Splits RFC-4180 text into records of fields. Quoted fields may contain
/// separators, doubled quotes and line breaks.
inline std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    std::size_t line = 1;
    char ch;
    auto end_row = [&] {
        if (any || !row.empty()) {
            row.push_back(std::move(field));
            rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        any = false;
    };
    while (in.get(ch)) {
        if (quoted) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get(ch);
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line;
                field += ch;
            }
            continue;
        }
        switch (ch) {
            case '"':
                if (!field.empty())
                    throw std::runtime_error("line " + std::to_string(line) + ": stray quote");
                quoted = any = true;
                break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                any = true;
                break;
            case '\r': break;
            case '\n':
                end_row();
                ++line;
                break;
            default:
                field += ch;
                any = true;
        }
    }
    if (quoted) throw std::runtime_error("unterminated quoted field");
    end_row();
    return rows;
}

inline std::vector<BenchmarkRecord> read_csv(std::istream& in) {
    const auto rows = parse_csv(in);
    if (rows.empty()) throw std::runtime_error("empty CSV");
    std::string header;
    for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i];
    if (header != csv_header) throw std::runtime_error("unexpected CSV header: " + header);

    auto number = [](const std::string& text, auto& out, std::size_t line) {
        const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
        if (ec != std::errc{} || p != text.data() + text.size())
            throw std::runtime_error("row " + std::to_string(line) + ": bad number '" + text + "'");
    };
    std::vector<BenchmarkRecord> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != 8)
            throw std::runtime_error("row " + std::to_string(i + 1) + ": expected 8 fields, got " +
                                     std::to_string(f.size()));
        BenchmarkRecord r;
        r.solver = f[0];
        number(f[1], r.c, i + 1);
        number(f[2], r.run, i + 1);
        number(f[3], r.time_ms, i + 1);
        int conv = 0;
        number(f[4], conv, i + 1);
        r.converged = conv != 0;
        number(f[5], r.suboptimal, i + 1);
        number(f[6], r.enabled, i + 1);
        r.iota_hex = f[7];
        out.push_back(std::move(r));
    }
    return out;
}

// --- experiments ---------------------------------------------------------

struct ExperimentOptions {
    LayoutOptions layout;
    std::vector<std::string> solvers{"kaczmarz", "relaxation"};
    std::size_t repetitions = 1;
    Phase phase = Phase::Full;
    std::function<SolverConfig(std::string_view)> config = solver_defaults;
};

struct ExperimentSummary {
    std::uint64_t suite_hash = 0xcbf29ce484222325ull;
    std::size_t specs = 0;
    std::size_t rows = 0;
};

/// Runs every solver on every layout of the plan and streams one CSV row per
/// (size, run, solver), in that order. Each layout is generated once, so
/// all solvers see identical input; the returned hash fingerprints it.
inline ExperimentSummary run_experiment(
    const std::vector<SuiteEntry>& plan, const ExperimentOptions& opt, std::ostream& csv,
    const std::function<void(const SuiteEntry&, const BenchmarkRecord&)>& progress = {}) {
    for (const auto& name : opt.solvers)
        if (!is_solver(name)) throw UnknownSolver(name);
    ExperimentSummary sum;
    csv << csv_header << "\r\n";
    for (const auto& entry : plan) {
        const auto layout = generate_layout(entry.widgets, entry.seed, opt.layout);
        sum.suite_hash = fnv1a(serialize_specification(layout.spec), sum.suite_hash);
        ++sum.specs;
        for (const auto& name : opt.solvers) {
            auto rec = time_solver(name, layout.spec, opt.config(name), opt.repetitions, opt.phase);
            rec.run = entry.run;
            write_csv_row(csv, rec);
            ++sum.rows;
            if (progress) progress(entry, rec);
        }
        csv.flush();
    }
    return sum;
}

// --- fitting -------------------------------------------------------------

inline std::map<std::string, std::vector<DataPoint>> points_by_solver(
    std::span<const BenchmarkRecord> records) {
    std::map<std::string, std::vector<DataPoint>> out;
    for (const auto& r : records) out[r.solver].emplace_back(double(r.c), r.time_ms);
    return out;
}

/// (c, median T) per distinct c, ascending.
inline std::vector<DataPoint> median_by_size(std::span<const DataPoint> points) {
    std::map<double, std::vector<double>> by;
    for (const auto& [c, t] : points) by[c].push_back(t);
    std::vector<DataPoint> out;
    for (auto& [c, ts] : by) out.emplace_back(c, median(std::move(ts)));
    return out;
}

inline void write_plot_data(std::ostream& os, std::string_view solver,
                            std::span<const DataPoint> medians) {
    os << "# " << solver << ": constraints median_time_ms\n";
    for (const auto& [c, t] : medians) os << c << ' ' << t << '\n';
}

}  // namespace kzlayout
