#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spec_model.hpp"

namespace kzlayout {

enum class Selection { Cyclic, UniformRandom, NormWeighted };

namespace detail {

inline std::string shortest(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

}  // namespace detail

struct SolverConfig {
    double omega = 1.0;
    double tolerance = 0.01;
    std::size_t max_sweeps = 1000;
    std::size_t stall_window = 10;
    double stall_factor = 0.999;
    Selection selection = Selection::Cyclic;
    std::uint64_t seed = 0;
    // Convergence also demands every raw violation <= tolerance, so a
    // converged solve is never counted as sub-optimal.
    bool raw_tolerance = true;

    void validate() const {
        if (!(omega > 0.0 && omega < 2.0))
            throw std::invalid_argument("omega must lie in the open interval (0, 2), got " +
                                        detail::shortest(omega));
        if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
        if (max_sweeps == 0) throw std::invalid_argument("max_sweeps must be positive");
        if (stall_window == 0) throw std::invalid_argument("stall_window must be positive");
        if (!(stall_factor > 0.0 && stall_factor < 1.0))
            throw std::invalid_argument("stall_factor must lie in (0, 1)");
    }
};

struct SolveOutcome {
    Assignment x;
    bool converged = false;
    std::size_t sweeps_used = 0;
    double final_error = 0.0;  // max_violation at exit
    std::uint64_t projections = 0;
    std::uint64_t term_updates = 0;
};

/// Hands out the rows visited by one sweep according to the selection rule.
class RowSelector {
public:
    RowSelector(const Specification& s, std::span<const std::size_t> enabled,
                const SolverConfig& cfg)
        : enabled_(enabled), mode_(cfg.selection), rng_(cfg.seed) {
        if (mode_ == Selection::UniformRandom && !enabled.empty()) {
            uniform_ = std::uniform_int_distribution<std::size_t>(0, enabled.size() - 1);
        } else if (mode_ == Selection::NormWeighted) {
            std::vector<double> w;
            w.reserve(enabled.size());
            for (std::size_t id : enabled) w.push_back(s[id].squared_norm());
            weighted_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
        }
    }

    std::size_t size() const noexcept { return enabled_.size(); }

    /// Constraint id of the k-th projection of the current sweep.
    std::size_t pick(std::size_t k) {
        switch (mode_) {
            case Selection::Cyclic: return enabled_[k];
            case Selection::UniformRandom: return enabled_[uniform_(rng_)];
            case Selection::NormWeighted: return enabled_[weighted_(rng_)];
        }
        return enabled_[k];
    }

private:
    std::span<const std::size_t> enabled_;
    Selection mode_;
    std::mt19937_64 rng_;
    std::uniform_int_distribution<std::size_t> uniform_;
    std::discrete_distribution<std::size_t> weighted_;
};

namespace detail {

struct ErrorPair {
    double normalized;
    double gate;
};

inline ErrorPair measure(const Specification& s, std::span<const std::size_t> enabled,
                         std::span<const double> x, bool raw) {
    double norm_err = 0.0, raw_err = 0.0;
    for (std::size_t id : enabled) {
        const auto& c = s[id];
        const double v = violation(c, x);
        raw_err = std::max(raw_err, v);
        norm_err = std::max(norm_err, v / std::max(1.0, c.norm()));
    }
    if (!all_finite(x)) norm_err = raw_err = std::numeric_limits<double>::infinity();
    return {norm_err, raw ? std::max(norm_err, raw_err) : norm_err};
}

}  // namespace detail

/// Shared sweep loop. `step(x, id)` applies one row update in place and
/// returns the number of variables it touched.
///
/// Stops converged once the error is within tolerance (checked before the
/// first sweep and after each one), or unconverged when the budget runs out,
/// the iterate stops being finite, or the error fails to drop below
/// stall_factor times its value stall_window sweeps earlier.
template <typename Step>
SolveOutcome run_sweeps(const Specification& s, std::span<const std::size_t> enabled,
                        Assignment x, const SolverConfig& cfg, Step&& step) {
    cfg.validate();
    SolveOutcome out;
    auto err = detail::measure(s, enabled, x, cfg.raw_tolerance);
    std::vector<double> history{err.gate};
    RowSelector selector(s, enabled, cfg);

    while (!(err.gate <= cfg.tolerance)) {
        if (!std::isfinite(err.gate) || out.sweeps_used >= cfg.max_sweeps) break;
        for (std::size_t k = 0; k < selector.size(); ++k) {
            out.term_updates += step(std::span<double>(x), selector.pick(k));
            ++out.projections;
        }
        ++out.sweeps_used;
        err = detail::measure(s, enabled, x, cfg.raw_tolerance);
        history.push_back(err.gate);
        if (err.gate <= cfg.tolerance) break;
        if (history.size() > cfg.stall_window &&
            err.gate >= cfg.stall_factor * history[history.size() - 1 - cfg.stall_window])
            break;
    }
    out.converged = err.gate <= cfg.tolerance;
    out.final_error = err.normalized;
    out.x = std::move(x);
    return out;
}

}  // namespace kzlayout
