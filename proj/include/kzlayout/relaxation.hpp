#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "solver_config.hpp"
#include "spec_model.hpp"

namespace kzlayout {

/// Constraint -> pivot variable map for linear relaxation. Injective; rows
/// without a pivot are skipped during relaxation sweeps.
class PivotAssignment {
public:
    static constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

    PivotAssignment() = default;
    explicit PivotAssignment(std::size_t num_constraints) : pivot_(num_constraints, none) {}

    std::size_t pivot(std::size_t id) const { return id < pivot_.size() ? pivot_[id] : none; }
    bool has_pivot(std::size_t id) const { return pivot(id) != none; }
    void assign(std::size_t id, std::size_t var) { pivot_[id] = var; }

    std::size_t matched() const {
        return static_cast<std::size_t>(
            std::count_if(pivot_.begin(), pivot_.end(), [](auto p) { return p != none; }));
    }

    friend bool operator==(const PivotAssignment&, const PivotAssignment&) = default;

private:
    std::vector<std::size_t> pivot_;
};

/// Randomized greedy matching: constraints are visited in shuffled order and
/// each takes a random still-free variable among its nonzero terms.
inline PivotAssignment assign_pivots_random(const Specification& s,
                                            std::span<const std::size_t> enabled,
                                            std::uint64_t seed) {
    PivotAssignment pa(s.size());
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(enabled.begin(), enabled.end());
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<char> taken(s.num_vars(), 0);
    std::vector<std::size_t> free_vars;
    for (std::size_t id : order) {
        free_vars.clear();
        for (const auto& t : s[id].terms())
            if (!taken[t.index]) free_vars.push_back(t.index);
        if (free_vars.empty()) continue;
        std::uniform_int_distribution<std::size_t> pick(0, free_vars.size() - 1);
        std::size_t var = free_vars[pick(rng)];
        taken[var] = 1;
        pa.assign(id, var);
    }
    return pa;
}

/// Solves constraint `id` for its pivot variable alone:
///   x_p += omega * (b - a.x) / a_p
inline std::size_t relax_row_inplace(std::span<double> x, const Constraint& c, std::size_t pivot,
                                     double omega) {
    if (pivot == PivotAssignment::none) return 0;
    if (c.is_inequality() && violation(c, x) == 0.0) return 0;
    double a_p = 0.0;
    for (const auto& t : c.terms())
        if (t.index == pivot) a_p = t.coef;
    x[pivot] += omega * residual(c, x) / a_p;
    return 1;
}

inline SolveOutcome relax_solve(const Specification& s, std::span<const std::size_t> enabled,
                                Assignment x0, const SolverConfig& cfg,
                                const PivotAssignment& pivots) {
    return run_sweeps(s, enabled, std::move(x0), cfg, [&](std::span<double> x, std::size_t id) {
        return relax_row_inplace(x, s[id], pivots.pivot(id), cfg.omega);
    });
}

/// Pivots are reassigned from cfg.seed on every call, i.e. whenever the
/// enabled set changes.
inline SolveOutcome relax_solve(const Specification& s, std::span<const std::size_t> enabled,
                                Assignment x0, const SolverConfig& cfg) {
    cfg.validate();
    auto pivots = assign_pivots_random(s, enabled, cfg.seed);
    return relax_solve(s, enabled, std::move(x0), cfg, pivots);
}

/// Default configuration for the relaxation baseline (omega = 0.7).
inline SolverConfig relaxation_defaults() {
    SolverConfig cfg;
    cfg.omega = 0.7;
    return cfg;
}

struct RelaxationBackend {
    SolveOutcome solve(const Specification& s, std::span<const std::size_t> enabled,
                       Assignment x0, const SolverConfig& cfg) const {
        return relax_solve(s, enabled, std::move(x0), cfg);
    }
};

}  // namespace kzlayout
