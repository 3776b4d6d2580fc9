#pragma once

#include <algorithm>
#include <concepts>
#include <span>
#include <vector>

#include "characteristic.hpp"
#include "solver_config.hpp"
#include "spec_model.hpp"

namespace kzlayout {

template <typename B>
concept FeasibilityBackend = requires(const B& b, const Specification& s,
                                      std::span<const std::size_t> enabled, Assignment x0,
                                      const SolverConfig& cfg) {
    { b.solve(s, enabled, std::move(x0), cfg) } -> std::same_as<SolveOutcome>;
};

struct Attempt {
    std::size_t id;
    bool accepted;
    std::size_t sweeps_used;
};

struct ResolutionResult {
    ConstraintSet enabled;
    CharacteristicInteger iota;
    Assignment solution;
    std::vector<Attempt> attempts;

    std::size_t total_sweeps() const {
        std::size_t n = 0;
        for (const auto& a : attempts) n += a.sweeps_used;
        return n;
    }
};

namespace detail {

/// Warm start for adding `c`: variables no enabled constraint mentions yet
/// can take any value without disturbing the current solution, so move only
/// those onto the constraint (minimum-norm step over the free entries).
inline Assignment place_free_variables(const Constraint& c, const Assignment& x,
                                       std::span<const std::size_t> uses) {
    Assignment y = x;
    double free_sq = 0.0;
    for (const auto& t : c.terms())
        if (uses[t.index] == 0) free_sq += t.coef * t.coef;
    const double r = c.rhs() - c.dot(y);
    const bool violated = c.relation() == Relation::EQ ||
                          (c.relation() == Relation::LE ? r < 0 : r > 0);
    if (free_sq == 0.0 || !violated) return y;
    for (const auto& t : c.terms())
        if (uses[t.index] == 0) y[t.index] += r / free_sq * t.coef;
    return y;
}

}  // namespace detail

/// Prioritized IIS detection. Constraints are enabled one at a time from the
/// highest priority down; each is kept only if the backend solves the
/// enlarged system warm-started from the current solution. On rejection the
/// previous solution stays in place.
template <FeasibilityBackend Backend>
ResolutionResult resolve(const Specification& s, const Backend& backend, const SolverConfig& cfg) {
    cfg.validate();
    ResolutionResult res;
    res.solution.assign(s.num_vars(), 0.0);
    res.attempts.reserve(s.size());

    std::vector<std::size_t> uses(s.num_vars(), 0);

    for (std::size_t id : s.priority_order()) {
        insert_sorted(res.enabled, id);
        SolveOutcome out =
            backend.solve(s, res.enabled, detail::place_free_variables(s[id], res.solution, uses), cfg);
        if (out.converged) {
            res.solution = std::move(out.x);
            for (const auto& t : s[id].terms()) ++uses[t.index];
        } else {
            res.enabled.erase(std::lower_bound(res.enabled.begin(), res.enabled.end(), id));
        }
        res.attempts.push_back({id, out.converged, out.sweeps_used});
    }
    res.iota = characteristic_integer(s, res.enabled);
    return res;
}

}  // namespace kzlayout
