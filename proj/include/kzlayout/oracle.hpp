#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "characteristic.hpp"
#include "dense.hpp"
#include "kaczmarz.hpp"
#include "solver_config.hpp"
#include "spec_model.hpp"

// Exact reference procedures for desk-sized systems. Used to check the
// iterative solvers and the conflict resolver; not meant to scale.

namespace kzlayout::oracle {

inline DenseMatrix dense_rows(const Specification& s, std::span<const std::size_t> ids,
                              std::vector<double>& rhs) {
    DenseMatrix a(ids.size(), s.num_vars());
    rhs.assign(ids.size(), 0.0);
    for (std::size_t r = 0; r < ids.size(); ++r) {
        const auto& c = s[ids[r]];
        for (const auto& t : c.terms()) a(r, t.index) = t.coef;
        rhs[r] = c.rhs();
    }
    return a;
}

/// Minimum-norm least-squares solution of the enabled equalities.
inline Assignment least_squares_dense(const Specification& s,
                                      std::span<const std::size_t> enabled) {
    for (std::size_t id : enabled)
        if (s[id].is_inequality())
            throw std::invalid_argument("least_squares_dense accepts equality constraints only");
    if (enabled.empty()) return Assignment(s.num_vars(), 0.0);
    std::vector<double> b;
    const auto a = dense_rows(s, enabled, b);
    return least_squares_min_norm(a, b);
}

inline bool within(const Specification& s, std::span<const std::size_t> ids,
                   std::span<const double> x, double eps) {
    return all_finite(x) && max_violation(s, ids, x) <= eps &&
           max_raw_violation(s, ids, x) <= eps;
}

/// A point satisfying every enabled constraint within eps, if one exists.
///
/// Equalities are solved by least squares. If that point violates some
/// inequality, the closest feasible point (if any) is the projection onto
/// the affine hull of some face: every subset of inequalities is tried as
/// an active set. Beyond 16 inequalities the search falls back to long
/// alternating projections, which can miss narrow feasible regions.
inline std::optional<Assignment> feasible_point(const Specification& s,
                                                std::span<const std::size_t> enabled,
                                                double eps = 0.01) {
    std::vector<std::size_t> eqs, ineqs;
    for (std::size_t id : enabled) (s[id].is_inequality() ? ineqs : eqs).push_back(id);

    Assignment base = least_squares_dense(s, eqs);
    if (!within(s, eqs, base, eps)) return std::nullopt;
    if (within(s, enabled, base, eps)) return base;

    if (ineqs.size() > 16) {
        SolverConfig cfg;
        cfg.tolerance = eps;
        cfg.max_sweeps = 100000;
        cfg.stall_window = 1000;
        cfg.stall_factor = 0.999999;
        auto out = kzlayout::solve(s, enabled, base, cfg);
        if (out.converged) return out.x;
        return std::nullopt;
    }

    const std::uint32_t subsets = std::uint32_t{1} << ineqs.size();
    std::vector<std::size_t> active;
    for (std::uint32_t mask = 1; mask < subsets; ++mask) {
        active = eqs;
        for (std::size_t k = 0; k < ineqs.size(); ++k)
            if (mask >> k & 1u) active.push_back(ineqs[k]);
        std::vector<double> rhs;
        const auto m = dense_rows(s, active, rhs);
        const auto fitted = m.multiply(base);
        for (std::size_t r = 0; r < rhs.size(); ++r) rhs[r] -= fitted[r];
        const auto delta = least_squares_min_norm(m, rhs);
        Assignment p = base;
        for (std::size_t j = 0; j < p.size(); ++j) p[j] += delta[j];
        if (within(s, enabled, p, eps)) return p;
    }
    return std::nullopt;
}

inline bool feasible_exact(const Specification& s, std::span<const std::size_t> enabled,
                           double eps = 0.01) {
    return feasible_point(s, enabled, eps).has_value();
}

struct MaxFeasible {
    CharacteristicInteger iota;
    ConstraintSet enabled;
};

/// Brute force over all 2^m subsets, scanned in descending characteristic
/// order so the first feasible subset is the maximum.
inline MaxFeasible max_feasible_iota(const Specification& s, double eps = 0.01) {
    const std::size_t m = s.size();
    if (m > 20) throw std::invalid_argument("max_feasible_iota: more than 20 constraints");
    const auto order = s.priority_order();
    ConstraintSet subset;
    for (std::uint32_t mask = (std::uint32_t{1} << m); mask-- > 0;) {
        subset.clear();
        for (std::size_t bit = 0; bit < m; ++bit)
            if (mask >> bit & 1u) subset.push_back(order[m - 1 - bit]);
        subset = normalized(std::move(subset));
        if (feasible_exact(s, subset, eps)) return {characteristic_integer(s, subset), subset};
    }
    return {CharacteristicInteger(m), {}};
}

/// Conflict-resolution backend answering feasibility exactly.
struct ExactBackend {
    double eps = 0.01;

    SolveOutcome solve(const Specification& s, std::span<const std::size_t> enabled,
                       Assignment x0, const SolverConfig& cfg) const {
        SolveOutcome out;
        auto p = feasible_point(s, enabled, std::min(eps, cfg.tolerance));
        out.converged = p.has_value();
        out.x = p ? std::move(*p) : std::move(x0);
        out.final_error = max_violation(s, enabled, out.x);
        return out;
    }
};

}  // namespace kzlayout::oracle
