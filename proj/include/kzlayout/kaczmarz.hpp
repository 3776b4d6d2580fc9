#pragma once

#include <span>

#include "solver_config.hpp"
#include "spec_model.hpp"

namespace kzlayout {

/// Orthogonal (relaxed) projection of x onto the hyperplane of `c`, in place:
///   x += omega * (b - a.x) / ||a||^2 * a
/// Satisfied inequalities are skipped; violated ones are treated as
/// equalities. Only variables in c.terms() are written. Returns the number
/// of variables touched.
inline std::size_t project_row_inplace(std::span<double> x, const Constraint& c, double omega) {
    if (c.is_inequality() && violation(c, x) == 0.0) return 0;
    const double scale = omega * residual(c, x) / c.squared_norm();
    for (const auto& t : c.terms()) x[t.index] += scale * t.coef;
    return c.terms().size();
}

inline Assignment project_row(Assignment x, const Constraint& c, double omega) {
    project_row_inplace(x, c, omega);
    return x;
}

/// One pass of |enabled| projections drawn by `selector`.
inline std::size_t sweep_inplace(std::span<double> x, const Specification& s,
                                 RowSelector& selector, double omega) {
    std::size_t touched = 0;
    for (std::size_t k = 0; k < selector.size(); ++k)
        touched += project_row_inplace(x, s[selector.pick(k)], omega);
    return touched;
}

inline Assignment sweep(Assignment x, const Specification& s, RowSelector& selector,
                        double omega) {
    sweep_inplace(x, s, selector, omega);
    return x;
}

/// Kaczmarz iteration on the enabled rows, starting from `x0`.
inline SolveOutcome solve(const Specification& s, std::span<const std::size_t> enabled,
                          Assignment x0, const SolverConfig& cfg) {
    return run_sweeps(s, enabled, std::move(x0), cfg, [&](std::span<double> x, std::size_t id) {
        return project_row_inplace(x, s[id], cfg.omega);
    });
}

inline SolveOutcome solve(const Specification& s, std::span<const std::size_t> enabled,
                          const SolverConfig& cfg) {
    return solve(s, enabled, Assignment(s.num_vars(), 0.0), cfg);
}

struct KaczmarzBackend {
    SolveOutcome solve(const Specification& s, std::span<const std::size_t> enabled,
                       Assignment x0, const SolverConfig& cfg) const {
        return kzlayout::solve(s, enabled, std::move(x0), cfg);
    }
};

}  // namespace kzlayout
