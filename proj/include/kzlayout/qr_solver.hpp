#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "characteristic.hpp"
#include "conflict_resolution.hpp"
#include "oracle.hpp"
#include "solver_config.hpp"
#include "spec_model.hpp"

namespace kzlayout {

/// Dense upper-triangular factor R of a growing set of equality rows,
/// updated one row at a time with Givens rotations. Row k is either empty or
/// holds the pivot of column k; the rotated right-hand sides are kept
/// alongside, so least-squares solutions need only a back-substitution.
class GivensFactor {
public:
    struct Saved {
        std::size_t row;
        bool used;
        double qtb;
        std::vector<double> tail;  // row entries k..n-1 before the update
    };
    using UndoLog = std::vector<Saved>;

    struct AddResult {
        bool independent;  // opened a new pivot
        double leftover;   // rotated-out rhs when the row was dependent
    };

    explicit GivensFactor(std::size_t n) : n_(n), r_(n * n, 0.0), qtb_(n, 0.0), used_(n, false) {}

    std::size_t size() const noexcept { return n_; }

    std::size_t rank() const noexcept {
        return static_cast<std::size_t>(std::count(used_.begin(), used_.end(), true));
    }

    /// Rotates the row (a, rhs) into R, recording every touched row in `log`.
    AddResult add(const Constraint& c, double rhs, UndoLog& log) {
        w_.assign(n_, 0.0);
        for (const auto& t : c.terms()) w_[t.index] = t.coef;
        double beta = rhs;
        const double tiny = 1e-10 * c.norm();
        for (std::size_t k = 0; k < n_; ++k) {
            if (std::abs(w_[k]) <= tiny) continue;
            double* row = &r_[k * n_];
            log.push_back({k, used_[k], qtb_[k], std::vector<double>(row + k, row + n_)});
            if (!used_[k]) {
                std::copy(w_.begin() + static_cast<std::ptrdiff_t>(k), w_.end(), row + k);
                qtb_[k] = beta;
                used_[k] = true;
                return {true, 0.0};
            }
            const double rho = std::hypot(row[k], w_[k]);
            const double cs = row[k] / rho, sn = w_[k] / rho;
            for (std::size_t j = k; j < n_; ++j) {
                const double rkj = row[j], wj = w_[j];
                row[j] = cs * rkj + sn * wj;
                w_[j] = cs * wj - sn * rkj;
            }
            w_[k] = 0.0;
            const double q = qtb_[k];
            qtb_[k] = cs * q + sn * beta;
            beta = cs * beta - sn * q;
        }
        return {false, beta};
    }

    /// Reverts every row recorded in `log`, newest first, and clears it.
    void undo(UndoLog& log) {
        for (auto it = log.rbegin(); it != log.rend(); ++it) {
            std::copy(it->tail.begin(), it->tail.end(), &r_[it->row * n_ + it->row]);
            used_[it->row] = it->used;
            qtb_[it->row] = it->qtb;
        }
        log.clear();
    }

    /// Basic least-squares solution; columns without a pivot are set to 0.
    Assignment solve() const {
        Assignment x(n_, 0.0);
        for (std::size_t k = n_; k-- > 0;) {
            if (!used_[k]) continue;
            const double* row = &r_[k * n_];
            double acc = qtb_[k];
            for (std::size_t j = k + 1; j < n_; ++j) acc -= row[j] * x[j];
            x[k] = acc / row[k];
        }
        return x;
    }

private:
    std::size_t n_;
    std::vector<double> r_;  // row-major n x n
    std::vector<double> qtb_;
    std::vector<bool> used_;
    std::vector<double> w_;  // scratch row
};

/// Prioritized resolution with a direct solver. Equalities go into the
/// Givens factor; a row is kept when it is independent of the kept rows or
/// when the least-squares solution of the enlarged system stays within
/// tolerance. Inequalities are held inactive while the current solution
/// satisfies them and otherwise enter the factor at their bound (active-set
/// heuristic). A rejected row is rolled back from an undo log.
class QrResolver {
public:
    QrResolver(const Specification& s, const SolverConfig& cfg)
        : s_(s), cfg_(cfg), factor_(s.num_vars()), active_(s.size(), false), x_(s.num_vars(), 0.0) {
        cfg_.validate();
    }

    bool attempt(std::size_t id) {
        const Constraint& c = s_[id];
        const std::size_t inactive_before = inactive_;
        GivensFactor::UndoLog log;
        std::vector<std::size_t> activated;

        insert_sorted(enabled_, id);
        if (c.relation() != Relation::EQ && within(c, current())) {
            ++inactive_;
            return true;
        }
        const auto added = factor_.add(c, c.rhs(), log);
        if (c.relation() != Relation::EQ) {
            active_[id] = true;
            activated.push_back(id);
        }
        x_valid_ = false;
        const bool exact = added.independent || std::abs(added.leftover) <= 1e-9 * (1.0 + std::abs(c.rhs()));
        if ((exact && inactive_ == 0) || settle(log, activated)) return true;

        factor_.undo(log);
        for (std::size_t a : activated) active_[a] = false;
        inactive_ = inactive_before;
        enabled_.erase(std::lower_bound(enabled_.begin(), enabled_.end(), id));
        x_valid_ = false;
        return false;
    }

    const ConstraintSet& enabled() const noexcept { return enabled_; }

    const Assignment& current() {
        if (!x_valid_) {
            x_ = factor_.solve();
            x_valid_ = true;
        }
        return x_;
    }

private:
    bool within(const Constraint& c, std::span<const double> x) const {
        const double v = violation(c, x);
        return (cfg_.raw_tolerance ? v : v / std::max(1.0, c.norm())) <= cfg_.tolerance;
    }

    // Checks the enabled set at the new least-squares point, activating any
    // inactive inequality it violates. Fails when a factored row misses the
    // tolerance.
    bool settle(GivensFactor::UndoLog& log, std::vector<std::size_t>& activated) {
        for (;;) {
            const Assignment& x = current();
            std::vector<std::size_t> violated;
            for (std::size_t id : enabled_) {
                const Constraint& c = s_[id];
                if (within(c, x)) continue;
                if (c.relation() == Relation::EQ || active_[id]) return false;
                violated.push_back(id);
            }
            if (violated.empty()) return true;
            for (std::size_t id : violated) {
                factor_.add(s_[id], s_[id].rhs(), log);
                active_[id] = true;
                activated.push_back(id);
                --inactive_;
            }
            x_valid_ = false;
        }
    }

    const Specification& s_;
    SolverConfig cfg_;
    GivensFactor factor_;
    std::vector<bool> active_;
    std::size_t inactive_ = 0;
    ConstraintSet enabled_;
    Assignment x_;
    bool x_valid_ = true;
};

inline ResolutionResult resolve_qr(const Specification& s, const SolverConfig& cfg) {
    QrResolver qr(s, cfg);
    ResolutionResult res;
    res.attempts.reserve(s.size());
    for (std::size_t id : s.priority_order()) res.attempts.push_back({id, qr.attempt(id), 0});
    res.enabled = qr.enabled();
    res.solution = qr.current();
    res.iota = characteristic_integer(s, res.enabled);
    return res;
}

/// Direct solve of a fixed enabled set; converged when every row was kept.
inline SolveOutcome qr_solve(const Specification& s, std::span<const std::size_t> enabled,
                             const SolverConfig& cfg) {
    QrResolver qr(s, cfg);
    ConstraintSet ids(enabled.begin(), enabled.end());
    std::sort(ids.begin(), ids.end(),
              [&](std::size_t a, std::size_t b) { return s.rank_position(a) < s.rank_position(b); });
    bool all = true;
    for (std::size_t id : ids) all &= qr.attempt(id);
    SolveOutcome out;
    out.x = qr.current();
    out.converged = all;
    out.final_error = max_violation(s, enabled, out.x);
    return out;
}

/// One-shot direct solve: dense Householder least squares over every
/// equality at once, with violated inequalities moved into the factored set
/// at their bound and the system refactored until none is violated. There
/// is no priority handling; the enabled set is whatever the least-squares
/// point satisfies within tolerance.
inline ResolutionResult resolve_dense_qr(const Specification& s, const SolverConfig& cfg) {
    cfg.validate();
    ConstraintSet rows, pending;
    for (std::size_t id = 0; id < s.size(); ++id)
        (s[id].is_inequality() ? pending : rows).push_back(id);

    auto within = [&](std::size_t id, std::span<const double> x) {
        const double v = violation(s[id], x);
        return (cfg.raw_tolerance ? v : v / std::max(1.0, s[id].norm())) <= cfg.tolerance;
    };

    ResolutionResult res;
    res.solution.assign(s.num_vars(), 0.0);
    for (;;) {
        if (!rows.empty()) {
            std::vector<double> b;
            const auto a = oracle::dense_rows(s, rows, b);
            res.solution = least_squares_min_norm(a, b);
        }
        ConstraintSet still;
        bool moved = false;
        for (std::size_t id : pending) {
            if (within(id, res.solution)) {
                still.push_back(id);
            } else {
                insert_sorted(rows, id);
                moved = true;
            }
        }
        pending = std::move(still);
        if (!moved) break;
    }
    for (std::size_t id = 0; id < s.size(); ++id)
        if (within(id, res.solution)) res.enabled.push_back(id);
    res.iota = characteristic_integer(s, res.enabled);
    return res;
}

}  // namespace kzlayout
