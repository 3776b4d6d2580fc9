#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kzlayout {

/// Raised for malformed constraints or specifications. `line()` is the
/// 1-based source line when the error came from the text parser, else 0.
class SpecError : public std::runtime_error {
public:
    explicit SpecError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

enum class Relation { EQ, LE, GE };

struct Term {
    std::size_t index;
    double coef;

    friend bool operator==(const Term&, const Term&) = default;
};

/// One sparse row a_i . x (rel) b_i with a priority rank (0 = highest).
///
/// Terms are kept sorted by variable index. The squared row norm is cached
/// at construction; rows are immutable afterwards.
class Constraint {
public:
    Constraint(std::vector<Term> terms, Relation rel, double rhs, std::uint64_t priority)
        : terms_(std::move(terms)), rel_(rel), rhs_(rhs), priority_(priority) {
        if (terms_.empty()) throw SpecError("empty constraint row");
        if (!std::isfinite(rhs_)) throw SpecError("non-finite right-hand side");
        std::sort(terms_.begin(), terms_.end(),
                  [](const Term& a, const Term& b) { return a.index < b.index; });
        squared_norm_ = 0.0;
        for (std::size_t k = 0; k < terms_.size(); ++k) {
            if (terms_[k].coef == 0.0) throw SpecError("zero coefficient for variable " +
                                                       std::to_string(terms_[k].index));
            if (!std::isfinite(terms_[k].coef)) throw SpecError("non-finite coefficient");
            if (k > 0 && terms_[k].index == terms_[k - 1].index)
                throw SpecError("duplicate variable index " + std::to_string(terms_[k].index));
            squared_norm_ += terms_[k].coef * terms_[k].coef;
        }
    }

    std::span<const Term> terms() const noexcept { return terms_; }
    Relation relation() const noexcept { return rel_; }
    double rhs() const noexcept { return rhs_; }
    std::uint64_t priority() const noexcept { return priority_; }
    double squared_norm() const noexcept { return squared_norm_; }
    double norm() const noexcept { return std::sqrt(squared_norm_); }
    bool is_inequality() const noexcept { return rel_ != Relation::EQ; }

    double dot(std::span<const double> x) const noexcept {
        double s = 0.0;
        for (const auto& t : terms_) s += t.coef * x[t.index];
        return s;
    }

    friend bool operator==(const Constraint& a, const Constraint& b) {
        return a.terms_ == b.terms_ && a.rel_ == b.rel_ && a.rhs_ == b.rhs_ &&
               a.priority_ == b.priority_;
    }

private:
    std::vector<Term> terms_;
    Relation rel_;
    double rhs_;
    std::uint64_t priority_;
    double squared_norm_;
};

using Assignment = std::vector<double>;

/// Constraint ids, kept sorted ascending by id (specification order).
using ConstraintSet = std::vector<std::size_t>;

inline ConstraintSet normalized(ConstraintSet ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

inline void insert_sorted(ConstraintSet& ids, std::size_t id) {
    ids.insert(std::lower_bound(ids.begin(), ids.end(), id), id);
}

/// A validated system Ax (rel) b over `num_vars` variables.
class Specification {
public:
    Specification(std::size_t num_vars, std::vector<Constraint> constraints)
        : num_vars_(num_vars), constraints_(std::move(constraints)) {
        if (num_vars_ == 0) throw SpecError("variable count must be positive");
        for (std::size_t i = 0; i < constraints_.size(); ++i) {
            const auto& c = constraints_[i];
            if (c.terms().back().index >= num_vars_)
                throw SpecError("constraint " + std::to_string(i) + ": variable index " +
                                std::to_string(c.terms().back().index) + " out of range");
        }
        by_priority_.resize(constraints_.size());
        std::iota(by_priority_.begin(), by_priority_.end(), std::size_t{0});
        std::sort(by_priority_.begin(), by_priority_.end(), [this](std::size_t a, std::size_t b) {
            return constraints_[a].priority() < constraints_[b].priority();
        });
        rank_position_.resize(constraints_.size());
        for (std::size_t pos = 0; pos < by_priority_.size(); ++pos) {
            if (pos > 0 && constraints_[by_priority_[pos]].priority() ==
                               constraints_[by_priority_[pos - 1]].priority())
                throw SpecError("duplicate priority " +
                                std::to_string(constraints_[by_priority_[pos]].priority()) +
                                " (constraints " + std::to_string(by_priority_[pos - 1]) +
                                " and " + std::to_string(by_priority_[pos]) + ")");
            rank_position_[by_priority_[pos]] = pos;
        }
    }

    std::size_t num_vars() const noexcept { return num_vars_; }
    std::size_t size() const noexcept { return constraints_.size(); }
    const Constraint& operator[](std::size_t id) const { return constraints_[id]; }
    std::span<const Constraint> constraints() const noexcept { return constraints_; }

    /// Constraint ids ordered from highest to lowest priority.
    std::span<const std::size_t> priority_order() const noexcept { return by_priority_; }

    /// Position of a constraint in priority order (0 = highest priority).
    std::size_t rank_position(std::size_t id) const { return rank_position_[id]; }

    ConstraintSet all() const {
        ConstraintSet ids(constraints_.size());
        std::iota(ids.begin(), ids.end(), std::size_t{0});
        return ids;
    }

    std::size_t nnz() const noexcept {
        std::size_t n = 0;
        for (const auto& c : constraints_) n += c.terms().size();
        return n;
    }

    friend bool operator==(const Specification& a, const Specification& b) {
        return a.num_vars_ == b.num_vars_ && a.constraints_ == b.constraints_;
    }

private:
    std::size_t num_vars_;
    std::vector<Constraint> constraints_;
    std::vector<std::size_t> by_priority_;
    std::vector<std::size_t> rank_position_;
};

/// b_i - a_i . x, signed and unnormalized.
inline double residual(const Constraint& c, std::span<const double> x) {
    return c.rhs() - c.dot(x);
}

/// Amount by which x fails the constraint; zero means satisfied.
inline double violation(const Constraint& c, std::span<const double> x) {
    const double r = residual(c, x);
    switch (c.relation()) {
        case Relation::EQ: return std::abs(r);
        case Relation::LE: return std::max(0.0, -r);
        case Relation::GE: return std::max(0.0, r);
    }
    return 0.0;
}

/// Row-normalized convergence error: max over `enabled` of
/// violation / max(1, ||a_i||). Zero for the empty set.
inline double max_violation(const Specification& s, std::span<const std::size_t> enabled,
                            std::span<const double> x) {
    double worst = 0.0;
    for (std::size_t id : enabled) {
        const auto& c = s[id];
        worst = std::max(worst, violation(c, x) / std::max(1.0, c.norm()));
    }
    return worst;
}

/// Largest raw violation over `enabled`.
inline double max_raw_violation(const Specification& s, std::span<const std::size_t> enabled,
                                std::span<const double> x) {
    double worst = 0.0;
    for (std::size_t id : enabled) worst = std::max(worst, violation(s[id], x));
    return worst;
}

inline bool all_finite(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace kzlayout
