#pragma once

// Seeded generators of small random constraint systems shared by the unit
// and acceptance suites.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "kzlayout/spec_model.hpp"

namespace kzlayout::fixtures {

inline std::vector<Term> random_terms(std::mt19937_64& rng, std::size_t n, std::size_t max_terms,
                                      bool integer_coefs) {
    std::uniform_int_distribution<std::size_t> count(1, std::min(n, max_terms));
    std::vector<std::size_t> vars(n);
    std::iota(vars.begin(), vars.end(), std::size_t{0});
    std::shuffle(vars.begin(), vars.end(), rng);
    const std::size_t k = count(rng);
    std::vector<Term> terms;
    std::uniform_int_distribution<int> icoef(-2, 2);
    std::uniform_real_distribution<double> rcoef(0.25, 2.0);
    std::bernoulli_distribution neg(0.5);
    for (std::size_t j = 0; j < k; ++j) {
        double c;
        if (integer_coefs) {
            do c = icoef(rng);
            while (c == 0.0);
        } else {
            c = rcoef(rng) * (neg(rng) ? -1.0 : 1.0);
        }
        terms.push_back({vars[j], c});
    }
    return terms;
}

inline std::vector<std::uint64_t> shuffled_priorities(std::mt19937_64& rng, std::size_t m) {
    std::vector<std::uint64_t> p(m);
    std::iota(p.begin(), p.end(), std::uint64_t{0});
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

/// Consistent system with a known solution `planted`; inequalities hold at
/// the planted point with random slack.
inline Specification planted_system(std::mt19937_64& rng, std::size_t n, std::size_t m,
                                    double ineq_fraction, Assignment& planted) {
    std::uniform_real_distribution<double> val(-10.0, 10.0);
    std::uniform_real_distribution<double> slack(0.0, 3.0);
    std::bernoulli_distribution ineq(ineq_fraction), le(0.5);
    planted.assign(n, 0.0);
    for (auto& v : planted) v = val(rng);
    auto prio = shuffled_priorities(rng, m);
    std::vector<Constraint> rows;
    for (std::size_t i = 0; i < m; ++i) {
        auto terms = random_terms(rng, n, 4, false);
        double ax = 0.0;
        for (const auto& t : terms) ax += t.coef * planted[t.index];
        if (ineq(rng)) {
            if (le(rng)) rows.emplace_back(terms, Relation::LE, ax + slack(rng), prio[i]);
            else rows.emplace_back(terms, Relation::GE, ax - slack(rng), prio[i]);
        } else {
            rows.emplace_back(terms, Relation::EQ, ax, prio[i]);
        }
    }
    return Specification(n, std::move(rows));
}

/// Small integer system (m <= 12) mixing equalities and inequalities around
/// a planted integer point, with deliberate conflicts: copies of earlier
/// rows with shifted right-hand sides and contradictory inequality pairs.
/// With `inequalities` false every row is an equality.
inline Specification conflicted_system(std::mt19937_64& rng, std::size_t max_m = 12,
                                       bool inequalities = true) {
    std::uniform_int_distribution<std::size_t> nvars(1, 4);
    std::uniform_int_distribution<std::size_t> mcount(2, max_m);
    std::uniform_int_distribution<int> val(-5, 5), shift(1, 4);
    std::uniform_int_distribution<int> kind(0, 9);
    std::bernoulli_distribution coin(0.5);

    const std::size_t n = nvars(rng);
    const std::size_t m = mcount(rng);
    std::vector<double> planted(n);
    for (auto& v : planted) v = val(rng);

    struct Row {
        std::vector<Term> terms;
        Relation rel;
        double rhs;
    };
    std::vector<Row> rows;
    while (rows.size() < m) {
        int k = kind(rng);
        if (!inequalities && k >= 6) k = 4;
        if (k < 3 && !rows.empty()) {
            // conflicting copy of an earlier row
            std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
            Row r = rows[pick(rng)];
            const double d = shift(rng) * (coin(rng) ? 1.0 : -1.0);
            if (r.rel == Relation::EQ) r.rhs += d;
            else if (r.rel == Relation::LE) r.rel = Relation::GE, r.rhs += std::abs(d) + 1.0;
            else r.rel = Relation::LE, r.rhs -= std::abs(d) + 1.0;
            rows.push_back(std::move(r));
            continue;
        }
        auto terms = random_terms(rng, n, 3, true);
        double ax = 0.0;
        for (const auto& t : terms) ax += t.coef * planted[t.index];
        if (k < 6) {
            // equality, sometimes off the planted point
            rows.push_back({terms, Relation::EQ, ax + (k == 5 ? shift(rng) : 0)});
        } else if (k < 8) {
            rows.push_back({terms, Relation::LE, ax + static_cast<double>(k - 6 + shift(rng) - 1)});
        } else {
            rows.push_back({terms, Relation::GE, ax - static_cast<double>(k - 8 + shift(rng) - 1)});
        }
    }
    auto prio = shuffled_priorities(rng, m);
    std::vector<Constraint> cs;
    for (std::size_t i = 0; i < m; ++i) cs.emplace_back(rows[i].terms, rows[i].rel, rows[i].rhs, prio[i]);
    return Specification(n, std::move(cs));
}

}  // namespace kzlayout::fixtures
