#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "kzlayout/relaxation.hpp"
#include "kzlayout/spec_io.hpp"
#include "support.hpp"

using namespace kzlayout;

TEST(Pivots, OnlyChoice) {
    auto s = parse_specification("vars 1\nc 0 eq 1 0:1\n");
    auto pa = assign_pivots_random(s, s.all(), 1);
    EXPECT_EQ(pa.pivot(0), 0u);
}

TEST(Pivots, InjectiveOnSharedVariable) {
    auto s = parse_specification("vars 1\nc 0 eq 1 0:1\nc 1 eq 2 0:1\n");
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto pa = assign_pivots_random(s, s.all(), seed);
        EXPECT_EQ(pa.matched(), 1u);
    }
}

TEST(Pivots, SeededAndValid) {
    std::mt19937_64 rng(3);
    Assignment planted;
    auto s = fixtures::planted_system(rng, 10, 25, 0.2, planted);
    auto a = assign_pivots_random(s, s.all(), 77);
    EXPECT_EQ(a, assign_pivots_random(s, s.all(), 77));
    std::set<std::size_t> used;
    for (std::size_t id = 0; id < s.size(); ++id) {
        if (!a.has_pivot(id)) continue;
        EXPECT_TRUE(used.insert(a.pivot(id)).second);
        bool in_row = false;
        for (const auto& t : s[id].terms()) in_row |= t.index == a.pivot(id);
        EXPECT_TRUE(in_row);
    }
}

TEST(RelaxSolve, DiagonalSystem) {
    auto s = parse_specification("vars 2\nc 0 eq 1 0:1\nc 1 eq 2 1:1\n");
    auto out = relax_solve(s, s.all(), {0, 0}, relaxation_defaults());
    EXPECT_TRUE(out.converged);
    EXPECT_NEAR(out.x[0], 1.0, 0.01);
    EXPECT_NEAR(out.x[1], 2.0, 0.01);
}

TEST(RelaxSolve, CoupledPairMatchesHandRecurrence) {
    // Recurrence for pivots {c0 -> x0, c1 -> x1}, omega 0.7:
    //   x0 += 0.7 * (2 - x0 - x1)
    //   x1 += 0.7 * (0 - (x0 - x1)) / -1
    double x0 = 0, x1 = 0;
    std::size_t sweeps = 0;
    auto err = [&] { return std::max(std::abs(2 - x0 - x1), std::abs(x0 - x1)); };
    while (err() > 0.01) {
        x0 += 0.7 * (2 - x0 - x1);
        x1 += 0.7 * (0 - (x0 - x1)) / -1.0;
        ++sweeps;
        ASSERT_LT(sweeps, 1000u);
    }

    auto s = parse_specification("vars 2\nc 0 eq 2 0:1 1:1\nc 1 eq 0 0:1 1:-1\n");
    PivotAssignment pa(2);
    pa.assign(0, 0);
    pa.assign(1, 1);
    auto out = relax_solve(s, s.all(), {0, 0}, relaxation_defaults(), pa);
    EXPECT_TRUE(out.converged);
    EXPECT_EQ(out.sweeps_used, sweeps);
    EXPECT_DOUBLE_EQ(out.x[0], x0);
    EXPECT_DOUBLE_EQ(out.x[1], x1);
    EXPECT_NEAR(out.x[0], 1.0, 0.01);
    EXPECT_NEAR(out.x[1], 1.0, 0.01);
}

TEST(RelaxSolve, EmptyEnabledSet) {
    auto s = parse_specification("vars 1\nc 0 eq 1 0:1\n");
    auto out = relax_solve(s, ConstraintSet{}, {0}, relaxation_defaults());
    EXPECT_TRUE(out.converged);
    EXPECT_EQ(out.sweeps_used, 0u);
}

TEST(RelaxSolve, StepTouchesOnlyPivot) {
    const Constraint c({{0, 1.0}, {2, 2.0}, {3, 1.0}}, Relation::EQ, 9, 0);
    Assignment x{1, 1, 1, 1};
    EXPECT_EQ(relax_row_inplace(x, c, 2, 0.7), 1u);
    EXPECT_EQ(x[0], 1);
    EXPECT_EQ(x[1], 1);
    EXPECT_EQ(x[3], 1);
    EXPECT_DOUBLE_EQ(x[2], 1 + 0.7 * (9 - 4) / 2.0);
}

TEST(RelaxSolve, SatisfiedInequalityAndUnmatchedRowSkipped) {
    const Constraint le({{0, 1.0}}, Relation::LE, 5, 0);
    Assignment x{3};
    EXPECT_EQ(relax_row_inplace(x, le, 0, 0.7), 0u);
    EXPECT_EQ(relax_row_inplace(x, Constraint({{0, 1.0}}, Relation::EQ, 5, 0),
                                PivotAssignment::none, 0.7),
              0u);
    EXPECT_EQ(x[0], 3);
}

TEST(RelaxSolve, UnmatchedConflictIsRejectedByStall) {
    auto s = parse_specification("vars 1\nc 0 eq 1 0:1\nc 1 eq 2 0:1\n");
    auto out = relax_solve(s, s.all(), {0}, relaxation_defaults());
    EXPECT_FALSE(out.converged);
}
