#include <gtest/gtest.h>

#include <sstream>

#include "kzlayout/bench.hpp"
#include "kzlayout/spec_io.hpp"

using namespace kzlayout;

TEST(CountSuboptimal, CountsEnabledRowsOverTolerance) {
    auto s = parse_specification("vars 2\nc 0 eq 1 0:1\nc 1 le 0 1:1\nc 2 eq 3 0:1 1:1\n");
    const Assignment x{1.005, 0.5};
    EXPECT_EQ(count_suboptimal(s, s.all(), x, 0.01), 2u);
    EXPECT_EQ(count_suboptimal(s, ConstraintSet{0}, x, 0.01), 0u);
    EXPECT_EQ(count_suboptimal(s, ConstraintSet{0}, x, 0.001), 1u);
    const Assignment bad{std::nan(""), 0.0};
    EXPECT_EQ(count_suboptimal(s, ConstraintSet{0}, bad, 0.01), 1u);
}

TEST(Median, OddEvenAndEmpty) {
    EXPECT_EQ(median({3, 1, 2}), 2.0);
    EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
    EXPECT_EQ(median({}), 0.0);
}

TEST(Solvers, NamesAndDefaults) {
    for (const auto& n : solver_names()) EXPECT_TRUE(is_solver(n));
    EXPECT_FALSE(is_solver("simplex"));
    EXPECT_THROW(solver_defaults("simplex"), UnknownSolver);
    EXPECT_EQ(solver_defaults("relaxation").omega, 0.7);
    EXPECT_EQ(solver_defaults("kaczmarz").omega, SolverConfig{}.omega);
}

TEST(TimeSolver, FieldsAreDeterministic) {
    const auto l = generate_layout(30, 17);
    for (const auto& name : solver_names()) {
        const auto a = time_solver(name, l.spec, solver_defaults(name), 3);
        const auto b = time_solver(name, l.spec, solver_defaults(name), 1);
        EXPECT_GT(a.time_ms, 0.0) << name;
        EXPECT_EQ(a.c, 120u);
        EXPECT_TRUE(a.same_outcome(b)) << name;
        EXPECT_FALSE(a.iota_hex.empty());
        if (name != "qr") {
            EXPECT_TRUE(a.converged) << name;
            EXPECT_EQ(a.suboptimal, 0u) << name;
        }
    }
    EXPECT_THROW(time_solver("simplex", l.spec, SolverConfig{}, 1), UnknownSolver);
    EXPECT_THROW(time_solver("kaczmarz", l.spec, SolverConfig{}, 0), std::invalid_argument);
}

TEST(TimeSolver, SolveOnlyPhase) {
    const auto l = generate_layout(20, 3);
    for (const auto& name : solver_names()) {
        const auto r = time_solver(name, l.spec, solver_defaults(name), 1, Phase::SolveOnly);
        EXPECT_GT(r.time_ms, 0.0);
        EXPECT_EQ(r.c, 80u);
    }
}

TEST(TimeSolver, KaczmarzBeatsDenseQrOnLargeLayout) {
    const auto l = generate_layout(300, 342);
    const auto k = time_solver("kaczmarz", l.spec, solver_defaults("kaczmarz"), 1);
    const auto q = time_solver("qr", l.spec, solver_defaults("qr"), 1);
    EXPECT_LT(k.time_ms, q.time_ms);
}

TEST(Experiment, RowsPerSolverAndSpec) {
    ExperimentOptions opt;
    opt.solvers = {"kaczmarz", "relaxation"};
    std::ostringstream csv;
    const auto plan = plan_suite(1, 10, 1, 1, 7);
    std::size_t calls = 0;
    const auto sum = run_experiment(plan, opt, csv, [&](const SuiteEntry&, const BenchmarkRecord&) { ++calls; });
    EXPECT_EQ(sum.specs, 10u);
    EXPECT_EQ(sum.rows, 20u);
    EXPECT_EQ(calls, 20u);
    std::istringstream in(csv.str());
    const auto recs = read_csv(in);
    ASSERT_EQ(recs.size(), 20u);
    EXPECT_EQ(recs[0].solver, "kaczmarz");
    EXPECT_EQ(recs[1].solver, "relaxation");
    EXPECT_EQ(recs[19].c, 40u);
    EXPECT_EQ(csv.str().substr(0, csv_header.size() + 2), std::string(csv_header) + "\r\n");
}

TEST(Experiment, EmptyPlanWritesHeaderOnly) {
    std::ostringstream csv;
    const auto sum = run_experiment({}, ExperimentOptions{}, csv);
    EXPECT_EQ(csv.str(), std::string(csv_header) + "\r\n");
    EXPECT_EQ(sum.rows, 0u);
}

TEST(Experiment, UnknownSolverFailsBeforeWriting) {
    ExperimentOptions opt;
    opt.solvers = {"kaczmarz", "nope"};
    std::ostringstream csv;
    EXPECT_THROW(run_experiment(plan_suite(1, 2, 1, 1, 0), opt, csv), UnknownSolver);
    EXPECT_TRUE(csv.str().empty());
}

TEST(Experiment, RerunMatchesApartFromTiming) {
    ExperimentOptions opt;
    opt.solvers = {"kaczmarz", "relaxation", "qr", "givens"};
    const auto plan = plan_suite(5, 25, 5, 2, 99);
    std::ostringstream a, b;
    const auto sa = run_experiment(plan, opt, a);
    const auto sb = run_experiment(plan, opt, b);
    EXPECT_EQ(sa.suite_hash, sb.suite_hash);
    std::istringstream ia(a.str()), ib(b.str());
    const auto ra = read_csv(ia), rb = read_csv(ib);
    ASSERT_EQ(ra.size(), rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) EXPECT_TRUE(ra[i].same_outcome(rb[i])) << i;
}

TEST(Csv, QuotingRoundTrip) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    BenchmarkRecord r{"odd,\"name\"\nx", 12, 3, 1.5, true, 0, 7, "0xff"};
    std::ostringstream os;
    os << csv_header << "\r\n";
    write_csv_row(os, r);
    std::istringstream in(os.str());
    const auto back = read_csv(in);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_TRUE(back[0].same_outcome(r));
    EXPECT_DOUBLE_EQ(back[0].time_ms, 1.5);
}

TEST(Csv, RowFormat) {
    std::ostringstream os;
    write_csv_row(os, BenchmarkRecord{"kaczmarz", 4, 0, 0.25, false, 2, 3, "0xe"});
    EXPECT_EQ(os.str(), "kaczmarz,4,0,0.2500,0,2,3,0xe\r\n");
}

TEST(Csv, ReadErrors) {
    std::istringstream empty("");
    EXPECT_THROW(read_csv(empty), std::runtime_error);
    std::istringstream header("solver,c\r\n");
    EXPECT_THROW(read_csv(header), std::runtime_error);
    std::istringstream short_row(std::string(csv_header) + "\r\nkaczmarz,4\r\n");
    EXPECT_THROW(read_csv(short_row), std::runtime_error);
    std::istringstream bad_num(std::string(csv_header) + "\r\nkaczmarz,x,0,1.0,1,0,4,0xf\r\n");
    EXPECT_THROW(read_csv(bad_num), std::runtime_error);
    std::istringstream open_quote(std::string(csv_header) + "\r\n\"kaczmarz,4\r\n");
    EXPECT_THROW(read_csv(open_quote), std::runtime_error);
}

TEST(Fitting, MedianBySizeAndGrouping) {
    std::vector<BenchmarkRecord> recs{
        {"a", 4, 0, 1.0, true, 0, 4, "0xf"}, {"a", 4, 1, 3.0, true, 0, 4, "0xf"},
        {"a", 4, 2, 2.0, true, 0, 4, "0xf"}, {"b", 8, 0, 5.0, true, 0, 8, "0xff"},
        {"a", 8, 0, 6.0, true, 0, 8, "0xff"}};
    const auto groups = points_by_solver(recs);
    ASSERT_EQ(groups.size(), 2u);
    const auto med = median_by_size(groups.at("a"));
    ASSERT_EQ(med.size(), 2u);
    EXPECT_EQ(med[0], (DataPoint{4.0, 2.0}));
    EXPECT_EQ(med[1], (DataPoint{8.0, 6.0}));
    std::ostringstream os;
    write_plot_data(os, "a", med);
    EXPECT_EQ(os.str(), "# a: constraints median_time_ms\n4 2\n8 6\n");
}
