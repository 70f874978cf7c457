#include <gtest/gtest.h>

#include <set>

#include "support/criteria.hpp"

using namespace topstmin;

TEST(Vnd, T5FromMnaaReachesOptimum) {
    const auto inst = fixtures::t5();
    const auto start = run_mnaa(inst).solution;
    const auto res = run_vnd(inst, start, VndParams{});
    ASSERT_TRUE(res.found_feasible);
    EXPECT_DOUBLE_EQ(res.best_profit, oracle::brute_force_optimum(inst).profit);
    EXPECT_DOUBLE_EQ(res.best_profit, 13);
    EXPECT_TRUE(is_feasible(res.best, inst));
}

TEST(Vnd, OptimalStartWithSingleIterationIsUnchanged) {
    const auto inst = fixtures::t5();
    const auto start = Solution::from_sequences({{1, 2, 3, 5}}, inst);
    VndParams p;
    p.max_nonimproving = 1;
    const auto res = run_vnd(inst, start, p);
    EXPECT_EQ(res.best, start);
    EXPECT_EQ(res.lii, 0);
}

TEST(Vnd, OneExtractionRecoversFeasibility) {
    auto d = fixtures::t5().data();
    d.t_max = 11;
    const Instance inst(d);
    const auto start = Solution::from_sequences({{1, 2, 3, 4, 5}}, inst);
    std::ostringstream trace;
    const auto res = run_vnd(inst, start, fixtures::tiny_vnd(), nullptr, &trace);
    ASSERT_TRUE(res.recovery);
    EXPECT_EQ(res.recovery->route(0).seq, (std::vector<int>{1, 3, 4, 5}));
    EXPECT_DOUBLE_EQ(res.best_profit, oracle::brute_force_optimum(inst).profit);

    // first logged move: SIR extraction ending at zero violation, then SFR
    std::istringstream in(trace.str());
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<std::string> f;
        for (std::string t; std::getline(ls, t, '\t');) f.push_back(t);
        if (f.size() >= 5) rows.push_back(f);
    }
    ASSERT_GE(rows.size(), 2u);
    EXPECT_EQ(rows[0][1], "SIR");
    EXPECT_EQ(rows[0][2], "ExtractNode");
    EXPECT_DOUBLE_EQ(std::stod(rows[0][4]), 0.0);
    EXPECT_EQ(rows[1][1], "SFR");
}

TEST(Optimise, T5GreedyTrace) {
    const auto inst = fixtures::t5();
    const auto out = optimise(Solution::from_sequences({{1, 3, 5}}, inst), inst);
    EXPECT_EQ(out.route(0).seq, (std::vector<int>{1, 2, 3, 5}));
    EXPECT_DOUBLE_EQ(out.profit(), 13);
    const auto full = optimise(out, inst);
    EXPECT_EQ(full, out);
}

TEST(Optimise, TightBudgetIsIdentity) {
    auto d = fixtures::t5().data();
    d.t_max = 7;
    const Instance inst(d);
    const auto start = Solution::from_sequences({{1, 3, 5}}, inst);
    EXPECT_EQ(optimise(start, inst), start);
}

TEST(Vnd, DeterministicAndMonotone) {
    for (int i = 0; i < 15; ++i) {
        const auto inst = criteria::tiny_instance(200 + i);
        const auto start = run_mnaa(inst).solution;
        const auto a = run_vnd(inst, start, fixtures::tiny_vnd());
        const auto b = run_vnd(inst, start, fixtures::tiny_vnd());
        EXPECT_EQ(a.best, b.best);
        EXPECT_EQ(a.incumbent_trace, b.incumbent_trace);
        for (std::size_t k = 1; k < a.incumbent_trace.size(); ++k)
            EXPECT_GT(a.incumbent_trace[k].second, a.incumbent_trace[k - 1].second);
        if (a.found_feasible) {
            EXPECT_TRUE(oracle::naive_check(fixtures::sequences(a.best), inst.data()).feasible());
            EXPECT_DOUBLE_EQ(a.best_profit, a.best.profit());
        }
    }
}

TEST(Vnd, PoolHoldsDistinctFeasibleRoutesWithinCap) {
    for (int i = 0; i < 10; ++i) {
        const auto inst = criteria::tiny_instance(300 + i);
        RoutePool pool(25);
        auto p = fixtures::tiny_vnd();
        p.route_pool_cap = 25;
        run_vnd(inst, run_mnaa(inst).solution, p, &pool);
        const auto snap = pool.snapshot();
        EXPECT_LE(snap.size(), 25u);
        std::set<std::set<int>> sets;
        for (const auto& e : snap) {
            oracle::Seqs one(inst.m(), std::vector<int>{1, inst.n()});
            one[0] = e.route.seq;
            const auto v = oracle::naive_check(one, inst.data());
            EXPECT_TRUE(v.structural_ok() && v.budget);
            sets.insert(std::set<int>(e.route.seq.begin() + 1, e.route.seq.end() - 1));
        }
        EXPECT_EQ(sets.size(), snap.size());
    }
}
