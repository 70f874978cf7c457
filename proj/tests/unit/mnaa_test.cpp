#include <gtest/gtest.h>

#include "support/fixtures.hpp"

using namespace topstmin;

TEST(Mnaa, TwoRouteExampleInsertionOrder) {
    const auto f = fixtures::two_route_example();
    using F = fixtures::TwoRouteExample;
    const auto res = run_mnaa(f.inst);
    ASSERT_TRUE(res.feasible_allocation);
    ASSERT_EQ(res.steps.size(), 3u);
    EXPECT_EQ(res.steps[0].node, F::D);
    EXPECT_TRUE(res.steps[0].helpers.empty());
    EXPECT_EQ(res.steps[1].node, F::C);
    EXPECT_NE(res.steps[1].route, res.steps[0].route);
    EXPECT_TRUE(res.steps[1].helpers.empty());
    EXPECT_EQ(res.steps[2].node, F::A);
    EXPECT_EQ(res.steps[2].route, res.steps[0].route);
    EXPECT_EQ(res.steps[2].helpers, std::vector<int>{F::B});

    const auto& sol = res.solution;
    EXPECT_EQ(sol.route_of(F::A), sol.route_of(F::D));
    EXPECT_EQ(sol.route_of(F::B), sol.route_of(F::A));
    EXPECT_EQ(sol.position_of(F::B) + 1, sol.position_of(F::A));
    const auto naive = oracle::naive_check(fixtures::sequences(sol), f.inst.data());
    EXPECT_TRUE(naive.structural_ok());
    EXPECT_TRUE(naive.mandatory);
}

TEST(Mnaa, EmptyMandatorySetGivesEmptyRoutes) {
    const auto inst = fixtures::t5(Variant::TOP);
    const auto res = run_mnaa(inst);
    EXPECT_TRUE(res.feasible_allocation);
    EXPECT_EQ(res.solution.visited_count(), 0);
    EXPECT_EQ(res.solution.route_count(), 1);
}

TEST(Mnaa, LogicBanWithOneRouteIsInfeasible) {
    auto d = fixtures::t5(Variant::PL).data();
    d.mandatory = {2, 3};
    d.logic = {{2, 3}};
    const auto res = run_mnaa(Instance(d));
    EXPECT_FALSE(res.feasible_allocation);
    EXPECT_FALSE(res.unassigned.empty());
    EXPECT_EQ(res.score_minima.back(), 0);
}

TEST(Mnaa, ScoreMinimaNonIncreasingAndAllocationRespectsIncompatibilities) {
    for (int seed = 0; seed < 200; ++seed) {
        oracle::RandomSpec spec;
        spec.n_max = 12;
        spec.m_max = 3;
        spec.max_mandatory = 4;
        spec.logic_prob = 0.2;
        spec.phys_prob = 0.25;
        const auto inst = oracle::random_instance(seed, seed % 2 ? Variant::PL : Variant::P, spec);
        const auto res = run_mnaa(inst);
        for (std::size_t i = 1; i < res.score_minima.size(); ++i) EXPECT_LE(res.score_minima[i], res.score_minima[i - 1]);
        EXPECT_LE(res.steps.size(), inst.mandatory().size());
        const auto naive = oracle::naive_check(fixtures::sequences(res.solution), inst.data());
        EXPECT_TRUE(naive.structural_ok()) << "seed " << seed;
        if (res.feasible_allocation) EXPECT_TRUE(naive.mandatory) << "seed " << seed;
    }
}

// No placement of q with at most two helpers avoids the forbidden arcs.
TEST(InsertionList, BlockedNodeReportsNoInsertion) {
    auto d = fixtures::t5(Variant::P).data();
    d.phys = {{1, 3}, {2, 3}, {4, 3}};
    const Instance inst(d);
    const Solution empty(inst);
    EXPECT_FALSE(insertion_list(3, empty, inst).valid());
}

// Exhaustive check of the cheapest direct insertion against every position.
TEST(InsertionList, DirectInsertionIsCheapest) {
    for (int seed = 0; seed < 100; ++seed) {
        const auto inst = oracle::random_instance(seed, Variant::P);
        std::mt19937_64 rng(seed);
        auto seqs = oracle::random_routes(inst, rng, 0.5);
        const auto sol = Solution::from_sequences(seqs, inst);
        for (int q = 2; q < inst.n(); ++q) {
            if (sol.visits(q)) continue;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& s : seqs)
                for (std::size_t p = 1; p < s.size(); ++p) {
                    if (oracle::raw_forbidden(inst.data(), s[p - 1], q) || oracle::raw_forbidden(inst.data(), q, s[p])) continue;
                    best = std::min(best, inst.travel(s[p - 1], q) + inst.service(q) + inst.travel(q, s[p]) -
                                              inst.travel(s[p - 1], s[p]));
                }
            const auto plan = insertion_list(q, sol, inst, 0);
            if (std::isinf(best)) {
                EXPECT_FALSE(plan.valid());
            } else {
                ASSERT_TRUE(plan.valid());
                EXPECT_NEAR(plan.added_cost, best, 1e-9);
                EXPECT_TRUE(plan.helpers.empty());
            }
        }
    }
}
