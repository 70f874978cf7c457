#include <gtest/gtest.h>

#include "support/criteria.hpp"

using namespace topstmin;

namespace {

Instance pl_t5(std::vector<int> mandatory, std::vector<Arc> logic, double t_max = 10) {
    auto d = fixtures::t5(Variant::PL).data();
    d.mandatory = std::move(mandatory);
    d.logic = std::move(logic);
    d.t_max = t_max;
    return Instance(d);
}

}  // namespace

TEST(Csh, SingleThreadSolvesT5InOneIteration) {
    const auto inst = fixtures::t5();
    auto p = fixtures::tiny_csh();
    p.iterations = 1;
    const auto res = run_csh_st(inst, p);
    ASSERT_EQ(res.status, CshStatus::Solved);
    EXPECT_DOUBLE_EQ(res.best_profit, 13);
    EXPECT_TRUE(is_feasible(res.best, inst));
}

TEST(Csh, MultiThreadSingleWorkerSolvesT5) {
    auto p = fixtures::tiny_csh();
    p.threads = 1;
    const auto res = run_csh_mt(fixtures::t5(), p);
    ASSERT_EQ(res.status, CshStatus::Solved);
    EXPECT_DOUBLE_EQ(res.best_profit, 13);
}

TEST(Csh, ConflictingMandatoryPairOnOneRouteIsInfeasible) {
    const auto inst = pl_t5({2, 3}, {{2, 3}}, 20);
    const auto st = run_csh_st(inst, fixtures::tiny_csh());
    EXPECT_EQ(st.status, CshStatus::Infeasible);
    EXPECT_FALSE(st.found_feasible);
    auto p = fixtures::tiny_csh();
    p.threads = 2;
    EXPECT_EQ(run_csh_mt(inst, p).status, CshStatus::Infeasible);
}

TEST(Csh, ZeroIterationsRejected) {
    auto p = fixtures::tiny_csh();
    p.iterations = 0;
    EXPECT_THROW(run_csh_st(fixtures::t5(), p), std::invalid_argument);
    p.iterations = 1;
    p.threads = 0;
    EXPECT_THROW(run_csh_mt(fixtures::t5(), p), std::invalid_argument);
}

TEST(Repair, NoStrandedMandatoryIsIdentity) {
    const auto inst = fixtures::t5();
    milp::RpDecoded dec{{{1, 3, 5}}, {{2, 4}}};
    const auto out = repair_solution(dec, inst, fixtures::tiny_csh());
    ASSERT_TRUE(out.solution);
    EXPECT_EQ(out.stage, 0);
    EXPECT_EQ(out.solution->route(0).seq, (std::vector<int>{1, 3, 5}));
}

TEST(Repair, StrandedMandatoryGoesToCheapestPosition) {
    for (int i = 0; i < 40; ++i) {
        const auto inst = criteria::tiny_instance(700 + i);
        if (inst.n() < 6) continue;
        // route 0 holds customer 2, the subtour strands 3 (made mandatory)
        auto d = inst.data();
        d.variant = Variant::P;
        d.mandatory = {3};
        d.phys.clear();
        d.logic.clear();
        d.m = 1;
        const Instance one(d);
        milp::RpDecoded dec{{{1, 2, 4, one.n()}}, {{3, 5}}};
        const auto out = repair_solution(dec, one, fixtures::tiny_csh());
        ASSERT_TRUE(out.solution);
        EXPECT_EQ(out.stage, 1);
        const auto& seq = dec.paths[0];
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t pos = 1; pos < seq.size(); ++pos) {
            auto s = seq;
            s.insert(s.begin() + static_cast<long>(pos), 3);
            best = std::min(best, oracle::naive_route_cost(d, s));
        }
        EXPECT_NEAR(out.solution->route(0).cost, best, 1e-9);
    }
}

TEST(Repair, LogicalBlockEngagesExactStage) {
    const auto inst = pl_t5({2}, {{2, 3}});
    milp::RpDecoded dec{{{1, 3, 5}}, {{2, 4}}};
    const auto out = repair_solution(dec, inst, fixtures::tiny_csh());
    EXPECT_EQ(out.stage, 2);
    ASSERT_TRUE(out.solution);
    EXPECT_EQ(out.solution->route(0).seq, (std::vector<int>{1, 2, 5}));
    EXPECT_TRUE(is_feasible(*out.solution, inst));
}

TEST(Csh, IncumbentNeverDecreasesAndCutsHold) {
    for (int i = 0; i < 6; ++i) {
        const auto inst = criteria::tiny_instance(800 + i);
        auto p = fixtures::tiny_csh();
        p.iterations = 4;
        const auto res = run_csh_st(inst, p);
        for (std::size_t k = 1; k < res.history.size(); ++k)
            EXPECT_GE(res.history[k].incumbent, res.history[k - 1].incumbent - 1e-9);
        if (res.found_feasible) {
            EXPECT_TRUE(oracle::naive_check(fixtures::sequences(res.best), inst.data()).feasible());
            for (const auto& c : res.secs) EXPECT_TRUE(criteria::cut_holds(c, fixtures::sequences(res.best)));
            for (const auto& h : res.history) EXPECT_LE(h.vnd_profit, res.best_profit + 1e-9);
        }
    }
}

TEST(Csh, SubtourCutSoundnessSmallRun) {
    const auto v = criteria::sec_soundness(60, 3);
    EXPECT_TRUE(v.pass) << v.detail;
}

TEST(Csh, MultiThreadMatchesSingleWorkerProfit) {
    const auto inst = criteria::generated_instance(22, 2, 25, 22, 0);
    auto p = fixtures::tiny_csh();
    p.iterations = 3;
    p.threads = 1;
    const auto one = run_csh_mt(inst, p);
    p.threads = 3;
    const auto three = run_csh_mt(inst, p);
    ASSERT_EQ(one.status, three.status);
    EXPECT_DOUBLE_EQ(one.best_profit, three.best_profit);
    ASSERT_EQ(one.secs.size(), three.secs.size());
    for (std::size_t i = 0; i < one.secs.size(); ++i) EXPECT_EQ(one.secs[i].nodes, three.secs[i].nodes);
}

TEST(Csh, MultiThreadCutStreamMatchesSingleThread) {
    const auto inst = criteria::tiny_instance(900);
    auto p = fixtures::tiny_csh();
    p.iterations = 3;
    const auto st = run_csh_st(inst, p);
    const auto mt = run_csh_mt(inst, p);
    ASSERT_EQ(st.secs.size(), mt.secs.size());
    for (std::size_t i = 0; i < st.secs.size(); ++i) {
        EXPECT_EQ(st.secs[i].nodes, mt.secs[i].nodes);
        EXPECT_EQ(st.secs[i].anchor, mt.secs[i].anchor);
    }
}
