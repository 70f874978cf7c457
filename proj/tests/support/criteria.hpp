#pragma once

// Acceptance checks shared by the acceptance binary (full size) and the unit
// tests (reduced size). Each returns a verdict with a one-line summary.

#include <chrono>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "support/fixtures.hpp"

namespace criteria {

using namespace topstmin;

struct Verdict {
    bool pass = false;
    std::string detail;
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Small random instances of the size used by the optimality check.
inline Instance tiny_instance(int i) {
    oracle::RandomSpec spec;
    spec.n_min = 6;
    spec.n_max = 9;
    spec.m_min = 1;
    spec.m_max = 2;
    spec.tmax_min = 10;
    spec.tmax_max = 22;
    return oracle::random_instance(1000 + i, fixtures::variant_of(i), spec);
}

inline RunOutcome run_default(Algo algo, const Instance& inst, const std::string& id) {
    return run_algorithm(inst, make_config(algo, inst.n(), {}), id);
}

inline bool matches(const RunOutcome& out, const oracle::BruteForce& bf) {
    if (!bf.feasible) return !out.record.feasible;
    return out.record.feasible && std::abs(out.record.profit - bf.profit) <= 1e-6;
}

// --- 1 -----------------------------------------------------------------------
inline Verdict optimality(int count = 30, int need_csh = 28, int need_vnd = 24) {
    int csh_ok = 0, vnd_ok = 0, infeasible = 0;
    double slowest = 0.0;
    std::ostringstream misses;
    for (int i = 0; i < count; ++i) {
        const auto inst = tiny_instance(i);
        const auto bf = oracle::brute_force_optimum(inst);
        infeasible += !bf.feasible;
        auto t0 = std::chrono::steady_clock::now();
        const auto c = run_default(Algo::CshSt, inst, "tiny" + std::to_string(i));
        slowest = std::max(slowest, seconds_since(t0));
        t0 = std::chrono::steady_clock::now();
        const auto v = run_default(Algo::Vnd, inst, "tiny" + std::to_string(i));
        slowest = std::max(slowest, seconds_since(t0));
        csh_ok += matches(c, bf);
        vnd_ok += matches(v, bf);
        if (!matches(c, bf) || !matches(v, bf))
            misses << " #" << i << "(opt=" << bf.profit << ",csh=" << c.record.profit << ",vnd=" << v.record.profit << ")";
    }
    const auto t5 = fixtures::t5();
    const double t5_csh = run_default(Algo::CshSt, t5, "t5").record.profit;
    const double t5_vnd = run_default(Algo::Vnd, t5, "t5").record.profit;
    const double t5_opt = oracle::brute_force_optimum(t5).profit;
    Verdict v;
    v.pass = csh_ok >= need_csh && vnd_ok >= need_vnd && slowest < 60.0 && t5_opt == 13 && t5_csh == 13 && t5_vnd == 13;
    std::ostringstream s;
    s << "CSH-st " << csh_ok << "/" << count << " (need " << need_csh << "), VND " << vnd_ok << "/" << count << " (need "
      << need_vnd << "), oracle-infeasible " << infeasible << ", slowest run " << slowest << " s, T5 opt/CSH/VND "
      << t5_opt << "/" << t5_csh << "/" << t5_vnd;
    if (!misses.str().empty()) s << "; misses:" << misses.str();
    v.detail = s.str();
    return v;
}

// --- 2 -----------------------------------------------------------------------
inline Verdict two_route_reproduction() {
    const auto f = fixtures::two_route_example();
    using F = fixtures::TwoRouteExample;
    const auto res = run_mnaa(f.inst);
    const auto naive = oracle::naive_check(fixtures::sequences(res.solution), f.inst.data());
    bool ok = res.feasible_allocation && res.steps.size() == 3;
    if (ok) {
        const auto& s = res.steps;
        ok = s[0].node == F::D && s[0].helpers.empty() && s[1].node == F::C && s[1].route != s[0].route &&
             s[2].node == F::A && s[2].route == s[0].route && s[2].helpers == std::vector<int>{F::B} &&
             res.solution.position_of(F::B) + 1 == res.solution.position_of(F::A);
    }
    ok = ok && naive.structural_ok() && naive.mandatory;
    std::ostringstream s;
    const char* names = "??ABCD";
    s << "insertion order:";
    for (const auto& st : res.steps) {
        s << ' ' << names[st.node] << "->route" << st.route + 1;
        if (!st.helpers.empty()) s << " via " << names[st.helpers.front()];
    }
    s << "; all mandatory assigned " << (naive.mandatory ? "yes" : "no") << "; incompatibility violations "
      << (naive.structural_ok() ? 0 : 1);
    return {ok, s.str()};
}

// --- 3 -----------------------------------------------------------------------
inline Verdict neighbourhoods(int states = 100) {
    const MoveKind kinds[] = {MoveKind::InsertNode,      MoveKind::SwapNodes,   MoveKind::MoveNode, MoveKind::MoveNodeRoutes,
                              MoveKind::SwapNodesRoutes, MoveKind::ExtractNode, MoveKind::TwoOpt};
    std::mt19937_64 rng(4242);
    int mismatches = 0, violations = 0, stale_cost = 0, comparisons = 0, found = 0;
    std::ostringstream first;
    for (int s = 0; s < states; ++s) {
        oracle::RandomSpec spec;
        spec.n_min = 6;
        spec.n_max = 12;
        spec.m_max = 3;
        spec.phys_prob = 0.15;
        spec.logic_prob = 0.12;
        spec.max_mandatory = 3;
        const auto inst = oracle::random_instance(5000 + s, fixtures::variant_of(s), spec);
        const bool feasible_phase = s % 2 == 0;
        const auto seqs = feasible_phase ? fixtures::random_budget_routes(inst, rng) : oracle::random_routes(inst, rng, 0.8);
        const auto sol = Solution::from_sequences(seqs, inst);

        TabuLists tabu(inst.n(), 1.0);
        tabu.resize_for(inst.n());
        oracle::EnumContext cx{inst.data(), feasible_phase, feasible_phase, {}, {}};
        cx.tabu_inside.assign(inst.n() + 1, 0);
        cx.tabu_outside.assign(inst.n() + 1, 0);
        if (s % 3 != 0)
            for (int k = 2; k < inst.n(); ++k) {
                if (rng() % 4 != 0) continue;
                if (sol.visits(k)) {
                    tabu.push_inside(k);
                    cx.tabu_inside[k] = 1;
                } else {
                    tabu.push_outside(k);
                    cx.tabu_outside[k] = 1;
                }
            }
        const auto opt = feasible_phase ? ExploreOptions::feasible(&tabu) : ExploreOptions::infeasible(&tabu);
        for (int k = 0; k < 7; ++k) {
            ++comparisons;
            const auto mv = explore(kinds[k], sol, inst, opt);
            const auto ref = oracle::enumerate_best(k, cx, seqs);
            bool same = mv.has_value() == ref.found;
            if (same && mv)
                same = std::abs(mv->delta_profit - ref.dprofit) <= 1e-9 && std::abs(mv->delta_cost - ref.dcost) <= 1e-9;
            if (!same) {
                if (mismatches == 0)
                    first << " first mismatch: state " << s << " " << to_string(kinds[k]) << " explorer="
                          << (mv ? std::to_string(mv->delta_profit) + "/" + std::to_string(mv->delta_cost) : "none")
                          << " oracle="
                          << (ref.found ? std::to_string(ref.dprofit) + "/" + std::to_string(ref.dcost) : "none");
                ++mismatches;
            }
            if (!mv) continue;
            ++found;
            Solution next = sol;
            apply_move(next, *mv, inst);
            const auto after = fixtures::sequences(next);
            if (!oracle::naive_check(after, inst.data()).structural_ok()) ++violations;
            const double dp = oracle::naive_profit(inst.data(), after) - oracle::naive_profit(inst.data(), seqs);
            const double dc = oracle::total_cost(inst.data(), after) - oracle::total_cost(inst.data(), seqs);
            bool cache_ok = std::abs(dp - mv->delta_profit) <= 1e-9 && std::abs(dc - mv->delta_cost) <= 1e-9;
            for (const auto& r : next.routes())
                if (std::abs(r.cost - oracle::naive_route_cost(inst.data(), r.seq)) > 1e-9) cache_ok = false;
            stale_cost += !cache_ok;
        }
    }
    std::ostringstream s;
    s << states << " states x 7 explorers: " << mismatches << " objective mismatches, " << violations
      << " I/C/duplicate violations, " << stale_cost << " delta/cache errors (" << found << " moves applied of "
      << comparisons << " explorations)" << first.str();
    return {mismatches == 0 && violations == 0 && stale_cost == 0, s.str()};
}

// --- 4 -----------------------------------------------------------------------
// Dense assignment of a solution to the routing-model variables.
inline std::vector<double> rp_point(const milp::RpModel& rp, const oracle::Seqs& routes) {
    std::vector<double> x(rp.model.num_vars(), 0.0);
    for (std::size_t r = 0; r < routes.size(); ++r) {
        const auto& s = routes[r];
        for (std::size_t i = 0; i + 1 < s.size(); ++i) x[rp.index.xvar(s[i], s[i + 1], static_cast<int>(r))] = 1.0;
        for (std::size_t i = 1; i + 1 < s.size(); ++i) x[rp.index.yvar(s[i], static_cast<int>(r))] = 1.0;
    }
    return x;
}

// The cut inequality evaluated directly from a route list.
inline bool cut_holds(const milp::SubtourCut& cut, const oracle::Seqs& routes) {
    const std::set<int> u(cut.nodes.begin(), cut.nodes.end());
    for (const auto& s : routes) {
        int arcs = 0, visited = 0;
        bool anchor = false;
        for (std::size_t i = 0; i + 1 < s.size(); ++i)
            if (u.count(s[i]) && u.count(s[i + 1])) ++arcs;
        for (std::size_t i = 1; i + 1 < s.size(); ++i)
            if (u.count(s[i])) {
                ++visited;
                anchor = anchor || s[i] == cut.anchor;
            }
        if (arcs > visited - (anchor ? 1 : 0)) return false;
    }
    return true;
}

inline Verdict sec_soundness(int solutions = 500, int instances = 10) {
    int evaluated = 0, violated = 0, row_violations = 0, recurrences = 0, cuts_total = 0, csh_cuts = 0;
    std::mt19937_64 rng(777);
    std::vector<Instance> insts;
    std::vector<std::vector<milp::SubtourCut>> cuts;
    for (int i = 0; i < instances; ++i) {
        oracle::RandomSpec spec;
        spec.n_min = 7;
        spec.n_max = 10;
        spec.m_max = 2;
        spec.tmax_min = 12;
        spec.tmax_max = 24;
        spec.phys_prob = 0.05;
        spec.logic_prob = 0.05;
        const auto inst = oracle::random_instance(9000 + i, fixtures::variant_of(i), spec);
        auto p = fixtures::tiny_csh();
        const auto res = run_csh_st(inst, p);
        csh_cuts += static_cast<int>(res.secs.size());
        // a subtour set cut off in iteration i must not come back later
        for (std::size_t a = 0; a < res.history.size(); ++a)
            for (std::size_t b = a + 1; b < res.history.size(); ++b)
                for (const auto& sa : res.history[a].subtours)
                    for (const auto& sb : res.history[b].subtours) recurrences += sa == sb;
        auto all = res.secs;
        // plus cuts from random customer sets
        for (int extra = 0; extra < 6; ++extra) {
            std::vector<int> set;
            for (int k = 2; k < inst.n(); ++k)
                if (rng() % 2) set.push_back(k);
            if (set.size() < 2) continue;
            const auto more = milp::build_secs({set}, inst);
            all.insert(all.end(), more.begin(), more.end());
        }
        cuts_total += static_cast<int>(all.size());
        insts.push_back(inst);
        cuts.push_back(std::move(all));
    }
    int attempts = 0;
    while (evaluated < solutions && attempts < solutions * 50) {
        const int i = attempts++ % instances;
        const auto sol = fixtures::random_feasible(insts[i], rng, 50);
        if (!sol) continue;
        ++evaluated;
        bool bad = false;
        for (const auto& c : cuts[i]) bad = bad || !cut_holds(c, *sol);
        violated += bad;
        const auto rp = milp::build_rp(insts[i], cuts[i]);
        if (milp::verify(rp.model, rp_point(rp, *sol))) ++row_violations;
    }
    std::ostringstream s;
    s << evaluated << " feasible solutions against " << cuts_total << " cuts (" << csh_cuts << " emitted by CSH): "
      << violated << " cut violations, " << row_violations << " model-row violations; recurring subtour sets "
      << recurrences;
    return {evaluated == solutions && violated == 0 && row_violations == 0 && recurrences == 0 && csh_cuts > 0, s.str()};
}

// --- 5 -----------------------------------------------------------------------
// Geometric base in the classical format, then generated features.
inline Instance generated_instance(int n, int m, double tmax, std::uint64_t seed, int mode) {
    const auto base = parse_top_instance(oracle::chao_style_text(n, m, tmax, seed));
    GenConfig g;
    g.mandatory_mode = mode & 1 ? MandatoryMode::Scattered : MandatoryMode::Clustered;
    g.phys_mode = mode & 2 ? PhysMode::DegreeBased : PhysMode::ClustersBased;
    if (mode & 4) g.logic_mode = mode & 8 ? LogicMode::Nearest : LogicMode::Farthest;
    g.rng_seed = seed;
    return generate_features(base, g);
}

inline Verdict feasibility_discipline(int tiny = 12, int generated = 4) {
    struct Item {
        Instance inst;
        std::string id;
    };
    std::vector<Item> items;
    for (int i = 0; i < tiny; ++i) items.push_back({tiny_instance(100 + i), "tiny" + std::to_string(i)});
    for (int i = 0; i < generated; ++i)
        items.push_back({generated_instance(22, 2, 25, 31 + i, i * 5), "gen22_" + std::to_string(i)});
    int runs = 0, claimed = 0, false_claims = 0, inconsistent = 0, non_monotone = 0, traces = 0;
    for (const auto& it : items) {
        for (auto algo : {Algo::Mnaa, Algo::Vnd, Algo::CshSt, Algo::CshMt}) {
            auto cfg = make_config(algo, it.inst.n(), {});
            cfg.csh.threads = 2;
            cfg.csh.iterations = std::min(cfg.csh.iterations, 5);
            const auto out = run_algorithm(it.inst, cfg, it.id);
            ++runs;
            if (!record_consistent(out.record, it.inst)) ++inconsistent;
            if (!out.record.feasible) continue;
            ++claimed;
            const auto routes = parse_routes_text(out.record.routes);
            if (!oracle::naive_check(routes, it.inst.data()).feasible() ||
                std::abs(oracle::naive_profit(it.inst.data(), routes) - out.record.profit) > 1e-6)
                ++false_claims;
        }
        const auto start = run_mnaa(it.inst).solution;
        const auto v = run_vnd(it.inst, start, fixtures::tiny_vnd());
        ++traces;
        for (std::size_t k = 1; k < v.incumbent_trace.size(); ++k)
            if (v.incumbent_trace[k].second < v.incumbent_trace[k - 1].second ||
                v.incumbent_trace[k].first < v.incumbent_trace[k - 1].first)
                ++non_monotone;
        if (v.found_feasible && (v.incumbent_trace.empty() || v.incumbent_trace.back().second != v.best_profit)) ++non_monotone;
        if (v.found_feasible && !oracle::naive_check(fixtures::sequences(v.best), it.inst.data()).feasible()) ++false_claims;
    }
    std::ostringstream s;
    s << runs << " runs, " << claimed << " reported feasible, " << false_claims << " rejected by the naive checker, "
      << inconsistent << " inconsistent records; " << traces << " VND traces, " << non_monotone << " non-monotone";
    return {false_claims == 0 && inconsistent == 0 && non_monotone == 0 && claimed > 0, s.str()};
}

// --- 6 -----------------------------------------------------------------------
inline Verdict determinism() {
    std::vector<Instance> insts = {tiny_instance(3), tiny_instance(7), generated_instance(22, 2, 25, 5, 5),
                                   generated_instance(33, 3, 30, 6, 6)};
    int csh_diff = 0, vnd_diff = 0;
    std::size_t cuts = 0;
    for (const auto& inst : insts) {
        auto p = fixtures::tiny_csh();
        p.iterations = 5;
        p.solver.internal.lp_iteration_limit = 200000;
        p.rp_time_limit_s = 600;
        const auto a = run_csh_st(inst, p), b = run_csh_st(inst, p);
        cuts += a.secs.size();
        if (!(a.best == b.best) || a.secs != b.secs || a.best_profit != b.best_profit) ++csh_diff;
        const auto start = run_mnaa(inst).solution;
        const auto va = run_vnd(inst, start, fixtures::tiny_vnd()), vb = run_vnd(inst, start, fixtures::tiny_vnd());
        if (!(va.best == vb.best) || va.incumbent_trace != vb.incumbent_trace || va.iterations != vb.iterations) ++vnd_diff;
    }
    std::ostringstream s;
    s << insts.size() << " instances run twice: CSH-st differences " << csh_diff << " (" << cuts
      << " cuts compared), VND differences " << vnd_diff;
    return {csh_diff == 0 && vnd_diff == 0, s.str()};
}

// --- 7 -----------------------------------------------------------------------
inline Instance medium_instance() { return generated_instance(65, 3, 30, 65, 0); }

inline CshParams parallel_params(int threads) {
    CshParams p;
    p.iterations = 4;
    p.vnd.max_nonimproving = 4000;
    p.vnd.sir_patience = 300;
    p.rp_time_limit_s = 120;
    p.rp_solution_limit = 1;
    p.milp_time_limit_s = 60;
    p.solver.internal.lp_iteration_limit = 150000;
    p.threads = threads;
    return p;
}

inline Verdict parallel_sanity(int workers = 4) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto inst = medium_instance();
    const auto one = run_csh_mt(inst, parallel_params(1));
    const auto many = run_csh_mt(inst, parallel_params(workers));
    const double total = seconds_since(t0);
    const double speedup = many.phase2_seconds > 0 ? one.phase2_seconds / many.phase2_seconds : 0.0;
    const bool same = one.found_feasible == many.found_feasible && one.best_profit == many.best_profit;
    std::ostringstream s;
    s << "n=" << inst.n() << ", hardware threads " << std::thread::hardware_concurrency() << ": profit 1 worker "
      << one.best_profit << " vs " << workers << " workers " << many.best_profit << "; parallel phase " << one.phase2_seconds
      << " s vs " << many.phase2_seconds << " s, speedup " << speedup << " (need 1.5); total " << total << " s";
    return {same && speedup >= 1.5 && total < 600.0, s.str()};
}

// --- 8 -----------------------------------------------------------------------
inline long long ceil_percent(long long percent, long long count) { return (percent * count + 99) / 100; }

inline Verdict generator_quotas() {
    int checked = 0, wrong = 0, nondeterministic = 0, isolated = 0;
    std::ostringstream first;
    for (int n : {22, 33, 65, 102}) {
        const auto base = parse_top_instance(oracle::chao_style_text(n, 2, 40, n));
        const long long c = n - 2;
        const long long want_m = ceil_percent(5, c), want_i = ceil_percent(20, c * (c - 1)), q = ceil_percent(5, c);
        for (int mode = 0; mode < 12; ++mode) {
            GenConfig g;
            g.mandatory_mode = mode & 1 ? MandatoryMode::Scattered : MandatoryMode::Clustered;
            g.phys_mode = mode & 2 ? PhysMode::DegreeBased : PhysMode::ClustersBased;
            if (mode >= 4) g.logic_mode = mode >= 8 ? LogicMode::Nearest : LogicMode::Farthest;
            g.rng_seed = 1000 + mode;
            const auto a = generate_features(base, g);
            const auto b = generate_features(base, g);
            ++checked;
            nondeterministic += to_extended_text(a) != to_extended_text(b);
            const auto& d = a.data();
            std::map<int, int> degree;
            for (auto [x, y] : d.logic) ++degree[x], ++degree[y];
            bool ok = static_cast<long long>(d.mandatory.size()) == want_m &&
                      static_cast<long long>(d.phys.size()) == want_i;
            if (g.logic_mode) {
                ok = ok && static_cast<long long>(d.logic.size()) == (q * c + 1) / 2;
                for (int k = 2; k < n; ++k) ok = ok && degree[k] >= q;
            } else {
                ok = ok && d.logic.empty();
            }
            for (int k : d.mandatory) {
                int in = 0, out = 0;
                for (int i = 1; i <= n; ++i) {
                    in += a.arc_usable(i, k);
                    out += a.arc_usable(k, i);
                }
                isolated += in == 0 || out == 0;
            }
            if (!ok) {
                if (wrong == 0)
                    first << " first: n=" << n << " " << feature_label(g) << " |M|=" << d.mandatory.size() << "/" << want_m
                          << " |I|=" << d.phys.size() << "/" << want_i << " |C|=" << d.logic.size();
                ++wrong;
            }
        }
    }
    std::ostringstream s;
    s << checked << " generated instances: " << wrong << " quota mismatches, " << nondeterministic
      << " non-deterministic, " << isolated << " isolated mandatory nodes" << first.str();
    return {wrong == 0 && nondeterministic == 0 && isolated == 0, s.str()};
}

// --- 9 -----------------------------------------------------------------------
inline Verdict top_regression(int count = 12) {
    int within = 0, compared = 0;
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        const int n = 9 + i % 6;  // 7..12 customers
        const int m = 2 + i % 3;
        const double tmax = 10.0 + 2.5 * (i % 5);
        const auto inst = parse_top_instance(oracle::chao_style_text(n, m, tmax, 300 + i));
        const auto bf = oracle::brute_force_optimum(inst);
        const auto v = run_default(Algo::Vnd, inst, "classic" + std::to_string(i));
        ++compared;
        const double gap = bf.profit > 0 ? (bf.profit - v.record.profit) / bf.profit : 0.0;
        worst = std::max(worst, gap);
        within += v.record.feasible && gap <= 0.05 + 1e-12;
    }
    std::ostringstream s;
    s << within << "/" << compared << " classical-format instances within 5% of the exhaustive optimum; worst gap "
      << 100.0 * worst << "%";
    return {within == compared, s.str()};
}

}  // namespace criteria
