#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

#include "instance.hpp"
#include "solution.hpp"

namespace topstmin {

// Largest helper set searched when a direct insertion would use a forbidden arc.
inline constexpr int kMaxHelpers = 2;

// Insertion of a node q, possibly preceded/followed by optional helper nodes,
// right before position `position` of route `route`.
struct InsertionPlan {
    int route = -1;
    int position = -1;
    std::vector<int> block;    // nodes placed in order, q included
    std::vector<int> helpers;  // the optional nodes of `block`
    double added_cost = std::numeric_limits<double>::infinity();

    bool valid() const { return route >= 0; }
};

namespace detail {

inline bool fits_route_logic(int v, const Route& route, const Instance& inst) {
    if (inst.logic_partners(v).empty()) return true;
    for (std::size_t i = 1; i + 1 < route.seq.size(); ++i)
        if (inst.conflicting(v, route.seq[i])) return false;
    return true;
}

inline double block_added_cost(int a, int b, const std::vector<int>& block, const Instance& inst) {
    double c = inst.travel(a, block.front()) + inst.travel(block.back(), b) - inst.travel(a, b);
    for (std::size_t i = 0; i < block.size(); ++i) {
        c += inst.service(block[i]);
        if (i > 0) c += inst.travel(block[i - 1], block[i]);
    }
    return c;
}

inline bool block_arcs_ok(int a, int b, const std::vector<int>& block, const Instance& inst) {
    if (!inst.arc_usable(a, block.front()) || !inst.arc_usable(block.back(), b)) return false;
    for (std::size_t i = 1; i < block.size(); ++i)
        if (!inst.arc_usable(block[i - 1], block[i])) return false;
    return true;
}

// Optional helpers: unassigned, non-mandatory customers compatible with q and the route.
inline std::vector<int> helper_candidates(int q, const Route& route, const Solution& sol, const Instance& inst) {
    std::vector<int> out;
    for (int o = 2; o <= inst.n() - 1; ++o) {
        if (o == q || sol.visits(o) || inst.is_mandatory(o)) continue;
        if (inst.conflicting(o, q) || !fits_route_logic(o, route, inst)) continue;
        out.push_back(o);
    }
    return out;
}

// Cheapest block with the fewest helpers between seq[p-1] and seq[p].
inline std::optional<std::pair<std::vector<int>, double>> best_block_at(int q, const Route& route, int p,
                                                                        const std::vector<int>& helpers,
                                                                        const Instance& inst, int max_helpers) {
    const int a = route.seq[p - 1];
    const int b = route.seq[p];
    std::optional<std::pair<std::vector<int>, double>> best;
    auto consider = [&](std::vector<int> block) {
        if (!block_arcs_ok(a, b, block, inst)) return;
        const double c = block_added_cost(a, b, block, inst);
        if (!best || c < best->second) best = std::make_pair(std::move(block), c);
    };
    consider({q});
    if (best || max_helpers < 1) return best;
    for (int o : helpers) {
        consider({o, q});
        consider({q, o});
    }
    if (best || max_helpers < 2) return best;
    for (std::size_t i = 0; i < helpers.size(); ++i)
        for (std::size_t j = 0; j < helpers.size(); ++j) {
            if (i == j) continue;
            const int o1 = helpers[i], o2 = helpers[j];
            if (inst.conflicting(o1, o2)) continue;
            consider({o1, o2, q});
            consider({o1, q, o2});
            consider({q, o1, o2});
        }
    return best;
}

inline bool better_plan(const InsertionPlan& x, const InsertionPlan& y) {
    if (!y.valid()) return x.valid();
    if (!x.valid()) return false;
    if (x.added_cost != y.added_cost) return x.added_cost < y.added_cost;
    if (x.helpers.size() != y.helpers.size()) return x.helpers.size() < y.helpers.size();
    if (x.route != y.route) return x.route < y.route;
    return x.position < y.position;
}

}  // namespace detail

// Cheapest insertion of q over all routes compatible with q's logical pairs.
// Each position uses the smallest helper set that avoids forbidden arcs.
// Returns an invalid plan when no position admits at most `max_helpers` helpers.
inline InsertionPlan insertion_list(int q, const Solution& sol, const Instance& inst, int max_helpers = kMaxHelpers,
                                    int only_route = -1) {
    InsertionPlan best;
    for (int r = 0; r < sol.route_count(); ++r) {
        if (only_route >= 0 && r != only_route) continue;
        const auto& route = sol.route(r);
        if (!detail::fits_route_logic(q, route, inst)) continue;
        std::vector<int> helpers;
        bool helpers_ready = false;
        for (int p = 1; p < static_cast<int>(route.seq.size()); ++p) {
            // Helpers are only needed where the direct insertion is blocked.
            const bool direct = detail::block_arcs_ok(route.seq[p - 1], route.seq[p], {q}, inst);
            if (!direct && !helpers_ready) {
                helpers = detail::helper_candidates(q, route, sol, inst);
                helpers_ready = true;
            }
            auto blk = detail::best_block_at(q, route, p, direct ? std::vector<int>{} : helpers, inst,
                                             direct ? 0 : max_helpers);
            if (!blk) continue;
            InsertionPlan cand;
            cand.route = r;
            cand.position = p;
            cand.block = blk->first;
            cand.added_cost = blk->second;
            for (int v : cand.block)
                if (v != q) cand.helpers.push_back(v);
            if (detail::better_plan(cand, best)) best = std::move(cand);
        }
    }
    return best;
}

inline void apply_insertion(Solution& sol, const InsertionPlan& plan, const Instance& inst) {
    auto seq = sol.route(plan.route).seq;
    seq.insert(seq.begin() + plan.position, plan.block.begin(), plan.block.end());
    sol.set_route(plan.route, std::move(seq), inst);
}

// g_u: routes that can still host u (logical pairs respected, some position
// with at most kMaxHelpers helpers).
inline int mandatory_score(int u, const Solution& sol, const Instance& inst) {
    int g = 0;
    for (int r = 0; r < sol.route_count(); ++r)
        if (insertion_list(u, sol, inst, kMaxHelpers, r).valid()) ++g;
    return g;
}

struct MnaaStep {
    int node = -1;
    int route = -1;
    int position = -1;
    std::vector<int> helpers;
    int min_score = 0;    // g-bar when the node was chosen
    int next_score = 0;   // its g-hat
};

struct MnaaResult {
    bool feasible_allocation = false;  // false = AllocationInfeasible
    Solution solution;
    std::vector<MnaaStep> steps;
    std::vector<int> unassigned;  // mandatory nodes left over on failure
    std::vector<int> score_minima;  // g-bar per iteration
};

// Score-guided allocation of the nodes in `pending` into `start`. The result
// respects forbidden arcs and logical pairs; the budget may be exceeded.
inline MnaaResult allocate_mandatory(Solution start, std::vector<int> pending, const Instance& inst) {
    MnaaResult res;
    Solution sol = std::move(start);
    std::sort(pending.begin(), pending.end());
    std::vector<int> score(inst.n() + 1, inst.m());

    while (!pending.empty()) {
        int gmin = inst.m();
        for (int u : pending) gmin = std::min(gmin, score[u]);
        res.score_minima.push_back(gmin);
        if (gmin == 0) break;

        std::vector<int> tied;
        for (int u : pending)
            if (score[u] == gmin) tied.push_back(u);

        std::vector<InsertionPlan> plans(tied.size());
        for (std::size_t i = 0; i < tied.size(); ++i) plans[i] = insertion_list(tied[i], sol, inst);

        // g-hat: the lowest score u keeps after any other tied node is placed first.
        std::vector<int> next(tied.size());
        for (std::size_t i = 0; i < tied.size(); ++i) {
            if (tied.size() == 1) {
                next[i] = score[tied[i]];
                continue;
            }
            int lo = inst.m();
            bool any = false;
            for (std::size_t j = 0; j < tied.size(); ++j) {
                if (j == i || !plans[j].valid()) continue;
                Solution trial = sol;
                apply_insertion(trial, plans[j], inst);
                lo = std::min(lo, mandatory_score(tied[i], trial, inst));
                any = true;
            }
            next[i] = any ? lo : score[tied[i]];
        }

        std::size_t pick = tied.size();
        for (std::size_t i = 0; i < tied.size(); ++i) {
            if (!plans[i].valid()) continue;
            if (pick == tied.size() || next[i] > next[pick] ||
                (next[i] == next[pick] && plans[i].added_cost < plans[pick].added_cost))
                pick = i;
        }
        if (pick == tied.size()) {
            // none of the minimal-score nodes can be placed anywhere
            for (int u : tied) score[u] = 0;
            res.score_minima.push_back(0);
            break;
        }

        const int q = tied[pick];
        apply_insertion(sol, plans[pick], inst);
        res.steps.push_back({q, plans[pick].route, plans[pick].position, plans[pick].helpers, gmin, next[pick]});
        pending.erase(std::find(pending.begin(), pending.end(), q));
        for (int u : pending) score[u] = mandatory_score(u, sol, inst);
    }

    res.unassigned = pending;
    res.feasible_allocation = pending.empty();
    res.solution = std::move(sol);
    return res;
}

// Initial solution holding every mandatory node, or an allocation failure.
inline MnaaResult run_mnaa(const Instance& inst) {
    return allocate_mandatory(Solution(inst), inst.active_mandatory(), inst);
}

}  // namespace topstmin
