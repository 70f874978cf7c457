#pragma once

#include <chrono>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "instance.hpp"
#include "moves.hpp"
#include "route_pool.hpp"
#include "solution.hpp"

namespace topstmin {

struct VndParams {
    long max_nonimproving = 10000;  // consecutive iterations without a better incumbent
    long sir_patience = 500;        // infeasible-phase iterations before a recovery reset
    double tabu_fraction = 0.40;
    std::size_t route_pool_cap = 200000;
    double time_limit_s = 0.0;      // 0 = unlimited
    bool stop_when_pool_full = true;

    void validate() const {
        if (max_nonimproving <= 0 || sir_patience <= 0 || tabu_fraction <= 0 || route_pool_cap == 0)
            throw std::invalid_argument("VND parameters must be positive");
    }
};

struct VndResult {
    bool found_feasible = false;
    Solution best;
    double best_profit = 0.0;
    std::optional<Solution> recovery;
    long iterations = 0;
    long moves_applied = 0;
    long lii = 0;              // moves applied when the incumbent last improved
    double lit_seconds = 0.0;  // wall time of the last improvement
    double elapsed_seconds = 0.0;
    long resets = 0;
    std::size_t routes_added = 0;
    bool pool_full_stop = false;
    std::vector<std::pair<long, double>> incumbent_trace;  // (iteration, z*) at each update
};

// Repeatedly inserts the most profitable unassigned node that still fits,
// ignoring the tabu lists.
inline Solution optimise(Solution sol, const Instance& inst) {
    const ExploreOptions opt{SearchPhase::Feasible, true, nullptr};
    while (auto mv = explore_insert_node(sol, inst, opt)) apply_move(sol, *mv, inst);
    return sol;
}

namespace detail {

inline constexpr MoveKind kSfrSequence[] = {MoveKind::InsertNode,     MoveKind::SwapNodes, MoveKind::SwapNodesRoutes,
                                            MoveKind::MoveNodeRoutes, MoveKind::TwoOpt,    MoveKind::MoveNode};
inline constexpr MoveKind kSirSequence[] = {MoveKind::SwapNodesRoutes, MoveKind::MoveNodeRoutes, MoveKind::TwoOpt,
                                            MoveKind::MoveNode,        MoveKind::SwapNodes,      MoveKind::ExtractNode};

template <std::size_t N>
std::optional<Move> first_improving(const MoveKind (&seq)[N], const Solution& sol, const Instance& inst,
                                    const ExploreOptions& opt) {
    for (MoveKind k : seq)
        if (auto mv = explore(k, sol, inst, opt)) return mv;
    return std::nullopt;
}

}  // namespace detail

// Variable neighbourhood descent alternating a feasible-region phase (SFR)
// and a budget-relaxed phase (SIR). Feasible routes are offered to `pool`.
inline VndResult run_vnd(const Instance& inst, const Solution& start, const VndParams& params,
                         RoutePool* pool = nullptr, std::ostream* trace = nullptr) {
    params.validate();
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    auto seconds = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

    RoutePool local_pool(params.route_pool_cap);
    RoutePool& omega = pool ? *pool : local_pool;

    VndResult res;
    res.best = start;
    Solution cur = start;
    TabuLists tabu(inst.n(), params.tabu_fraction);
    tabu.resize_for(cur.visited_count());

    auto offer_route = [&](const Route& r) {
        if (route_feasible(r, inst) && omega.offer(r)) ++res.routes_added;
    };
    auto record_incumbent = [&](long iter) {
        const Solution opt = optimise(cur, inst);
        for (const auto& r : opt.routes()) offer_route(r);
        if (!res.found_feasible || opt.profit() > res.best_profit + 1e-9) {
            res.found_feasible = true;
            res.best = opt;
            res.best_profit = opt.profit();
            res.lii = res.moves_applied;
            res.lit_seconds = seconds();
            res.incumbent_trace.emplace_back(iter, res.best_profit);
            return true;
        }
        return false;
    };

    SearchPhase phase = SearchPhase::Infeasible;
    bool forced = true;  // the forcing insertion only opens an SIR phase entered from a feasible state
    long sir_iters = 0;
    for (const auto& r : cur.routes()) offer_route(r);
    if (is_feasible(cur, inst)) {
        phase = SearchPhase::Feasible;
        res.recovery = cur;
        record_incumbent(0);
    }

    long nonimp = 0;
    while (nonimp < params.max_nonimproving) {
        if (params.time_limit_s > 0 && seconds() >= params.time_limit_s) break;
        if (params.stop_when_pool_full && omega.full()) {
            res.pool_full_stop = true;
            break;
        }
        const long iter = ++res.iterations;
        const SearchPhase searched = phase;  // the trace reports the phase the move was sought in
        std::optional<Move> mv;
        bool stuck = false;
        if (phase == SearchPhase::Feasible) {
            mv = detail::first_improving(detail::kSfrSequence, cur, inst, ExploreOptions::feasible(&tabu));
            if (!mv) {
                phase = SearchPhase::Infeasible;
                forced = false;
                sir_iters = 0;
            }
        } else {
            if (!forced) {
                forced = true;
                mv = explore_forcing_insert(cur, inst, &tabu);
            }
            if (!mv) mv = detail::first_improving(detail::kSirSequence, cur, inst, ExploreOptions::infeasible(&tabu));
            stuck = !mv;
            ++sir_iters;
        }

        if (mv) {
            apply_move(cur, *mv, inst, &tabu);
            ++res.moves_applied;
            offer_route(cur.route(mv->route_a));
            if (mv->route_b >= 0 && mv->route_b != mv->route_a) offer_route(cur.route(mv->route_b));
        }

        bool improved = false;
        const bool feasible_now = is_feasible(cur, inst);
        // SIR with a feasible solution only follows an exhausted SFR; with no
        // move left either, the state (tabu lists included) can no longer change.
        if (feasible_now && stuck) break;
        if (feasible_now && mv) {
            if (!res.recovery) res.recovery = cur;
            if (phase == SearchPhase::Infeasible) {
                phase = SearchPhase::Feasible;
                sir_iters = 0;
            }
            improved = record_incumbent(iter);
        }

        if (trace) {
            *trace << iter << '\t' << (searched == SearchPhase::Feasible ? "SFR" : "SIR") << '\t'
                   << (mv ? to_string(mv->kind) : "-") << '\t' << detail::fmt_double(cur.profit()) << '\t'
                   << detail::fmt_double(time_violation(cur, inst)) << '\n';
        }

        nonimp = improved ? 0 : nonimp + 1;

        if (phase == SearchPhase::Infeasible && !feasible_now) {
            if (stuck && sir_iters < params.sir_patience) {
                // Nothing can change until the reset: skip the idle iterations.
                const long skip = std::min(params.sir_patience - sir_iters, params.max_nonimproving - nonimp);
                res.iterations += skip;
                nonimp += skip;
                sir_iters += skip;
            }
            if (sir_iters >= params.sir_patience) {
                cur = res.recovery ? *res.recovery : start;
                ++res.resets;
                sir_iters = 0;
                if (is_feasible(cur, inst)) {
                    phase = SearchPhase::Feasible;
                } else {
                    phase = SearchPhase::Infeasible;
                    forced = true;
                }
                tabu.resize_for(cur.visited_count());
            }
        }
    }
    res.elapsed_seconds = seconds();
    return res;
}

}  // namespace topstmin
