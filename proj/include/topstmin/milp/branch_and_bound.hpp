#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <algorithm>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "model.hpp"
#include "simplex.hpp"

namespace topstmin::milp {

struct BnbSettings {
    double integrality_tol = 1e-6;
    long root_only_node_cap = 5000;  // depth-first dive budget when controls.root_only is set
    long node_limit = 0;             // 0 = unlimited
    // Deterministic work limit on simplex iterations; reaching it is reported
    // like a time limit. 0 = unlimited.
    long lp_iteration_limit = 0;
};

namespace detail {

inline DualSimplex make_lp(const Model& model, std::vector<double>& lo, std::vector<double>& hi) {
    const int n = model.num_vars();
    const int m = model.num_rows();
    const double sign = model.direction == Direction::Maximize ? -1.0 : 1.0;

    std::vector<std::vector<std::pair<int, double>>> cols(n);
    for (int i = 0; i < m; ++i) {
        // merge duplicate terms of one row
        std::vector<std::pair<int, double>> acc;
        for (const auto& t : model.rows[i].terms) acc.emplace_back(t.var, t.coef);
        std::sort(acc.begin(), acc.end());
        for (std::size_t k = 0; k < acc.size();) {
            double c = 0.0;
            const int v = acc[k].first;
            while (k < acc.size() && acc[k].first == v) c += acc[k++].second;
            if (c != 0.0) cols[v].emplace_back(i, c);
        }
    }
    CscMatrix a;
    a.rows = m;
    a.cols = n;
    for (int j = 0; j < n; ++j) {
        for (auto [i, c] : cols[j]) {
            a.index.push_back(i);
            a.value.push_back(c);
        }
        a.start.push_back(static_cast<int>(a.index.size()));
    }
    std::vector<double> cost(n + m, 0.0);
    for (const auto& t : model.objective) cost[t.var] += sign * t.coef;

    constexpr double inf = std::numeric_limits<double>::infinity();
    lo.assign(n + m, 0.0);
    hi.assign(n + m, 0.0);
    for (int j = 0; j < n; ++j) {
        lo[j] = model.vars[j].lb;
        hi[j] = model.vars[j].ub;
    }
    for (int i = 0; i < m; ++i) {
        const auto& row = model.rows[i];
        lo[n + i] = row.sense == Sense::LE ? -inf : row.rhs;
        hi[n + i] = row.sense == Sense::GE ? inf : row.rhs;
    }
    return DualSimplex(std::move(a), std::move(cost), lo, hi);
}

}  // namespace detail

// LP-based branch and bound (depth first, rounding-direction child first,
// most fractional variable within the highest branching-priority class).
inline Result solve_internal(const Model& model, const BnbSettings& settings = {}) {
    using Clock = std::chrono::steady_clock;
    const auto t0 = Clock::now();
    const auto& ctl = model.controls;
    std::optional<Clock::time_point> deadline;
    if (ctl.time_limit_s > 0)
        deadline = t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(ctl.time_limit_s));

    Result res;
    std::ostringstream log;
    const int n = model.num_vars();
    const double sign = model.direction == Direction::Maximize ? 1.0 : -1.0;  // to "maximise" form

    for (const auto& v : model.vars)
        if (!std::isfinite(v.lb) || !std::isfinite(v.ub)) throw BackendError("internal solver needs bounded variables");

    // Integral objective coefficients on integer variables allow rounding the bound down.
    bool integral_objective = true;
    for (const auto& t : model.objective)
        if (!model.vars[t.var].integer || std::abs(t.coef - std::round(t.coef)) > 1e-12) integral_objective = false;

    std::vector<double> root_lo, root_hi;
    DualSimplex lp = detail::make_lp(model, root_lo, root_hi);

    struct Node {
        std::vector<std::pair<int, double>> fixes;
        double bound;  // parent LP bound (maximise form)
    };
    std::vector<Node> stack;
    // The LP keeps its last basis between nodes: bound changes only cost
    // dual-feasibility restoring flips, so no per-node basis is stored.
    stack.push_back({{}, std::numeric_limits<double>::infinity()});

    bool have_inc = false;
    double inc_obj = -std::numeric_limits<double>::infinity();  // maximise form
    bool incomplete = false;
    bool stopped_time = false, stopped_solutions = false, stopped_cap = false;
    bool abandoned = false;  // the node being processed at a stop could still improve
    std::vector<int> applied;  // structurals whose bounds may differ from the root
    std::vector<char> is_fixed(n, 0);
    for (int j = 0; j < n; ++j) is_fixed[j] = root_lo[j] == root_hi[j];
    auto fix_var = [&](int j, double v) {
        lp.set_bounds(j, v, v);
        is_fixed[j] = 1;
        applied.push_back(j);
    };
    auto reset_bounds = [&] {
        for (int j : applied) {
            lp.set_bounds(j, root_lo[j], root_hi[j]);
            is_fixed[j] = root_lo[j] == root_hi[j];
        }
        applied.clear();
    };

    const long iters_at_start = lp.iterations();
    auto work_left = [&]() -> long {
        if (settings.lp_iteration_limit <= 0) return -1;
        return std::max(0L, settings.lp_iteration_limit - (lp.iterations() - iters_at_start));
    };
    auto out_of_work = [&] { return work_left() == 0 || (deadline && Clock::now() >= *deadline); };
    // Per-LP iteration cap: the default unless the work budget is tighter.
    auto lp_cap = [&]() -> long {
        const long left = work_left();
        const long dflt = 50L * (lp.num_structurals() + lp.num_rows()) + 10000;
        return left < 0 ? dflt : std::min(left, dflt);
    };

    auto threshold = [&]() -> double {
        // a node is worth exploring only if its bound beats this (maximise form)
        if (have_inc) return inc_obj + 1e-6;
        if (ctl.warm_lower_bound) return sign * *ctl.warm_lower_bound - 1e-6;
        return -std::numeric_limits<double>::infinity();
    };
    auto prunable = [&](double bound) {
        if (integral_objective && std::isfinite(bound)) bound = std::floor(bound + 1e-6);
        if (have_inc) return bound <= inc_obj + 1e-6;
        if (ctl.warm_lower_bound) return bound < sign * *ctl.warm_lower_bound - 1e-6;
        return false;
    };

    // Variables of equality rows with positive coefficients (assignment rows)
    // are rounded first when diving.
    std::vector<char> in_partition(n, 0);
    for (const auto& row : model.rows) {
        if (row.sense != Sense::EQ) continue;
        bool positive = true;
        for (const auto& t : row.terms) positive = positive && t.coef > 0;
        if (positive)
            for (const auto& t : row.terms) in_partition[t.var] = 1;
    }
    // Fractional variable of the highest priority class: the most fractional
    // one for branching, the largest-valued (assignment rows first) one for diving.
    auto fractional_pick = [&](const std::vector<double>& x, bool for_branching) {
        int pick = -1;
        int best_prio = std::numeric_limits<int>::min();
        double best = -1.0;
        for (int j = 0; j < n; ++j) {
            if (!model.vars[j].integer) continue;
            const double f = x[j] - std::floor(x[j]);
            const double dist = std::min(f, 1.0 - f);
            if (dist <= settings.integrality_tol) continue;
            const int prio = model.vars[j].priority;
            const double score = for_branching ? dist : x[j] + (in_partition[j] ? 2.0 : 0.0);
            if (prio > best_prio || (prio == best_prio && score > best + 1e-12)) {
                best_prio = prio;
                best = score;
                pick = j;
            }
        }
        return pick;
    };

    auto offer_incumbent = [&](const std::vector<double>& x) -> bool {
        std::vector<double> sol(x.begin(), x.begin() + n);
        for (int j = 0; j < n; ++j)
            if (model.vars[j].integer) sol[j] = std::round(sol[j]);
        if (auto err = verify(model, sol)) {
            incomplete = true;
            log << "node " << res.nodes << ": rounded LP point rejected (" << *err << ")\n";
            return false;
        }
        const double obj = sign * evaluate_objective(model, sol);
        if (have_inc && obj <= inc_obj + 1e-9) return false;
        have_inc = true;
        inc_obj = obj;
        res.values = sol;
        res.incumbents.push_back(sol);
        return true;
    };

    // Fix-and-dive from the current LP optimum: every integer variable at 1
    // is fixed and the largest fractional one is rounded up. Failures backtrack to
    // the latest rounding whose other direction is untried, up to a budget.
    auto unfix_to = [&](std::size_t mark) {
        while (applied.size() > mark) {
            const int j = applied.back();
            applied.pop_back();
            lp.set_bounds(j, root_lo[j], root_hi[j]);
            is_fixed[j] = root_lo[j] == root_hi[j];
        }
    };
    auto dive = [&]() -> bool {
        struct Level {
            std::size_t mark;  // applied.size() before this level's fixes
            int var;
            double other;
            bool tried_other;
        };
        std::vector<Level> levels;
        int backtracks = 0;
        const int max_backtracks = 40;
        auto lp_ok = [&]() -> std::optional<bool> {
            const double th = threshold();
            const auto out = lp.solve(std::isfinite(th) ? -th : std::numeric_limits<double>::infinity(), deadline, lp_cap());
            if (out == DualSimplex::Outcome::TimeLimit || out == DualSimplex::Outcome::IterationLimit) return std::nullopt;
            return out == DualSimplex::Outcome::Optimal;
        };
        for (long step = 0; step < 8L * n + 100; ++step) {
            const std::vector<double> x(lp.values().begin(), lp.values().begin() + n);
            const int j = fractional_pick(x, false);
            if (j < 0) return offer_incumbent(x);
            const std::size_t mark = applied.size();
            for (int k = 0; k < n; ++k)
                if (model.vars[k].integer && !is_fixed[k] && x[k] >= 1.0 - settings.integrality_tol) fix_var(k, std::round(x[k]));
            levels.push_back({mark, j, std::floor(x[j]), false});
            fix_var(j, std::ceil(x[j]));
            auto ok = lp_ok();
            while (ok && !*ok) {
                while (!levels.empty() && levels.back().tried_other) {
                    unfix_to(levels.back().mark);
                    levels.pop_back();
                    ++backtracks;
                }
                if (levels.empty() || backtracks > max_backtracks) return false;
                auto& lv = levels.back();
                lv.tried_other = true;
                unfix_to(lv.mark);
                fix_var(lv.var, lv.other);
                ok = lp_ok();
            }
            if (!ok) return false;
        }
        return false;
    };

    while (!stack.empty()) {
        if (out_of_work()) {
            stopped_time = true;
            break;
        }
        if (settings.node_limit > 0 && res.nodes >= settings.node_limit) {
            stopped_cap = true;
            break;
        }
        if (ctl.root_only && res.nodes >= settings.root_only_node_cap) {
            stopped_cap = true;
            break;
        }
        Node node = std::move(stack.back());
        stack.pop_back();
        if (prunable(node.bound)) continue;
        ++res.nodes;

        reset_bounds();
        for (auto [j, v] : node.fixes) fix_var(j, v);

        const double th = threshold();
        const double cutoff = std::isfinite(th) ? -th : std::numeric_limits<double>::infinity();
        const auto out = lp.solve(cutoff, deadline, lp_cap());
        if (out == DualSimplex::Outcome::TimeLimit || out_of_work()) {
            stopped_time = true;
            break;
        }
        if (out == DualSimplex::Outcome::IterationLimit) {
            incomplete = true;
            log << "node " << res.nodes << ": LP iteration limit\n";
            lp.reset_basis();
            continue;
        }
        if (out != DualSimplex::Outcome::Optimal) continue;  // infeasible or cut off

        const double bound = -lp.objective();
        if (prunable(bound)) continue;

        const std::vector<double> x(lp.values().begin(), lp.values().begin() + n);
        const int branch = fractional_pick(x, true);
        auto limit_reached = [&] {
            if (ctl.solution_limit > 0 && static_cast<long>(res.incumbents.size()) >= ctl.solution_limit) {
                stopped_solutions = true;
                return true;
            }
            if (ctl.root_only) {
                stopped_cap = true;
                return true;
            }
            return false;
        };
        if (branch < 0) {
            if (offer_incumbent(x) && limit_reached()) break;
            continue;
        }
        if (!have_inc && (res.nodes == 1 || res.nodes % 100 == 0)) {
            if (dive() && limit_reached()) {
                abandoned = bound > inc_obj + 1e-6;
                break;
            }
            if (out_of_work()) {
                stopped_time = true;
                break;
            }
        }

        const double v = x[branch];
        const double down = std::floor(v), up = std::ceil(v);
        const bool up_first = v - down >= 0.5;
        Node a{node.fixes, bound}, b{std::move(node.fixes), bound};
        a.fixes.emplace_back(branch, up_first ? down : up);
        b.fixes.emplace_back(branch, up_first ? up : down);
        stack.push_back(std::move(a));  // explored second
        stack.push_back(std::move(b));
    }

    // Nodes still open only matter if they could beat the incumbent.
    bool open = abandoned;
    for (const auto& nd : stack)
        if (!prunable(nd.bound)) open = true;

    if (have_inc) res.objective = evaluate_objective(model, res.values);
    if (stopped_solutions) res.status = Status::SolutionLimit;
    else if (stopped_time) res.status = Status::TimeLimit;
    else if ((stopped_cap && open) || incomplete) res.status = have_inc ? Status::Feasible : Status::TimeLimit;
    else res.status = have_inc ? Status::Optimal : Status::Infeasible;

    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    log << "nodes=" << res.nodes << " lp_iterations=" << lp.iterations() << " status=" << to_string(res.status) << '\n';
    res.log = log.str();
    return res;
}

}  // namespace topstmin::milp
