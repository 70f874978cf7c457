#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "instance.hpp"
#include "milp/formulations.hpp"
#include "milp/solve.hpp"
#include "mnaa.hpp"
#include "route_pool.hpp"
#include "solution.hpp"
#include "vnd.hpp"

namespace topstmin {

struct CshParams {
    int iterations = 10;  // outer iterations
    VndParams vnd{5000, 500, 0.40, 200000, 0.0, true};
    double rp_time_limit_s = 360.0;
    long rp_solution_limit = 10;
    bool rp_root_only = true;
    double milp_time_limit_s = 1200.0;  // SPP and exact repair
    int threads = 1;
    int repair_max_rounds = 100;        // lazy subtour rounds of the exact repair
    milp::SolverConfig solver;

    void validate() const {
        if (iterations < 1) throw std::invalid_argument("CSH needs at least one outer iteration");
        if (threads < 1) throw std::invalid_argument("thread count must be at least 1");
        if (rp_time_limit_s < 0 || milp_time_limit_s < 0 || rp_solution_limit < 0)
            throw std::invalid_argument("solver limits must be non-negative");
        vnd.validate();
    }
};

enum class CshStatus { Solved, Infeasible };

struct RepairOutcome {
    std::optional<Solution> solution;  // empty = repair failed
    int stage = 0;                     // 0 none needed, 1 allocation, 2 exact restricted solve
};

struct CshIteration {
    int index = 0;
    milp::Status rp_status = milp::Status::Infeasible;
    std::vector<std::vector<int>> subtours;
    int repair_stage = 0;
    bool repair_failed = false;
    bool used_recovery = false;
    double vnd_profit = 0.0;
    bool vnd_feasible = false;
    double spp_profit = 0.0;
    bool spp_solved = false;
    double incumbent = 0.0;
};

struct CshResult {
    CshStatus status = CshStatus::Infeasible;
    bool found_feasible = false;
    Solution best;
    double best_profit = 0.0;
    std::vector<milp::SubtourCut> secs;  // in accumulation order
    std::vector<CshIteration> history;
    std::size_t pool_size = 0;
    long lii = 0;
    double lit_seconds = 0.0;
    double seconds = 0.0;
    double phase2_seconds = 0.0;  // parallel phase (multi-thread variant)
    std::string note;
};

namespace detail {

inline milp::Controls controls(double time_limit, long solution_limit = 0, bool root_only = false,
                               std::optional<double> lb = std::nullopt) {
    milp::Controls c;
    c.time_limit_s = time_limit;
    c.solution_limit = solution_limit;
    c.root_only = root_only;
    c.warm_lower_bound = lb;
    return c;
}

inline bool has_mandatory(const std::vector<std::vector<int>>& sets, const Instance& inst) {
    for (const auto& s : sets)
        for (int k : s)
            if (inst.is_mandatory(k)) return true;
    return false;
}

// Exact solve of the instance restricted to `allowed` customers, adding
// subtour cuts until the routes are subtour-free.
inline std::optional<Solution> solve_restricted(const Instance& inst, const std::vector<char>& allowed,
                                                const CshParams& p) {
    std::vector<milp::SubtourCut> cuts;
    for (int round = 0; round < p.repair_max_rounds; ++round) {
        auto rp = milp::build_rp(inst, cuts, allowed);
        rp.model.controls = controls(p.milp_time_limit_s);
        const auto r = milp::solve(rp.model, p.solver);
        if (!r.has_solution()) return std::nullopt;
        const auto dec = milp::decode_rp(r.values, rp.index);
        if (dec.subtours.empty()) return Solution::from_sequences(dec.paths, inst);
        const auto more = milp::build_secs(dec.subtours, inst);
        cuts.insert(cuts.end(), more.begin(), more.end());
    }
    return std::nullopt;
}

}  // namespace detail

// Turns an RP assignment into m routes holding every mandatory customer:
// stage 1 re-inserts stranded mandatory customers, stage 2 solves the
// restricted instance exactly. An empty solution means RepairFailed.
inline RepairOutcome repair_solution(const milp::RpDecoded& dec, const Instance& inst, const CshParams& p) {
    RepairOutcome out;
    Solution base = Solution::from_sequences(dec.paths, inst);
    std::vector<int> stranded;
    for (const auto& s : dec.subtours)
        for (int k : s)
            if (inst.is_mandatory(k)) stranded.push_back(k);
    if (stranded.empty()) {
        out.solution = std::move(base);
        return out;
    }
    auto alloc = allocate_mandatory(base, stranded, inst);
    if (alloc.feasible_allocation) {
        out.stage = 1;
        out.solution = std::move(alloc.solution);
        return out;
    }
    std::vector<char> allowed(inst.n() + 1, 0);
    for (const auto& path : dec.paths)
        for (int v : path) allowed[v] = 1;
    for (const auto& s : dec.subtours)
        for (int v : s) allowed[v] = 1;
    out.stage = 2;
    out.solution = detail::solve_restricted(inst, allowed, p);
    return out;
}

namespace detail {

struct SeedStep {
    bool stop = false;
    bool infeasible = false;
    std::optional<Solution> seed;
};

// One RP solve + subtour extraction + repair; appends the new cuts.
inline SeedStep next_seed(const Instance& inst, const CshParams& p, CshResult& res, CshIteration& it,
                          const std::optional<Solution>& recovery) {
    SeedStep step;
    auto rp = milp::build_rp(inst, res.secs);
    rp.model.controls = controls(p.rp_time_limit_s, p.rp_solution_limit, p.rp_root_only);
    const auto r = milp::solve(rp.model, p.solver);
    it.rp_status = r.status;
    if (!r.has_solution()) {
        step.stop = true;
        step.infeasible = r.status == milp::Status::Infeasible;
        res.note = step.infeasible ? "reduced problem infeasible" : "reduced problem returned no solution within its limits";
        return step;
    }
    const auto dec = milp::decode_rp(r.values, rp.index);
    it.subtours = dec.subtours;
    if (has_mandatory(dec.subtours, inst)) {
        auto rep = repair_solution(dec, inst, p);
        it.repair_stage = rep.stage;
        if (rep.solution) {
            step.seed = std::move(rep.solution);
        } else {
            it.repair_failed = true;
            if (recovery) {
                it.used_recovery = true;
                step.seed = *recovery;
            }
        }
    } else {
        step.seed = Solution::from_sequences(dec.paths, inst);
    }
    if (!dec.subtours.empty()) {
        const auto cuts = milp::build_secs(dec.subtours, inst);
        res.secs.insert(res.secs.end(), cuts.begin(), cuts.end());
    }
    return step;
}

struct SppOutcome {
    bool solved = false;
    Solution solution;
    double profit = 0.0;
};

inline SppOutcome solve_spp(const RoutePool& pool, const Instance& inst, const CshParams& p,
                            std::optional<double> lower_bound) {
    SppOutcome out;
    auto spp = milp::build_spp(pool.snapshot(), inst);
    spp.model.controls = controls(p.milp_time_limit_s, 0, false, lower_bound);
    const auto r = milp::solve(spp.model, p.solver);
    if (!r.has_solution()) return out;
    out.solution = milp::decode_spp(spp, r.values, inst);
    if (!is_feasible(out.solution, inst)) return out;
    out.solved = true;
    out.profit = out.solution.profit();
    return out;
}

}  // namespace detail

// Single-thread cuts-separation heuristic.
inline CshResult run_csh_st(const Instance& inst, const CshParams& params, RoutePool* shared_pool = nullptr) {
    params.validate();
    const auto t0 = std::chrono::steady_clock::now();
    auto seconds = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    RoutePool local(params.vnd.route_pool_cap);
    RoutePool& pool = shared_pool ? *shared_pool : local;

    CshResult res;
    res.best = Solution(inst);
    std::optional<Solution> recovery;
    long moves = 0;

    auto consider = [&](const Solution& s, long lii) {
        if (!is_feasible(s, inst)) return;
        if (!res.found_feasible || s.profit() > res.best_profit + 1e-9) {
            res.found_feasible = true;
            res.best = s;
            res.best_profit = s.profit();
            res.lii = lii;
            res.lit_seconds = seconds();
        }
    };

    for (int i = 0; i < params.iterations; ++i) {
        CshIteration it;
        it.index = i;
        auto step = detail::next_seed(inst, params, res, it, recovery);
        if (step.stop) {
            res.history.push_back(it);
            if (step.infeasible && !res.found_feasible) {
                res.status = CshStatus::Infeasible;
                res.seconds = seconds();
                res.pool_size = pool.size();
                return res;
            }
            break;
        }
        if (!step.seed) {
            res.history.push_back(it);
            res.note = "repair failed without a recovery solution";
            res.status = res.found_feasible ? CshStatus::Solved : CshStatus::Infeasible;
            res.seconds = seconds();
            res.pool_size = pool.size();
            return res;
        }

        const auto v = run_vnd(inst, *step.seed, params.vnd, &pool);
        if (v.recovery && !recovery) recovery = v.recovery;
        it.vnd_feasible = v.found_feasible;
        it.vnd_profit = v.best_profit;
        if (v.found_feasible) consider(v.best, moves + v.lii);
        moves += v.moves_applied;

        const auto spp = detail::solve_spp(pool, inst, params,
                                           v.found_feasible ? std::optional<double>(v.best_profit) : std::nullopt);
        it.spp_solved = spp.solved;
        it.spp_profit = spp.profit;
        if (spp.solved) consider(spp.solution, moves);
        it.incumbent = res.best_profit;
        res.history.push_back(it);
    }
    res.status = res.found_feasible ? CshStatus::Solved : CshStatus::Infeasible;
    res.pool_size = pool.size();
    res.seconds = seconds();
    return res;
}

// Runs fn(i) for i in [0, count) on `threads` workers.
inline void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    std::exception_ptr error;
    std::mutex error_mu;
    for (int t = 0; t < std::min(threads, count); ++t)
        workers.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < count;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
}

// Multi-thread variant: seeds are generated sequentially (same cut stream as
// the single-thread run), then improved concurrently; a last set packing
// over the complete pool makes the result independent of task timing.
inline CshResult run_csh_mt(const Instance& inst, const CshParams& params) {
    params.validate();
    const auto t0 = std::chrono::steady_clock::now();
    auto seconds = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    RoutePool pool(params.vnd.route_pool_cap);

    CshResult res;
    res.best = Solution(inst);

    // A start for seeds whose repair fails: the mandatory allocation, if any.
    std::optional<Solution> fallback;
    if (auto a = run_mnaa(inst); a.feasible_allocation) fallback = a.solution;

    std::vector<Solution> seeds;
    std::vector<int> seed_iteration;
    for (int i = 0; i < params.iterations; ++i) {
        CshIteration it;
        it.index = i;
        auto step = detail::next_seed(inst, params, res, it, fallback);
        res.history.push_back(it);
        if (step.stop) {
            if (step.infeasible && seeds.empty()) {
                res.status = CshStatus::Infeasible;
                res.seconds = seconds();
                return res;
            }
            break;
        }
        if (step.seed) {
            seeds.push_back(std::move(*step.seed));
            seed_iteration.push_back(i);
        }
    }
    if (seeds.empty()) {
        res.note = "no seed survived repair";
        res.status = CshStatus::Infeasible;
        res.seconds = seconds();
        return res;
    }

    struct TaskOut {
        VndResult vnd;
        detail::SppOutcome spp;
    };
    std::vector<TaskOut> outs(seeds.size());
    const auto p0 = std::chrono::steady_clock::now();
    parallel_for(static_cast<int>(seeds.size()), params.threads, [&](int i) {
        outs[i].vnd = run_vnd(inst, seeds[i], params.vnd, &pool);
        const auto& v = outs[i].vnd;
        outs[i].spp = detail::solve_spp(pool, inst, params,
                                        v.found_feasible ? std::optional<double>(v.best_profit) : std::nullopt);
    });
    res.phase2_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - p0).count();

    auto consider = [&](const Solution& s) {
        if (!is_feasible(s, inst)) return;
        if (!res.found_feasible || s.profit() > res.best_profit + 1e-9) {
            res.found_feasible = true;
            res.best = s;
            res.best_profit = s.profit();
            res.lit_seconds = seconds();
        }
    };
    for (std::size_t i = 0; i < outs.size(); ++i) {
        auto& it = res.history[seed_iteration[i]];
        it.vnd_feasible = outs[i].vnd.found_feasible;
        it.vnd_profit = outs[i].vnd.best_profit;
        it.spp_solved = outs[i].spp.solved;
        it.spp_profit = outs[i].spp.profit;
        if (outs[i].vnd.found_feasible) consider(outs[i].vnd.best);
        if (outs[i].spp.solved) consider(outs[i].spp.solution);
    }
    std::optional<double> lb;
    if (res.found_feasible) lb = res.best_profit;
    const auto final_spp = detail::solve_spp(pool, inst, params, lb);
    if (final_spp.solved) consider(final_spp.solution);
    for (auto& it : res.history) it.incumbent = res.best_profit;

    res.status = res.found_feasible ? CshStatus::Solved : CshStatus::Infeasible;
    res.pool_size = pool.size();
    res.seconds = seconds();
    return res;
}

}  // namespace topstmin
