#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "../instance.hpp"
#include "../route_pool.hpp"
#include "../solution.hpp"
#include "model.hpp"

namespace topstmin::milp {

// Subtour elimination cut for node set U and anchor k in U:
//   sum_r sum_{i,j in U} x_ijr <= sum_r (sum_{i in U} y_ir - y_kr)
struct SubtourCut {
    std::vector<int> nodes;  // sorted
    int anchor = -1;

    friend bool operator==(const SubtourCut&, const SubtourCut&) = default;
};

// One cut per anchor of every node set.
inline std::vector<SubtourCut> build_secs(const std::vector<std::vector<int>>& subtours, const Instance& inst) {
    std::vector<SubtourCut> cuts;
    for (auto u : subtours) {
        std::sort(u.begin(), u.end());
        if (u.size() < 2) throw std::invalid_argument("subtour set needs at least two customers");
        if (std::adjacent_find(u.begin(), u.end()) != u.end()) throw std::invalid_argument("subtour set has duplicates");
        for (int k : u)
            if (!inst.is_customer(k)) throw std::invalid_argument("subtour set contains a terminal or unknown node");
        for (int k : u) cuts.push_back({u, k});
    }
    return cuts;
}

// Variable layout of the reduced problem.
struct RpIndex {
    int n = 0;
    int m = 0;
    std::vector<int> x;  // (r, i, j) -> variable or -1
    std::vector<int> y;  // (r, k) -> variable or -1

    int xvar(int i, int j, int r) const { return x[(static_cast<std::size_t>(r) * (n + 1) + i) * (n + 1) + j]; }
    int yvar(int k, int r) const { return y[static_cast<std::size_t>(r) * (n + 1) + k]; }
};

struct RpModel {
    Model model;
    RpIndex index;
    int x_count = 0;
    int y_count = 0;
};

inline void add_sec(RpModel& rp, const SubtourCut& cut) {
    const auto& ix = rp.index;
    std::vector<Term> terms;
    for (int r = 0; r < ix.m; ++r) {
        for (int i : cut.nodes)
            for (int j : cut.nodes)
                if (i != j) terms.push_back({ix.xvar(i, j, r), 1.0});
        for (int i : cut.nodes)
            if (i != cut.anchor) terms.push_back({ix.yvar(i, r), -1.0});
    }
    std::string name = "sec";
    for (int v : cut.nodes) name += "_" + std::to_string(v);
    name += "_k" + std::to_string(cut.anchor);
    rp.model.add_row(name, std::move(terms), Sense::LE, 0.0);
}

// Routing model without subtour elimination (plus the given cuts). `allowed`,
// when non-empty, restricts the customers that may be visited.
inline RpModel build_rp(const Instance& inst, const std::vector<SubtourCut>& secs = {},
                        const std::vector<char>& allowed = {}) {
    RpModel rp;
    const int n = inst.n(), m = inst.m();
    auto& ix = rp.index;
    ix.n = n;
    ix.m = m;
    ix.x.assign(static_cast<std::size_t>(m) * (n + 1) * (n + 1), -1);
    ix.y.assign(static_cast<std::size_t>(m) * (n + 1), -1);
    auto& md = rp.model;
    md.direction = Direction::Maximize;
    auto usable_node = [&](int k) { return !inst.is_customer(k) || allowed.empty() || allowed[k]; };

    for (int r = 0; r < m; ++r) {
        for (int i = 1; i <= n - 1; ++i)
            for (int j = 2; j <= n; ++j) {
                if (i == j) continue;
                const int v = md.add_binary("x_" + std::to_string(i) + "_" + std::to_string(j) + "_" + std::to_string(r + 1));
                ix.x[(static_cast<std::size_t>(r) * (n + 1) + i) * (n + 1) + j] = v;
                if (inst.arc_blocked(i, j) || !usable_node(i) || !usable_node(j)) md.fix(v, 0.0);
                ++rp.x_count;
            }
        for (int k = 2; k <= n - 1; ++k) {
            const int v = md.add_binary("y_" + std::to_string(k) + "_" + std::to_string(r + 1), 1);
            ix.y[static_cast<std::size_t>(r) * (n + 1) + k] = v;
            if (!usable_node(k)) md.fix(v, 0.0);
            md.objective.push_back({v, inst.profit(k)});
            ++rp.y_count;
        }
    }

    for (int r = 0; r < m; ++r) {
        const std::string rs = std::to_string(r + 1);
        std::vector<Term> out1, inn;
        for (int j = 2; j <= n; ++j) out1.push_back({ix.xvar(1, j, r), 1.0});
        for (int i = 1; i <= n - 1; ++i) inn.push_back({ix.xvar(i, n, r), 1.0});
        md.add_row("start_" + rs, std::move(out1), Sense::EQ, 1.0);
        md.add_row("end_" + rs, std::move(inn), Sense::EQ, 1.0);
        for (int k = 2; k <= n - 1; ++k) {
            std::vector<Term> in_k{{ix.yvar(k, r), -1.0}}, out_k{{ix.yvar(k, r), -1.0}};
            for (int i = 1; i <= n - 1; ++i)
                if (i != k) in_k.push_back({ix.xvar(i, k, r), 1.0});
            for (int j = 2; j <= n; ++j)
                if (j != k) out_k.push_back({ix.xvar(k, j, r), 1.0});
            const std::string ks = std::to_string(k) + "_" + rs;
            md.add_row("in_" + ks, std::move(in_k), Sense::EQ, 0.0);
            md.add_row("out_" + ks, std::move(out_k), Sense::EQ, 0.0);
        }
        std::vector<Term> budget;
        for (int i = 1; i <= n - 1; ++i)
            for (int j = 2; j <= n; ++j)
                if (i != j) budget.push_back({ix.xvar(i, j, r), inst.service(i) + inst.travel(i, j)});
        md.add_row("budget_" + rs, std::move(budget), Sense::LE, inst.t_max());
    }

    for (int k = 2; k <= n - 1; ++k) {
        std::vector<Term> t;
        for (int r = 0; r < m; ++r) t.push_back({ix.yvar(k, r), 1.0});
        const bool mand = inst.is_mandatory(k);
        md.add_row((mand ? "mandatory_" : "onetour_") + std::to_string(k), std::move(t), mand ? Sense::EQ : Sense::LE, 1.0);
    }

    for (int k = 2; k <= n - 1; ++k) {
        const auto& partners = inst.logic_partners(k);
        if (partners.empty()) continue;
        const double ck = static_cast<double>(partners.size());
        for (int r = 0; r < m; ++r) {
            std::vector<Term> t{{ix.yvar(k, r), ck}};
            for (int i : partners) t.push_back({ix.yvar(i, r), 1.0});
            md.add_row("logic_" + std::to_string(k) + "_" + std::to_string(r + 1), std::move(t), Sense::LE, ck);
        }
    }

    for (const auto& c : secs) add_sec(rp, c);
    return rp;
}

// Paths from the source and the leftover cycles of an integral RP assignment.
struct RpDecoded {
    std::vector<std::vector<int>> paths;      // one per route, 1 ... n
    std::vector<std::vector<int>> subtours;   // customer sets, sorted
};

// Weakly connected components of the selected arcs that avoid both terminals (DFS).
inline std::vector<std::vector<int>> extract_subtours(const std::vector<double>& values, const RpIndex& ix) {
    const int n = ix.n;
    std::vector<std::vector<int>> adj(n + 1);
    std::vector<char> touched(n + 1, 0);
    for (int r = 0; r < ix.m; ++r)
        for (int i = 1; i <= n - 1; ++i)
            for (int j = 2; j <= n; ++j) {
                if (i == j) continue;
                const int v = ix.xvar(i, j, r);
                if (v < 0 || values[v] < 0.5) continue;
                adj[i].push_back(j);
                adj[j].push_back(i);
                touched[i] = touched[j] = 1;
            }
    std::vector<char> seen(n + 1, 0);
    std::vector<std::vector<int>> out;
    for (int s = 1; s <= n; ++s) {
        if (seen[s] || !touched[s]) continue;
        std::vector<int> comp, stack{s};
        seen[s] = 1;
        bool terminal = false;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            comp.push_back(u);
            if (u == 1 || u == n) terminal = true;
            for (int w : adj[u])
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
        if (terminal) continue;
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

inline RpDecoded decode_rp(const std::vector<double>& values, const RpIndex& ix) {
    RpDecoded dec;
    const int n = ix.n;
    for (int r = 0; r < ix.m; ++r) {
        std::vector<int> succ(n + 1, -1);
        for (int i = 1; i <= n - 1; ++i)
            for (int j = 2; j <= n; ++j) {
                if (i == j) continue;
                const int v = ix.xvar(i, j, r);
                if (v >= 0 && values[v] >= 0.5) succ[i] = j;
            }
        std::vector<int> path{1};
        std::vector<char> on(n + 1, 0);
        int cur = 1;
        while (cur != n && succ[cur] > 0 && !on[succ[cur]]) {
            cur = succ[cur];
            on[cur] = 1;
            path.push_back(cur);
        }
        if (path.back() != n) throw std::logic_error("RP assignment has no source-destination path");
        dec.paths.push_back(std::move(path));
    }
    dec.subtours = extract_subtours(values, ix);
    return dec;
}

struct SppModel {
    Model model;
    std::vector<RoutePool::Entry> routes;
};

// Set packing over pooled routes: at most m routes, optional customers at most
// once, mandatory customers exactly once.
inline SppModel build_spp(std::vector<RoutePool::Entry> pool, const Instance& inst) {
    SppModel spp;
    spp.routes = std::move(pool);
    auto& md = spp.model;
    md.direction = Direction::Maximize;
    std::vector<std::vector<Term>> cover(inst.n() + 1);
    std::vector<Term> card;
    for (std::size_t r = 0; r < spp.routes.size(); ++r) {
        const int v = md.add_binary("w_" + std::to_string(r));
        md.objective.push_back({v, spp.routes[r].route.profit});
        card.push_back({v, 1.0});
        const auto& s = spp.routes[r].route.seq;
        for (std::size_t i = 1; i + 1 < s.size(); ++i) cover[s[i]].push_back({v, 1.0});
    }
    for (int k = 2; k <= inst.n() - 1; ++k) {
        const bool mand = inst.is_mandatory(k);
        if (cover[k].empty() && !mand) continue;
        md.add_row((mand ? "mandatory_" : "cover_") + std::to_string(k), std::move(cover[k]), mand ? Sense::EQ : Sense::LE,
                   1.0);
    }
    md.add_row("routes", std::move(card), Sense::LE, inst.m());
    return spp;
}

inline Solution decode_spp(const SppModel& spp, const std::vector<double>& values, const Instance& inst) {
    std::vector<std::vector<int>> seqs;
    for (std::size_t r = 0; r < spp.routes.size(); ++r)
        if (values[r] >= 0.5) seqs.push_back(spp.routes[r].route.seq);
    if (static_cast<int>(seqs.size()) > inst.m()) throw std::logic_error("SPP selected more than m routes");
    while (static_cast<int>(seqs.size()) < inst.m()) seqs.push_back({inst.source(), inst.sink()});
    return Solution::from_sequences(seqs, inst);
}

}  // namespace topstmin::milp
