#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "instance.hpp"
#include "solution.hpp"

namespace topstmin {

enum class MoveKind { InsertNode, SwapNodes, MoveNode, MoveNodeRoutes, SwapNodesRoutes, ExtractNode, TwoOpt };

inline const char* to_string(MoveKind k) {
    switch (k) {
        case MoveKind::InsertNode: return "InsertNode";
        case MoveKind::SwapNodes: return "SwapNodes";
        case MoveKind::MoveNode: return "MoveNode";
        case MoveKind::MoveNodeRoutes: return "MoveNodeRoutes";
        case MoveKind::SwapNodesRoutes: return "SwapNodesRoutes";
        case MoveKind::ExtractNode: return "ExtractNode";
        case MoveKind::TwoOpt: return "2-Opt";
    }
    return "?";
}

// Minimal cost decrease that counts as an improvement.
inline constexpr double kImproveEps = 1e-9;

// A reified neighbourhood action. Positions index Route::seq.
//   InsertNode      node_a enters route_a at pos_a
//   SwapNodes       node_a (at route_a/pos_a) leaves, node_b takes its place
//   MoveNode        node_a moves from pos_a to final index pos_b of route_a
//   MoveNodeRoutes  node_a moves from (route_a,pos_a) to final index pos_b of route_b
//   SwapNodesRoutes node_a at (route_a,pos_a) and node_b at (route_b,pos_b) trade places
//   ExtractNode     node_a leaves route_a from pos_a
//   TwoOpt          node_a at pos_a and node_b at pos_b (pos_a < pos_b) of route_a trade places
struct Move {
    MoveKind kind = MoveKind::InsertNode;
    int route_a = -1, pos_a = -1;
    int route_b = -1, pos_b = -1;
    int node_a = -1, node_b = -1;
    double delta_cost = 0.0;    // summed over affected routes
    double delta_profit = 0.0;
    double new_cost_a = 0.0;    // resulting cost of route_a
    double new_cost_b = 0.0;    // resulting cost of route_b (inter-route kinds)
};

class StaleMoveError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Two FIFO lists fixing nodes inside (L1) or outside (L2) the solution. Their
// common capacity is ceil(fraction * visited customers).
class TabuLists {
public:
    TabuLists() = default;
    TabuLists(int n, double fraction = 0.40) : fraction_(fraction), in_l1_(n + 1, 0), in_l2_(n + 1, 0) {}

    bool fixed_inside(int k) const { return !in_l1_.empty() && in_l1_[k] != 0; }
    bool fixed_outside(int k) const { return !in_l2_.empty() && in_l2_[k] != 0; }
    std::size_t capacity() const { return cap_; }
    const std::deque<int>& inside() const { return l1_; }
    const std::deque<int>& outside() const { return l2_; }

    void push_inside(int k) {
        erase(l2_, in_l2_, k);
        if (!fixed_inside(k)) {
            l1_.push_back(k);
            in_l1_[k] = 1;
        }
        trim();
    }
    void push_outside(int k) {
        erase(l1_, in_l1_, k);
        if (!fixed_outside(k)) {
            l2_.push_back(k);
            in_l2_[k] = 1;
        }
        trim();
    }
    void resize_for(int visited_customers) {
        cap_ = visited_customers <= 0 ? 0 : static_cast<std::size_t>(std::ceil(fraction_ * visited_customers - 1e-9));
        trim();
    }
    void clear() {
        for (int k : l1_) in_l1_[k] = 0;
        for (int k : l2_) in_l2_[k] = 0;
        l1_.clear();
        l2_.clear();
    }

private:
    static void erase(std::deque<int>& q, std::vector<char>& flag, int k) {
        if (flag.empty() || !flag[k]) return;
        q.erase(std::find(q.begin(), q.end(), k));
        flag[k] = 0;
    }
    void trim() {
        while (l1_.size() > cap_) {
            in_l1_[l1_.front()] = 0;
            l1_.pop_front();
        }
        while (l2_.size() > cap_) {
            in_l2_[l2_.front()] = 0;
            l2_.pop_front();
        }
    }

    double fraction_ = 0.40;
    std::size_t cap_ = 0;
    std::deque<int> l1_, l2_;
    std::vector<char> in_l1_, in_l2_;
};

enum class SearchPhase { Feasible, Infeasible };

struct ExploreOptions {
    SearchPhase phase = SearchPhase::Feasible;
    // Modified routes must stay within T_max (the feasible-region search).
    bool enforce_budget = true;
    const TabuLists* tabu = nullptr;

    static ExploreOptions feasible(const TabuLists* t) { return {SearchPhase::Feasible, true, t}; }
    static ExploreOptions infeasible(const TabuLists* t) { return {SearchPhase::Infeasible, false, t}; }
};

namespace detail {

struct MoveCtx {
    const Solution& sol;
    const Instance& inst;
    const ExploreOptions& opt;

    double t(int i, int j) const { return inst.travel(i, j); }
    bool usable(int i, int j) const { return inst.arc_usable(i, j); }
    bool in_budget(double cost) const { return !opt.enforce_budget || route_within_budget(cost, inst); }
    bool tabu_in(int k) const { return opt.tabu && opt.tabu->fixed_inside(k); }
    bool tabu_out(int k) const { return opt.tabu && opt.tabu->fixed_outside(k); }

    // Number of nodes of route r logically incompatible with u.
    std::vector<int> conflicts_per_route(int u) const {
        std::vector<int> cnt(sol.route_count(), 0);
        for (int w : inst.logic_partners(u))
            if (sol.visits(w)) ++cnt[sol.route_of(w)];
        return cnt;
    }
};

// Lexicographic "a strictly better than b" over tuples of keys.
template <typename Key>
bool key_less(const Key& a, const std::optional<Key>& b) {
    return !b || a < *b;
}

inline std::vector<int> unassigned_customers(const Solution& sol, const Instance& inst) {
    std::vector<int> out;
    for (int k = 2; k <= inst.n() - 1; ++k)
        if (!sol.visits(k)) out.push_back(k);
    return out;
}

}  // namespace detail

// Best insertion of an unassigned node: max profit gain, then min added cost.
inline std::optional<Move> explore_insert_node(const Solution& sol, const Instance& inst, const ExploreOptions& opt) {
    detail::MoveCtx cx{sol, inst, opt};
    using Key = std::tuple<double, double, int, int, int>;
    std::optional<Key> best_key;
    std::optional<Move> best;
    for (int u : detail::unassigned_customers(sol, inst)) {
        if (cx.tabu_out(u) || inst.profit(u) <= 0) continue;
        const auto conf = cx.conflicts_per_route(u);
        for (int r = 0; r < sol.route_count(); ++r) {
            if (conf[r] > 0) continue;
            const auto& q = sol.route(r).seq;
            for (int p = 1; p < static_cast<int>(q.size()); ++p) {
                const int a = q[p - 1], b = q[p];
                if (!cx.usable(a, u) || !cx.usable(u, b)) continue;
                const double dc = cx.t(a, u) + inst.service(u) + cx.t(u, b) - cx.t(a, b);
                const double nc = sol.route(r).cost + dc;
                if (!cx.in_budget(nc)) continue;
                Key k{-inst.profit(u), dc, r, p, u};
                if (!detail::key_less(k, best_key)) continue;
                best_key = k;
                best = Move{MoveKind::InsertNode, r, p, -1, -1, u, -1, dc, inst.profit(u), nc, 0.0};
            }
        }
    }
    return best;
}

// Forced insertion that pushes a route over budget: best profit per unit of added time.
inline std::optional<Move> explore_forcing_insert(const Solution& sol, const Instance& inst, const TabuLists* tabu) {
    ExploreOptions opt{SearchPhase::Infeasible, false, tabu};
    detail::MoveCtx cx{sol, inst, opt};
    using Key = std::tuple<double, double, double, int, int, int>;
    std::optional<Key> best_key;
    std::optional<Move> best;
    for (int u : detail::unassigned_customers(sol, inst)) {
        if (cx.tabu_out(u)) continue;
        const auto conf = cx.conflicts_per_route(u);
        for (int r = 0; r < sol.route_count(); ++r) {
            if (conf[r] > 0) continue;
            const auto& q = sol.route(r).seq;
            for (int p = 1; p < static_cast<int>(q.size()); ++p) {
                const int a = q[p - 1], b = q[p];
                if (!cx.usable(a, u) || !cx.usable(u, b)) continue;
                const double dc = cx.t(a, u) + inst.service(u) + cx.t(u, b) - cx.t(a, b);
                const double nc = sol.route(r).cost + dc;
                if (route_within_budget(nc, inst) || dc <= 0) continue;
                Key k{-inst.profit(u) / dc, -inst.profit(u), dc, r, p, u};
                if (!detail::key_less(k, best_key)) continue;
                best_key = k;
                best = Move{MoveKind::InsertNode, r, p, -1, -1, u, -1, dc, inst.profit(u), nc, 0.0};
            }
        }
    }
    return best;
}

// Best in/out exchange inside one route: max profit gain, then min cost change.
// The feasible phase needs a profit gain, the infeasible one a cost decrease.
inline std::optional<Move> explore_swap_nodes(const Solution& sol, const Instance& inst, const ExploreOptions& opt) {
    detail::MoveCtx cx{sol, inst, opt};
    using Key = std::tuple<double, double, int, int, int>;
    std::optional<Key> best_key;
    std::optional<Move> best;
    const auto outside = detail::unassigned_customers(sol, inst);
    std::vector<std::vector<int>> conf(inst.n() + 1);
    for (int u : outside) conf[u] = cx.conflicts_per_route(u);
    for (int r = 0; r < sol.route_count(); ++r) {
        const auto& q = sol.route(r).seq;
        for (int p = 1; p + 1 < static_cast<int>(q.size()); ++p) {
            const int v = q[p];
            if (cx.tabu_in(v) || inst.is_mandatory(v)) continue;
            const int a = q[p - 1], b = q[p + 1];
            const double removed = cx.t(a, v) + cx.t(v, b) + inst.service(v);
            for (int u : outside) {
                if (cx.tabu_out(u)) continue;
                if (conf[u][r] - (inst.conflicting(u, v) ? 1 : 0) > 0) continue;
                if (!cx.usable(a, u) || !cx.usable(u, b)) continue;
                const double dp = inst.profit(u) - inst.profit(v);
                const double dc = cx.t(a, u) + cx.t(u, b) + inst.service(u) - removed;
                if (opt.phase == SearchPhase::Feasible ? !(dp > 0) : !(dc < -kImproveEps)) continue;
                const double nc = sol.route(r).cost + dc;
                if (!cx.in_budget(nc)) continue;
                Key k{-dp, dc, r, p, u};
                if (!detail::key_less(k, best_key)) continue;
                best_key = k;
                best = Move{MoveKind::SwapNodes, r, p, -1, -1, v, u, dc, dp, nc, 0.0};
            }
        }
    }
    return best;
}

// Cost change of removing position p and reinserting the node at final index q.
namespace detail {
inline std::optional<double> relocate_delta(const std::vector<int>& s, int p, int q, const Instance& inst) {
    const int v = s[p];
    // reduced sequence R: s without index p
    auto R = [&](int i) { return i < p ? s[i] : s[i + 1]; };
    const int a = s[p - 1], b = s[p + 1];
    if (!inst.arc_usable(a, b)) return std::nullopt;
    const int x = R(q - 1), y = R(q);
    if (!inst.arc_usable(x, v) || !inst.arc_usable(v, y)) return std::nullopt;
    const double rem = inst.travel(a, b) - inst.travel(a, v) - inst.travel(v, b);
    const double ins = inst.travel(x, v) + inst.travel(v, y) - inst.travel(x, y);
    return rem + ins;
}
}  // namespace detail

// Best intra-route relocation; strictly cost-reducing.
inline std::optional<Move> explore_move_node(const Solution& sol, const Instance& inst, const ExploreOptions& opt) {
    (void)opt;
    using Key = std::tuple<double, int, int, int>;
    std::optional<Key> best_key;
    std::optional<Move> best;
    for (int r = 0; r < sol.route_count(); ++r) {
        const auto& s = sol.route(r).seq;
        const int len = static_cast<int>(s.size());
        if (len < 4) continue;
        for (int p = 1; p + 1 < len; ++p)
            for (int q = 1; q + 1 < len; ++q) {
                if (q == p) continue;
                auto d = detail::relocate_delta(s, p, q, inst);
                if (!d || !(*d < -kImproveEps)) continue;
                Key k{*d, r, p, q};
                if (!detail::key_less(k, best_key)) continue;
                best_key = k;
                best = Move{MoveKind::MoveNode, r, p, r, q, s[p], -1, *d, 0.0, sol.route(r).cost + *d, 0.0};
            }
    }
    return best;
}

// Best relocation of a node into another route; strictly cost-reducing.
inline std::optional<Move> explore_move_node_routes(const Solution& sol, const Instance& inst,
                                                    const ExploreOptions& opt) {
    detail::MoveCtx cx{sol, inst, opt};
    using Key = std::tuple<double, int, int, int, int>;
    std::optional<Key> best_key;
    std::optional<Move> best;
    if (sol.route_count() < 2) return best;
    for (int ra = 0; ra < sol.route_count(); ++ra) {
        const auto& s = sol.route(ra).seq;
        for (int pa = 1; pa + 1 < static_cast<int>(s.size()); ++pa) {
            const int v = s[pa];
            if (cx.tabu_in(v)) continue;
            const int a = s[pa - 1], b = s[pa + 1];
            if (!cx.usable(a, b)) continue;
            const double rem = cx.t(a, b) - cx.t(a, v) - cx.t(v, b) - inst.service(v);
            const auto conf = cx.conflicts_per_route(v);
            for (int rb = 0; rb < sol.route_count(); ++rb) {
                if (rb == ra || conf[rb] > 0) continue;
                const auto& t = sol.route(rb).seq;
                for (int pb = 1; pb < static_cast<int>(t.size()); ++pb) {
                    const int x = t[pb - 1], y = t[pb];
                    if (!cx.usable(x, v) || !cx.usable(v, y)) continue;
                    const double ins = cx.t(x, v) + inst.service(v) + cx.t(v, y) - cx.t(x, y);
                    const double d = rem + ins;
                    if (!(d < -kImproveEps)) continue;
                    const double nb = sol.route(rb).cost + ins;
                    if (!cx.in_budget(nb)) continue;
                    Key k{d, ra, pa, rb, pb};
                    if (!detail::key_less(k, best_key)) continue;
                    best_key = k;
                    best = Move{MoveKind::MoveNodeRoutes, ra, pa, rb, pb, v, -1, d, 0.0, sol.route(ra).cost + rem, nb};
                }
            }
        }
    }
    return best;
}

// Best exchange of two nodes between routes; strictly cost-reducing, profit unchanged.
inline std::optional<Move> explore_swap_nodes_routes(const Solution& sol, const Instance& inst,
                                                     const ExploreOptions& opt) {
    detail::MoveCtx cx{sol, inst, opt};
    using Key = std::tuple<double, int, int, int, int>;
    std::optional<Key> best_key;
    std::optional<Move> best;
    for (int ra = 0; ra < sol.route_count(); ++ra) {
        const auto& s = sol.route(ra).seq;
        for (int pa = 1; pa + 1 < static_cast<int>(s.size()); ++pa) {
            const int x = s[pa];
            if (cx.tabu_in(x)) continue;
            const auto conf_x = cx.conflicts_per_route(x);
            for (int rb = ra + 1; rb < sol.route_count(); ++rb) {
                const auto& t = sol.route(rb).seq;
                for (int pb = 1; pb + 1 < static_cast<int>(t.size()); ++pb) {
                    const int y = t[pb];
                    if (cx.tabu_in(y)) continue;
                    const bool xy = inst.conflicting(x, y);
                    if (conf_x[rb] - (xy ? 1 : 0) > 0) continue;
                    bool y_ok = true;
                    for (int w : inst.logic_partners(y))
                        if (w != x && sol.route_of(w) == ra) {
                            y_ok = false;
                            break;
                        }
                    if (!y_ok) continue;
                    const int a = s[pa - 1], b = s[pa + 1], c = t[pb - 1], e = t[pb + 1];
                    if (!cx.usable(a, y) || !cx.usable(y, b) || !cx.usable(c, x) || !cx.usable(x, e)) continue;
                    const double da = cx.t(a, y) + cx.t(y, b) + inst.service(y) - cx.t(a, x) - cx.t(x, b) - inst.service(x);
                    const double db = cx.t(c, x) + cx.t(x, e) + inst.service(x) - cx.t(c, y) - cx.t(y, e) - inst.service(y);
                    const double d = da + db;
                    if (!(d < -kImproveEps)) continue;
                    const double na = sol.route(ra).cost + da, nb = sol.route(rb).cost + db;
                    if (!cx.in_budget(na) || !cx.in_budget(nb)) continue;
                    Key k{d, ra, pa, rb, pb};
                    if (!detail::key_less(k, best_key)) continue;
                    best_key = k;
                    best = Move{MoveKind::SwapNodesRoutes, ra, pa, rb, pb, x, y, d, 0.0, na, nb};
                }
            }
        }
    }
    return best;
}

// Cost-reducing removal with the smallest profit loss (ties: larger saving).
inline std::optional<Move> explore_extract_node(const Solution& sol, const Instance& inst, const ExploreOptions& opt) {
    detail::MoveCtx cx{sol, inst, opt};
    using Key = std::tuple<double, double, int, int>;
    std::optional<Key> best_key;
    std::optional<Move> best;
    for (int r = 0; r < sol.route_count(); ++r) {
        const auto& s = sol.route(r).seq;
        for (int p = 1; p + 1 < static_cast<int>(s.size()); ++p) {
            const int v = s[p];
            if (inst.is_mandatory(v) || cx.tabu_in(v)) continue;
            const int a = s[p - 1], b = s[p + 1];
            if (!cx.usable(a, b)) continue;
            const double d = cx.t(a, b) - cx.t(a, v) - cx.t(v, b) - inst.service(v);
            if (!(d < -kImproveEps)) continue;
            Key k{inst.profit(v), d, r, p};
            if (!detail::key_less(k, best_key)) continue;
            best_key = k;
            best = Move{MoveKind::ExtractNode, r, p, -1, -1, v, -1, d, -inst.profit(v), sol.route(r).cost + d, 0.0};
        }
    }
    return best;
}

namespace detail {
// Cost change of exchanging positions i < j inside s, or nullopt if a forbidden arc appears.
inline std::optional<double> exchange_delta(const std::vector<int>& s, int i, int j, const Instance& inst) {
    const int x = s[i], y = s[j];
    if (j == i + 1) {
        const int a = s[i - 1], b = s[j + 1];
        if (!inst.arc_usable(a, y) || !inst.arc_usable(y, x) || !inst.arc_usable(x, b)) return std::nullopt;
        return inst.travel(a, y) + inst.travel(y, x) + inst.travel(x, b) - inst.travel(a, x) - inst.travel(x, y) -
               inst.travel(y, b);
    }
    const int a = s[i - 1], b = s[i + 1], c = s[j - 1], e = s[j + 1];
    if (!inst.arc_usable(a, y) || !inst.arc_usable(y, b) || !inst.arc_usable(c, x) || !inst.arc_usable(x, e))
        return std::nullopt;
    return inst.travel(a, y) + inst.travel(y, b) + inst.travel(c, x) + inst.travel(x, e) - inst.travel(a, x) -
           inst.travel(x, b) - inst.travel(c, y) - inst.travel(y, e);
}
}  // namespace detail

// Best exchange of two nodes of the same route; strictly cost-reducing.
inline std::optional<Move> explore_two_opt(const Solution& sol, const Instance& inst, const ExploreOptions& opt) {
    (void)opt;
    using Key = std::tuple<double, int, int, int>;
    std::optional<Key> best_key;
    std::optional<Move> best;
    for (int r = 0; r < sol.route_count(); ++r) {
        const auto& s = sol.route(r).seq;
        const int len = static_cast<int>(s.size());
        for (int i = 1; i + 1 < len; ++i)
            for (int j = i + 1; j + 1 < len; ++j) {
                auto d = detail::exchange_delta(s, i, j, inst);
                if (!d || !(*d < -kImproveEps)) continue;
                Key k{*d, r, i, j};
                if (!detail::key_less(k, best_key)) continue;
                best_key = k;
                best = Move{MoveKind::TwoOpt, r, i, r, j, s[i], s[j], *d, 0.0, sol.route(r).cost + *d, 0.0};
            }
    }
    return best;
}

inline std::optional<Move> explore(MoveKind kind, const Solution& sol, const Instance& inst, const ExploreOptions& opt) {
    switch (kind) {
        case MoveKind::InsertNode: return explore_insert_node(sol, inst, opt);
        case MoveKind::SwapNodes: return explore_swap_nodes(sol, inst, opt);
        case MoveKind::MoveNode: return explore_move_node(sol, inst, opt);
        case MoveKind::MoveNodeRoutes: return explore_move_node_routes(sol, inst, opt);
        case MoveKind::SwapNodesRoutes: return explore_swap_nodes_routes(sol, inst, opt);
        case MoveKind::ExtractNode: return explore_extract_node(sol, inst, opt);
        case MoveKind::TwoOpt: return explore_two_opt(sol, inst, opt);
    }
    return std::nullopt;
}

namespace detail {
inline void expect_at(const Solution& sol, int r, int p, int node) {
    if (r < 0 || r >= sol.route_count()) throw StaleMoveError("stale move: route index out of range");
    const auto& s = sol.route(r).seq;
    if (p < 1 || p + 1 >= static_cast<int>(s.size()) || s[p] != node)
        throw StaleMoveError("stale move: node " + std::to_string(node) + " no longer at route " + std::to_string(r) +
                             " position " + std::to_string(p));
}
inline void expect_unassigned(const Solution& sol, int node) {
    if (sol.visits(node)) throw StaleMoveError("stale move: node " + std::to_string(node) + " is already visited");
}
}  // namespace detail

// Applies a move generated against the current state of `sol`; updates the
// tabu lists (inserted -> L1, removed -> L2) and their capacity when given.
inline void apply_move(Solution& sol, const Move& mv, const Instance& inst, TabuLists* tabu = nullptr) {
    switch (mv.kind) {
        case MoveKind::InsertNode: {
            detail::expect_unassigned(sol, mv.node_a);
            if (mv.route_a < 0 || mv.route_a >= sol.route_count() || mv.pos_a < 1 ||
                mv.pos_a >= static_cast<int>(sol.route(mv.route_a).seq.size()))
                throw StaleMoveError("stale move: insertion position out of range");
            sol.insert_node(mv.route_a, mv.pos_a, mv.node_a, inst);
            if (tabu) tabu->push_inside(mv.node_a);
            break;
        }
        case MoveKind::SwapNodes: {
            detail::expect_at(sol, mv.route_a, mv.pos_a, mv.node_a);
            detail::expect_unassigned(sol, mv.node_b);
            auto s = sol.route(mv.route_a).seq;
            s[mv.pos_a] = mv.node_b;
            sol.set_route(mv.route_a, std::move(s), inst);
            if (tabu) {
                tabu->push_inside(mv.node_b);
                tabu->push_outside(mv.node_a);
            }
            break;
        }
        case MoveKind::MoveNode: {
            detail::expect_at(sol, mv.route_a, mv.pos_a, mv.node_a);
            auto s = sol.route(mv.route_a).seq;
            s.erase(s.begin() + mv.pos_a);
            s.insert(s.begin() + mv.pos_b, mv.node_a);
            sol.set_route(mv.route_a, std::move(s), inst);
            break;
        }
        case MoveKind::MoveNodeRoutes: {
            detail::expect_at(sol, mv.route_a, mv.pos_a, mv.node_a);
            if (mv.route_b < 0 || mv.route_b >= sol.route_count() || mv.pos_b < 1 ||
                mv.pos_b >= static_cast<int>(sol.route(mv.route_b).seq.size()))
                throw StaleMoveError("stale move: target position out of range");
            sol.erase_at(mv.route_a, mv.pos_a, inst);
            sol.insert_node(mv.route_b, mv.pos_b, mv.node_a, inst);
            break;
        }
        case MoveKind::SwapNodesRoutes: {
            detail::expect_at(sol, mv.route_a, mv.pos_a, mv.node_a);
            detail::expect_at(sol, mv.route_b, mv.pos_b, mv.node_b);
            auto sa = sol.route(mv.route_a).seq;
            auto sb = sol.route(mv.route_b).seq;
            sa[mv.pos_a] = mv.node_b;
            sb[mv.pos_b] = mv.node_a;
            sol.set_route(mv.route_a, std::move(sa), inst);
            sol.set_route(mv.route_b, std::move(sb), inst);
            break;
        }
        case MoveKind::ExtractNode: {
            detail::expect_at(sol, mv.route_a, mv.pos_a, mv.node_a);
            sol.erase_at(mv.route_a, mv.pos_a, inst);
            if (tabu) tabu->push_outside(mv.node_a);
            break;
        }
        case MoveKind::TwoOpt: {
            detail::expect_at(sol, mv.route_a, mv.pos_a, mv.node_a);
            detail::expect_at(sol, mv.route_a, mv.pos_b, mv.node_b);
            auto s = sol.route(mv.route_a).seq;
            std::swap(s[mv.pos_a], s[mv.pos_b]);
            sol.set_route(mv.route_a, std::move(s), inst);
            break;
        }
    }
    if (tabu) tabu->resize_for(sol.visited_count());
}

// Inverse of apply_move (tabu lists are left untouched).
inline void undo_move(Solution& sol, const Move& mv, const Instance& inst) {
    switch (mv.kind) {
        case MoveKind::InsertNode:
            detail::expect_at(sol, mv.route_a, mv.pos_a, mv.node_a);
            sol.erase_at(mv.route_a, mv.pos_a, inst);
            break;
        case MoveKind::SwapNodes: {
            detail::expect_at(sol, mv.route_a, mv.pos_a, mv.node_b);
            auto s = sol.route(mv.route_a).seq;
            s[mv.pos_a] = mv.node_a;
            sol.set_route(mv.route_a, std::move(s), inst);
            break;
        }
        case MoveKind::MoveNode: {
            detail::expect_at(sol, mv.route_a, mv.pos_b, mv.node_a);
            auto s = sol.route(mv.route_a).seq;
            s.erase(s.begin() + mv.pos_b);
            s.insert(s.begin() + mv.pos_a, mv.node_a);
            sol.set_route(mv.route_a, std::move(s), inst);
            break;
        }
        case MoveKind::MoveNodeRoutes:
            detail::expect_at(sol, mv.route_b, mv.pos_b, mv.node_a);
            sol.erase_at(mv.route_b, mv.pos_b, inst);
            sol.insert_node(mv.route_a, mv.pos_a, mv.node_a, inst);
            break;
        case MoveKind::SwapNodesRoutes: {
            detail::expect_at(sol, mv.route_a, mv.pos_a, mv.node_b);
            detail::expect_at(sol, mv.route_b, mv.pos_b, mv.node_a);
            auto sa = sol.route(mv.route_a).seq;
            auto sb = sol.route(mv.route_b).seq;
            sa[mv.pos_a] = mv.node_a;
            sb[mv.pos_b] = mv.node_b;
            sol.set_route(mv.route_a, std::move(sa), inst);
            sol.set_route(mv.route_b, std::move(sb), inst);
            break;
        }
        case MoveKind::ExtractNode:
            detail::expect_unassigned(sol, mv.node_a);
            sol.insert_node(mv.route_a, mv.pos_a, mv.node_a, inst);
            break;
        case MoveKind::TwoOpt: {
            detail::expect_at(sol, mv.route_a, mv.pos_a, mv.node_b);
            detail::expect_at(sol, mv.route_a, mv.pos_b, mv.node_a);
            auto s = sol.route(mv.route_a).seq;
            std::swap(s[mv.pos_a], s[mv.pos_b]);
            sol.set_route(mv.route_a, std::move(s), inst);
            break;
        }
    }
}

}  // namespace topstmin
