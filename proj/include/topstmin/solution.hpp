#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "instance.hpp"

namespace topstmin {

// A source-to-destination node sequence with cached cost and profit.
struct Route {
    std::vector<int> seq;
    double cost = 0.0;
    double profit = 0.0;

    int interior_size() const { return static_cast<int>(seq.size()) - 2; }
    bool empty() const { return seq.size() <= 2; }
};

// Travel of consecutive arcs plus service of interior nodes.
inline double route_cost(const std::vector<int>& seq, const Instance& inst) {
    if (seq.size() < 2) throw std::invalid_argument("route needs at least source and destination");
    double c = 0.0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const int v = seq[i];
        if (v < 1 || v > inst.n()) throw std::out_of_range("route node " + std::to_string(v) + " out of range");
        if (i > 0) c += inst.travel(seq[i - 1], v);
        if (i > 0 && i + 1 < seq.size()) c += inst.service(v);
    }
    return c;
}

inline double route_cost(const Route& r, const Instance& inst) { return route_cost(r.seq, inst); }

inline double route_profit(const std::vector<int>& seq, const Instance& inst) {
    double p = 0.0;
    for (std::size_t i = 1; i + 1 < seq.size(); ++i) p += inst.profit(seq[i]);
    return p;
}

inline Route make_route(std::vector<int> seq, const Instance& inst) {
    Route r;
    r.cost = route_cost(seq, inst);
    r.profit = route_profit(seq, inst);
    r.seq = std::move(seq);
    return r;
}

// m routes plus a customer -> (route, position) index.
class Solution {
public:
    Solution() = default;

    // m empty routes [1, n].
    explicit Solution(const Instance& inst) : routes_(inst.m()), route_of_(inst.n() + 1, -1), pos_of_(inst.n() + 1, -1) {
        for (auto& r : routes_) {
            r.seq = {inst.source(), inst.sink()};
            r.cost = inst.travel(inst.source(), inst.sink());
            r.profit = 0.0;
        }
    }

    // Builds from explicit sequences; throws on structural problems.
    static Solution from_sequences(const std::vector<std::vector<int>>& seqs, const Instance& inst) {
        if (static_cast<int>(seqs.size()) != inst.m())
            throw std::invalid_argument("solution needs exactly m=" + std::to_string(inst.m()) + " routes");
        Solution s(inst);
        for (std::size_t r = 0; r < seqs.size(); ++r) {
            const auto& q = seqs[r];
            if (q.size() < 2 || q.front() != inst.source() || q.back() != inst.sink())
                throw std::invalid_argument("route must start at the source and end at the destination");
            for (std::size_t i = 1; i + 1 < q.size(); ++i) {
                if (!inst.is_customer(q[i])) throw std::invalid_argument("route interior must contain customers only");
                if (s.route_of_[q[i]] >= 0) throw std::invalid_argument("customer " + std::to_string(q[i]) + " visited twice");
                s.route_of_[q[i]] = static_cast<int>(r);
            }
            s.routes_[r] = make_route(q, inst);
            s.reindex(static_cast<int>(r));
        }
        return s;
    }

    int route_count() const { return static_cast<int>(routes_.size()); }
    const std::vector<Route>& routes() const { return routes_; }
    const Route& route(int r) const { return routes_[r]; }

    // -1 when the customer is not visited.
    int route_of(int k) const { return route_of_[k]; }
    int position_of(int k) const { return pos_of_[k]; }
    bool visits(int k) const { return route_of_[k] >= 0; }

    double profit() const {
        double p = 0.0;
        for (const auto& r : routes_) p += r.profit;
        return p;
    }
    double total_cost() const {
        double c = 0.0;
        for (const auto& r : routes_) c += r.cost;
        return c;
    }
    int visited_count() const {
        int c = 0;
        for (const auto& r : routes_) c += r.interior_size();
        return c;
    }

    // Replaces the node sequence of one route and refreshes caches and index.
    void set_route(int r, std::vector<int> seq, const Instance& inst) {
        // nodes already re-homed by an earlier update of another route keep their index
        for (std::size_t i = 1; i + 1 < routes_[r].seq.size(); ++i) {
            const int k = routes_[r].seq[i];
            if (route_of_[k] != r) continue;
            route_of_[k] = -1;
            pos_of_[k] = -1;
        }
        routes_[r] = make_route(std::move(seq), inst);
        for (std::size_t i = 1; i + 1 < routes_[r].seq.size(); ++i) route_of_[routes_[r].seq[i]] = r;
        reindex(r);
    }

    void insert_node(int r, int pos, int k, const Instance& inst) {
        auto seq = routes_[r].seq;
        seq.insert(seq.begin() + pos, k);
        set_route(r, std::move(seq), inst);
    }

    void erase_at(int r, int pos, const Instance& inst) {
        auto seq = routes_[r].seq;
        seq.erase(seq.begin() + pos);
        set_route(r, std::move(seq), inst);
    }

    friend bool operator==(const Solution& a, const Solution& b) {
        if (a.routes_.size() != b.routes_.size()) return false;
        for (std::size_t r = 0; r < a.routes_.size(); ++r)
            if (a.routes_[r].seq != b.routes_[r].seq || a.routes_[r].cost != b.routes_[r].cost ||
                a.routes_[r].profit != b.routes_[r].profit)
                return false;
        return true;
    }

private:
    void reindex(int r) {
        const auto& q = routes_[r].seq;
        for (std::size_t i = 1; i + 1 < q.size(); ++i) pos_of_[q[i]] = static_cast<int>(i);
    }

    std::vector<Route> routes_;
    std::vector<int> route_of_;
    std::vector<int> pos_of_;
};

struct FeasibilityReport {
    bool budget_ok = true;
    bool mandatory_ok = true;
    bool phys_ok = true;
    bool logic_ok = true;
    double time_violation = 0.0;
    std::vector<int> over_budget_routes;
    std::vector<int> missing_mandatory;
    std::vector<Arc> forbidden_arcs_used;
    std::vector<Arc> logic_conflicts;

    bool feasible() const { return budget_ok && mandatory_ok && phys_ok && logic_ok; }
};

inline double time_violation(const Solution& sol, const Instance& inst) {
    double v = 0.0;
    for (const auto& r : sol.routes()) v += std::max(r.cost - inst.t_max(), 0.0);
    return v;
}

inline double profit(const Solution& sol) { return sol.profit(); }

inline bool route_within_budget(double cost, const Instance& inst) { return cost <= inst.t_max() + kTimeEps; }

// Budget on every route; mandatory coverage, forbidden arcs and logical pairs
// are checked only when the variant activates them.
inline FeasibilityReport check_feasibility(const Solution& sol, const Instance& inst) {
    FeasibilityReport rep;
    for (int r = 0; r < sol.route_count(); ++r) {
        const auto& route = sol.route(r);
        const double excess = route.cost - inst.t_max();
        if (excess > 0) rep.time_violation += excess;
        if (!route_within_budget(route.cost, inst)) rep.over_budget_routes.push_back(r);
        const auto& q = route.seq;
        for (std::size_t i = 1; i < q.size(); ++i)
            if (inst.arc_blocked(q[i - 1], q[i])) rep.forbidden_arcs_used.emplace_back(q[i - 1], q[i]);
        for (std::size_t i = 1; i + 1 < q.size(); ++i)
            for (std::size_t j = i + 1; j + 1 < q.size(); ++j)
                if (inst.conflicting(q[i], q[j])) rep.logic_conflicts.emplace_back(q[i], q[j]);
    }
    for (int k : inst.active_mandatory())
        if (!sol.visits(k)) rep.missing_mandatory.push_back(k);
    rep.budget_ok = rep.over_budget_routes.empty();
    rep.mandatory_ok = rep.missing_mandatory.empty();
    rep.phys_ok = rep.forbidden_arcs_used.empty();
    rep.logic_ok = rep.logic_conflicts.empty();
    return rep;
}

inline bool is_feasible(const Solution& sol, const Instance& inst) { return check_feasibility(sol, inst).feasible(); }

// A single route respects budget, forbidden arcs and logical pairs.
inline bool route_feasible(const Route& route, const Instance& inst) {
    if (!route_within_budget(route.cost, inst)) return false;
    const auto& q = route.seq;
    for (std::size_t i = 1; i < q.size(); ++i)
        if (inst.arc_blocked(q[i - 1], q[i])) return false;
    for (std::size_t i = 1; i + 1 < q.size(); ++i)
        for (std::size_t j = i + 1; j + 1 < q.size(); ++j)
            if (inst.conflicting(q[i], q[j])) return false;
    return true;
}

namespace detail {
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

inline constexpr std::uint64_t kEmptyRouteSignature = detail::splitmix64(0x70737421ULL);

// Order-insensitive signature of the visited customer set.
inline std::uint64_t customer_set_signature(std::vector<int> customers) {
    std::sort(customers.begin(), customers.end());
    std::uint64_t h = kEmptyRouteSignature;
    for (int k : customers) h = detail::splitmix64(h ^ static_cast<std::uint64_t>(k));
    return h;
}

inline std::uint64_t route_signature(const Route& route) {
    if (route.seq.size() <= 2) return kEmptyRouteSignature;
    return customer_set_signature(std::vector<int>(route.seq.begin() + 1, route.seq.end() - 1));
}

// ROUTE r: 1 i j ... n cost=<c>  /  PROFIT <p> VIOLATION <v> FEASIBLE <0|1>
inline void write_solution(std::ostream& out, const Solution& sol, const Instance& inst) {
    for (int r = 0; r < sol.route_count(); ++r) {
        out << "ROUTE " << r + 1 << ":";
        for (int v : sol.route(r).seq) out << ' ' << v;
        out << " cost=" << detail::fmt_double(sol.route(r).cost) << '\n';
    }
    const auto rep = check_feasibility(sol, inst);
    out << "PROFIT " << detail::fmt_double(sol.profit()) << " VIOLATION " << detail::fmt_double(rep.time_violation)
        << " FEASIBLE " << (rep.feasible() ? 1 : 0) << '\n';
}

inline std::string to_solution_text(const Solution& sol, const Instance& inst) {
    std::ostringstream out;
    write_solution(out, sol, inst);
    return out.str();
}

// Reads ROUTE lines back; the summary line is ignored (it is recomputed).
inline Solution parse_solution(std::istream& in, const Instance& inst) {
    std::string line;
    int line_no = 0;
    std::vector<std::vector<int>> seqs;
    while (std::getline(in, line)) {
        ++line_no;
        auto tok = detail::split_ws(line);
        if (tok.empty() || tok[0] != "ROUTE") continue;
        std::vector<int> seq;
        for (std::size_t i = 2; i < tok.size(); ++i) {
            if (tok[i].substr(0, 5) == "cost=") break;
            seq.push_back(static_cast<int>(detail::to_int(tok[i], line_no)));
        }
        seqs.push_back(std::move(seq));
    }
    return Solution::from_sequences(seqs, inst);
}

inline Solution parse_solution(std::string_view text, const Instance& inst) {
    std::istringstream in{std::string(text)};
    return parse_solution(in, inst);
}

}  // namespace topstmin
