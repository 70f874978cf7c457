#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "topstmin/topstmin.hpp"

namespace fixtures {

using topstmin::Instance;
using topstmin::InstanceData;
using topstmin::Variant;

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::filesystem::path data_path(const std::string& name) { return std::filesystem::path(TOPSTMIN_DATA_DIR) / name; }

// n=5, m=1, T_max=10, symmetric travel, unit service, profits 5/8/6, M={3}.
inline Instance t5(Variant variant = Variant::P) {
    InstanceData d;
    d.n = 5;
    d.m = 1;
    d.t_max = 10;
    d.variant = variant;
    d.profit = {0, 0, 5, 8, 6, 0};
    d.service = {0, 0, 1, 1, 1, 0};
    d.travel.assign(36, 0.0);
    auto set = [&](int i, int j, double t) { d.travel[i * 6 + j] = d.travel[j * 6 + i] = t; };
    set(1, 2, 2);
    set(1, 3, 3);
    set(1, 4, 4);
    set(1, 5, 0);
    set(2, 3, 2);
    set(2, 4, 3);
    set(3, 4, 2);
    set(2, 5, 2);
    set(3, 5, 3);
    set(4, 5, 4);
    if (variant != Variant::TOP) d.mandatory = {3};
    return Instance(std::move(d));
}

// Two routes; mandatory A, C, D; optional B; C conflicts with D and A; A can only
// be entered from B.
struct TwoRouteExample {
    static constexpr int A = 2, B = 3, C = 4, D = 5;
    Instance inst;
};

inline TwoRouteExample two_route_example() {
    InstanceData d;
    d.n = 6;
    d.m = 2;
    d.t_max = 100;
    d.variant = Variant::PL;
    d.coords = {{0, 0}, {0, 0}, {3, 3}, {2, 2}, {0, 2}, {1, 0}, {0, 0}};
    d.profit = {0, 0, 10, 4, 10, 10, 0};
    d.service = {0, 0, 1, 1, 1, 1, 0};
    d.travel = topstmin::euclidean_travel(d.coords);
    d.mandatory = {TwoRouteExample::A, TwoRouteExample::C, TwoRouteExample::D};
    d.phys = {{1, TwoRouteExample::A}, {TwoRouteExample::C, TwoRouteExample::A}, {TwoRouteExample::D, TwoRouteExample::A}};
    d.logic = {{TwoRouteExample::C, TwoRouteExample::D}, {TwoRouteExample::A, TwoRouteExample::C}};
    return {Instance(std::move(d))};
}

inline oracle::Seqs sequences(const topstmin::Solution& sol) {
    oracle::Seqs out;
    for (const auto& r : sol.routes()) out.push_back(r.seq);
    return out;
}

// Random routes whose every route fits the budget (arcs and pairs respected).
inline oracle::Seqs random_budget_routes(const Instance& inst, std::mt19937_64& rng) {
    double prob = 0.7;
    for (int attempt = 0;; ++attempt) {
        auto r = oracle::random_routes(inst, rng, prob);
        bool ok = true;
        for (const auto& s : r)
            if (oracle::naive_route_cost(inst.data(), s) > inst.t_max()) ok = false;
        if (ok) return r;
        if (attempt % 10 == 9) prob *= 0.7;
    }
}

// Random fully feasible solution (mandatory included); nullopt if none found.
inline std::optional<oracle::Seqs> random_feasible(const Instance& inst, std::mt19937_64& rng, int tries = 400) {
    for (int t = 0; t < tries; ++t) {
        auto r = random_budget_routes(inst, rng);
        if (oracle::naive_check(r, inst.data()).feasible()) return r;
    }
    return std::nullopt;
}

inline const char* variant_cycle(int i) {
    static const char* names[] = {"TOP", "P", "PL"};
    return names[i % 3];
}

inline Variant variant_of(int i) { return topstmin::parse_variant(variant_cycle(i)); }

// Small-budget parameters for runs on toy instances.
inline topstmin::CshParams tiny_csh() {
    topstmin::CshParams p;
    p.iterations = 10;
    p.vnd.max_nonimproving = 2000;
    p.vnd.sir_patience = 200;
    p.rp_time_limit_s = 30;
    p.milp_time_limit_s = 30;
    return p;
}

inline topstmin::VndParams tiny_vnd() {
    topstmin::VndParams p;
    p.max_nonimproving = 5000;
    p.sir_patience = 300;
    return p;
}

}  // namespace fixtures
