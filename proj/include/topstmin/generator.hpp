#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "instance.hpp"

namespace topstmin {

enum class MandatoryMode { Clustered, Scattered };    // CM / SM
enum class PhysMode { ClustersBased, DegreeBased };   // CPI / DPI
enum class LogicMode { Farthest, Nearest };           // FLI / NLI

struct GenConfig {
    MandatoryMode mandatory_mode = MandatoryMode::Clustered;
    PhysMode phys_mode = PhysMode::ClustersBased;
    std::optional<LogicMode> logic_mode;  // present iff generating a PL instance
    double mandatory_fraction = 0.05;
    double edge_removal_fraction = 0.20;
    double logic_fraction = 0.05;
    std::uint64_t rng_seed = 1;
};

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline const char* acronym(MandatoryMode m) { return m == MandatoryMode::Clustered ? "CM" : "SM"; }
inline const char* acronym(PhysMode p) { return p == PhysMode::ClustersBased ? "CPI" : "DPI"; }
inline const char* acronym(LogicMode l) { return l == LogicMode::Farthest ? "FLI" : "NLI"; }

// Quota ceil(fraction * count); the epsilon keeps 0.05*20 from rounding up to 2.
inline int feature_quota(double fraction, int count) {
    if (fraction <= 0.0 || count <= 0) return 0;
    return std::min(count, static_cast<int>(std::ceil(fraction * count - 1e-9)));
}

// Number of ordered pairs in C produced for the given customer count: every
// customer gets `quota` partners, one gets quota+1 when the total degree is odd.
inline int logic_pair_quota(double fraction, int customers) {
    const int q = feature_quota(fraction, customers);
    const long long deg = static_cast<long long>(q) * customers;
    return static_cast<int>((deg + 1) / 2);  // unordered pairs
}

namespace detail {

// Portable bounded draw; std distributions differ between standard libraries.
inline std::size_t draw_below(std::mt19937_64& rng, std::size_t bound) {
    return static_cast<std::size_t>(rng() % bound);
}

template <typename T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[draw_below(rng, i)]);
}

inline std::vector<int> pick_clustered(const Instance& base, int quota, std::mt19937_64& rng) {
    std::vector<int> customers;
    for (int k = 2; k <= base.n() - 1; ++k) customers.push_back(k);
    const int seed = customers[draw_below(rng, customers.size())];
    std::stable_sort(customers.begin(), customers.end(), [&](int a, int b) {
        const double ta = a == seed ? -1.0 : base.travel(seed, a);
        const double tb = b == seed ? -1.0 : base.travel(seed, b);
        return ta < tb;
    });
    customers.resize(quota);
    std::sort(customers.begin(), customers.end());
    return customers;
}

// Greedy max-min dispersion.
inline std::vector<int> pick_scattered(const Instance& base, int quota, std::mt19937_64& rng) {
    const int n = base.n();
    std::vector<int> chosen;
    std::vector<double> dmin(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> taken(n + 1, 0);
    int next = 2 + static_cast<int>(draw_below(rng, n - 2));
    while (static_cast<int>(chosen.size()) < quota) {
        chosen.push_back(next);
        taken[next] = 1;
        for (int k = 2; k <= n - 1; ++k) dmin[k] = std::min(dmin[k], std::min(base.travel(next, k), base.travel(k, next)));
        int best = -1;
        for (int k = 2; k <= n - 1; ++k)
            if (!taken[k] && (best < 0 || dmin[k] > dmin[best])) best = k;
        if (best < 0) break;
        next = best;
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

// Lloyd iterations with seeded initial centres; returns a cluster label per node.
inline std::vector<int> kmeans_labels(const Instance& base, int k, std::mt19937_64& rng) {
    const int n = base.n();
    std::vector<int> customers;
    for (int c = 2; c <= n - 1; ++c) customers.push_back(c);
    seeded_shuffle(customers, rng);
    std::vector<Point> centres;
    for (int i = 0; i < k; ++i) centres.push_back(base.coord(customers[i]));
    std::vector<int> label(n + 1, -1);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (int c = 2; c <= n - 1; ++c) {
            int best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (int i = 0; i < k; ++i) {
                const double dx = base.coord(c).x - centres[i].x, dy = base.coord(c).y - centres[i].y;
                const double dd = dx * dx + dy * dy;
                if (dd < bd) {
                    bd = dd;
                    best = i;
                }
            }
            if (label[c] != best) {
                label[c] = best;
                changed = true;
            }
        }
        if (!changed) break;
        std::vector<Point> sum(k);
        std::vector<int> cnt(k, 0);
        for (int c = 2; c <= n - 1; ++c) {
            sum[label[c]].x += base.coord(c).x;
            sum[label[c]].y += base.coord(c).y;
            ++cnt[label[c]];
        }
        for (int i = 0; i < k; ++i)
            if (cnt[i] > 0) centres[i] = {sum[i].x / cnt[i], sum[i].y / cnt[i]};
    }
    return label;
}

struct ArcRemover {
    const Instance& base;
    std::vector<int> out_deg, in_deg;  // residual degrees in the traversable set
    std::vector<char> removed;
    std::vector<char> mandatory;
    std::vector<Arc> result;

    ArcRemover(const Instance& b, const std::vector<int>& mand)
        : base(b), out_deg(b.n() + 1, 0), in_deg(b.n() + 1, 0),
          removed(static_cast<std::size_t>(b.n() + 1) * (b.n() + 1), 0), mandatory(b.n() + 1, 0) {
        for (int k : mand) mandatory[k] = 1;
        for (int i = 1; i <= b.n(); ++i)
            for (int j = 1; j <= b.n(); ++j)
                if (b.traversable(i, j)) {
                    ++out_deg[i];
                    ++in_deg[j];
                }
    }
    bool is_removed(int i, int j) const { return removed[static_cast<std::size_t>(i) * (base.n() + 1) + j] != 0; }
    // Removes (i,j) unless that would leave a mandatory node without in- or out-arcs.
    bool try_remove(int i, int j) {
        if (is_removed(i, j)) return false;
        if (mandatory[i] && out_deg[i] <= 1) return false;
        if (mandatory[j] && in_deg[j] <= 1) return false;
        removed[static_cast<std::size_t>(i) * (base.n() + 1) + j] = 1;
        --out_deg[i];
        --in_deg[j];
        result.emplace_back(i, j);
        return true;
    }
};

inline std::vector<Arc> remove_cluster_based(const Instance& base, const std::vector<int>& mand, int quota,
                                             std::mt19937_64& rng) {
    const int n = base.n();
    const int k = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n - 2)))));
    const auto label = kmeans_labels(base, std::min(k, n - 2), rng);
    std::vector<Arc> crossing, inner;
    for (int i = 2; i <= n - 1; ++i)
        for (int j = 2; j <= n - 1; ++j) {
            if (i == j) continue;
            (label[i] != label[j] ? crossing : inner).emplace_back(i, j);
        }
    seeded_shuffle(crossing, rng);
    // Quota overflow falls back to the longest intra-cluster arcs.
    std::stable_sort(inner.begin(), inner.end(),
                     [&](const Arc& a, const Arc& b) { return base.travel(a.first, a.second) > base.travel(b.first, b.second); });
    ArcRemover rm(base, mand);
    for (const auto* list : {&crossing, &inner})
        for (auto [i, j] : *list) {
            if (static_cast<int>(rm.result.size()) >= quota) break;
            rm.try_remove(i, j);
        }
    if (static_cast<int>(rm.result.size()) < quota)
        throw GenerationError("physical-incompatibility quota unreachable without isolating a mandatory node; try another seed");
    return rm.result;
}

inline std::vector<Arc> remove_degree_based(const Instance& base, const std::vector<int>& mand, int quota,
                                            std::mt19937_64& rng) {
    const int n = base.n();
    ArcRemover rm(base, mand);
    // Customer-to-customer residual degrees drive the choice.
    std::vector<int> cout(n + 1, 0), cin(n + 1, 0);
    for (int i = 2; i <= n - 1; ++i) {
        cout[i] = n - 3;
        cin[i] = n - 3;
    }
    std::vector<char> blocked(n + 1, 0);  // tails whose every remaining arc is guarded
    while (static_cast<int>(rm.result.size()) < quota) {
        int top = -1;
        for (int i = 2; i <= n - 1; ++i)
            if (!blocked[i] && (top < 0 || cout[i] > cout[top])) top = i;
        if (top < 0 || cout[top] == 0)
            throw GenerationError("physical-incompatibility quota unreachable without isolating a mandatory node; try another seed");
        std::vector<int> tails;
        for (int i = 2; i <= n - 1; ++i)
            if (!blocked[i] && cout[i] == cout[top]) tails.push_back(i);
        const int i = tails[draw_below(rng, tails.size())];
        std::vector<int> heads;
        int best_in = -1;
        for (int j = 2; j <= n - 1; ++j) {
            if (j == i || rm.is_removed(i, j)) continue;
            if (cin[j] > best_in) {
                best_in = cin[j];
                heads.clear();
            }
            if (cin[j] == best_in) heads.push_back(j);
        }
        bool done = false;
        seeded_shuffle(heads, rng);
        for (int j : heads)
            if (rm.try_remove(i, j)) {
                --cout[i];
                --cin[j];
                done = true;
                break;
            }
        if (!done) blocked[i] = 1;
    }
    return rm.result;
}

// Near-regular pairing: every customer gets q partners (one gets q+1 on odd
// total degree), preferring far (or near) pairs first.
inline std::vector<Arc> pair_logical(const Instance& base, LogicMode mode, int q) {
    const int n = base.n();
    const int c = n - 2;
    if (q <= 0 || c < 2) return {};
    if (q > c - 1) throw GenerationError("logical-incompatibility quota exceeds available partners");
    auto dist = [&](int a, int b) { return std::min(base.travel(a, b), base.travel(b, a)); };
    std::vector<Arc> cand;
    for (int a = 2; a <= n - 1; ++a)
        for (int b = a + 1; b <= n - 1; ++b) cand.emplace_back(a, b);
    std::stable_sort(cand.begin(), cand.end(), [&](const Arc& x, const Arc& y) {
        const double dx = dist(x.first, x.second), dy = dist(y.first, y.second);
        return mode == LogicMode::Farthest ? dx > dy : dx < dy;
    });
    std::vector<int> deg(n + 1, 0);
    std::vector<char> adj(static_cast<std::size_t>(n + 1) * (n + 1), 0);
    auto at = [&](int a, int b) -> char& { return adj[static_cast<std::size_t>(a) * (n + 1) + b]; };
    std::vector<Arc> edges;
    auto add = [&](int a, int b) {
        at(a, b) = at(b, a) = 1;
        ++deg[a];
        ++deg[b];
        edges.emplace_back(std::min(a, b), std::max(a, b));
    };
    auto drop = [&](std::size_t e) {
        auto [a, b] = edges[e];
        at(a, b) = at(b, a) = 0;
        --deg[a];
        --deg[b];
        edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(e));
    };
    for (auto [a, b] : cand)
        if (deg[a] < q && deg[b] < q) add(a, b);

    const long long target_edges = (static_cast<long long>(q) * c + 1) / 2;
    // Repair leftover deficits by edge switching.
    for (int guard = 0; static_cast<long long>(edges.size()) < target_edges && guard < 10 * c * q; ++guard) {
        std::vector<int> deficit;
        for (int k = 2; k <= n - 1; ++k)
            for (int r = deg[k]; r < q; ++r) deficit.push_back(k);
        if (deficit.empty()) break;
        const int u = deficit.front();
        if (deficit.size() == 1) {
            // odd total degree: some saturated customer takes one extra partner
            bool added = false;
            for (int a = 2; a <= n - 1 && !added; ++a)
                if (a != u && !at(u, a)) {
                    add(u, a);
                    added = true;
                }
            if (!added) break;
            continue;
        }
        const int w = deficit[1];
        if (w != u && !at(u, w)) {
            add(u, w);
            continue;
        }
        // u and w coincide or are already adjacent: rewire through an edge (a,b)
        bool fixed = false;
        for (std::size_t e = 0; e < edges.size() && !fixed; ++e) {
            auto [a, b] = edges[e];
            if (a == u || b == u || a == w || b == w) continue;
            if (!at(u, a) && !at(w, b)) {
                drop(e);
                add(u, a);
                add(w, b);
                fixed = true;
            } else if (!at(u, b) && !at(w, a)) {
                drop(e);
                add(u, b);
                add(w, a);
                fixed = true;
            }
        }
        if (!fixed) break;
    }
    if (static_cast<long long>(edges.size()) != target_edges)
        throw GenerationError("logical-incompatibility quota unreachable; try another fraction");
    std::sort(edges.begin(), edges.end());
    return edges;
}

}  // namespace detail

// Adds mandatory nodes, physical and (optionally) logical incompatibilities to
// a geometric base instance. Pure function of (base, cfg).
inline Instance generate_features(const Instance& base, const GenConfig& cfg) {
    if (!base.has_coords()) throw GenerationError("feature generation needs a geometric base instance");
    for (double f : {cfg.mandatory_fraction, cfg.edge_removal_fraction, cfg.logic_fraction})
        if (!(f >= 0.0 && f <= 1.0)) throw GenerationError("fractions must lie in [0,1]");
    const int n = base.n();
    const int customers = n - 2;
    if (customers < 1) throw GenerationError("base instance has no customers");

    std::mt19937_64 rng(cfg.rng_seed);
    InstanceData d = base.data();
    d.mandatory.clear();
    d.phys.clear();
    d.logic.clear();
    d.variant = cfg.logic_mode ? Variant::PL : Variant::P;

    const int m_quota = feature_quota(cfg.mandatory_fraction, customers);
    if (m_quota > 0)
        d.mandatory = cfg.mandatory_mode == MandatoryMode::Clustered ? detail::pick_clustered(base, m_quota, rng)
                                                                     : detail::pick_scattered(base, m_quota, rng);

    const int i_quota = feature_quota(cfg.edge_removal_fraction, customers * (customers - 1));
    if (i_quota > 0)
        d.phys = cfg.phys_mode == PhysMode::ClustersBased
                     ? detail::remove_cluster_based(base, d.mandatory, i_quota, rng)
                     : detail::remove_degree_based(base, d.mandatory, i_quota, rng);
    std::sort(d.phys.begin(), d.phys.end());

    if (cfg.logic_mode) d.logic = detail::pair_logical(base, *cfg.logic_mode, feature_quota(cfg.logic_fraction, customers));
    return Instance(std::move(d));
}

// "CM-CPI-FLI" style label used in reports.
inline std::string feature_label(const GenConfig& cfg) {
    std::string s = std::string(acronym(cfg.mandatory_mode)) + "-" + acronym(cfg.phys_mode);
    if (cfg.logic_mode) s += std::string("-") + acronym(*cfg.logic_mode);
    return s;
}

}  // namespace topstmin
