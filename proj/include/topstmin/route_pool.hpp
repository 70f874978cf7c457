#pragma once

#include <algorithm>
#include <cstdint>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "solution.hpp"

namespace topstmin {

// Deduplicated store of individually feasible routes keyed by the signature of
// their visited-customer set. Safe for concurrent insert-if-absent.
class RoutePool {
public:
    struct Entry {
        std::uint64_t signature = 0;
        Route route;
    };

    explicit RoutePool(std::size_t cap = 200000) : cap_(cap) {}

    RoutePool(const RoutePool&) = delete;
    RoutePool& operator=(const RoutePool&) = delete;

    // Stores the route if its customer set is new and the pool has room. For an
    // already known set the cheaper route is kept (ties by sequence). Returns true when a new set
    // was added.
    bool offer(const Route& route) {
        if (route.empty()) return false;
        const auto sig = route_signature(route);
        std::lock_guard lock(mu_);
        auto it = map_.find(sig);
        if (it != map_.end()) {
            const auto& held = it->second;
            if (route.cost < held.cost || (route.cost == held.cost && route.seq < held.seq)) it->second = route;
            return false;
        }
        if (map_.size() >= cap_) return false;
        map_.emplace(sig, route);
        return true;
    }

    std::size_t size() const {
        std::lock_guard lock(mu_);
        return map_.size();
    }
    bool full() const {
        std::lock_guard lock(mu_);
        return map_.size() >= cap_;
    }
    std::size_t capacity() const { return cap_; }

    // Snapshot ordered by signature, so downstream models do not depend on
    // insertion timing.
    std::vector<Entry> snapshot() const {
        std::vector<Entry> out;
        {
            std::lock_guard lock(mu_);
            out.reserve(map_.size());
            for (const auto& [sig, r] : map_) out.push_back({sig, r});
        }
        std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) { return a.signature < b.signature; });
        return out;
    }

private:
    std::size_t cap_;
    mutable std::mutex mu_;
    std::unordered_map<std::uint64_t, Route> map_;
};

}  // namespace topstmin
