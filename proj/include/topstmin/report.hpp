#pragma once

#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "run.hpp"

namespace topstmin {

// Gaps of method A against reference B over one group of instances.
//   d_obj: mean of 100 (z_A - z_B) / z_B over instances both solved (z_B > 0)
//   d_cpu: mean of 100 (t_A - t_B) / t_B over instances both solved (t_B > 0)
//   d_sol: (#solved by A) - (#solved by B)
struct GapRow {
    std::string group;
    int instances = 0;    // in A or B
    int both_solved = 0;
    int obj_samples = 0;  // pairs entering d_obj
    double d_obj = 0.0;
    double d_cpu = 0.0;
    int d_sol = 0;
};

struct GapReport {
    GapRow overall;
    std::vector<GapRow> by_size;
    std::vector<GapRow> by_features;
};

namespace detail {

// Last record per instance id.
inline std::map<std::string, RunRecord> by_instance(const std::vector<RunRecord>& recs) {
    std::map<std::string, RunRecord> out;
    for (const auto& r : recs) out[r.instance] = r;
    return out;
}

inline GapRow gap_row(const std::string& group, const std::vector<std::string>& ids,
                      const std::map<std::string, RunRecord>& a, const std::map<std::string, RunRecord>& b,
                      double cpu_scale) {
    GapRow row;
    row.group = group;
    row.instances = static_cast<int>(ids.size());
    double obj_sum = 0.0, cpu_sum = 0.0;
    int cpu_samples = 0, solved_a = 0, solved_b = 0;
    for (const auto& id : ids) {
        const auto ia = a.find(id), ib = b.find(id);
        const bool sa = ia != a.end() && ia->second.feasible;
        const bool sb = ib != b.end() && ib->second.feasible;
        solved_a += sa;
        solved_b += sb;
        if (!sa || !sb) continue;
        ++row.both_solved;
        const double za = ia->second.profit, zb = ib->second.profit;
        if (zb > 0) {
            obj_sum += 100.0 * (za - zb) / zb;
            ++row.obj_samples;
        }
        const double ta = ia->second.cpu_seconds, tb = ib->second.cpu_seconds * cpu_scale;
        if (tb > 0) {
            cpu_sum += 100.0 * (ta - tb) / tb;
            ++cpu_samples;
        }
    }
    row.d_obj = row.obj_samples ? obj_sum / row.obj_samples : 0.0;
    row.d_cpu = cpu_samples ? cpu_sum / cpu_samples : 0.0;
    row.d_sol = solved_a - solved_b;
    return row;
}

}  // namespace detail

// `cpu_scale` multiplies the CPU times of B (frequency ratio between machines).
inline GapReport compute_gaps(const std::vector<RunRecord>& a_recs, const std::vector<RunRecord>& b_recs,
                              double cpu_scale = 1.0) {
    if (!(cpu_scale > 0)) throw std::invalid_argument("cpu scale must be positive");
    const auto a = detail::by_instance(a_recs), b = detail::by_instance(b_recs);
    std::vector<std::string> all;
    bool shared = false;
    for (const auto& [id, r] : a) {
        all.push_back(id);
        if (b.count(id)) shared = true;
    }
    for (const auto& [id, r] : b)
        if (!a.count(id)) all.push_back(id);
    if (!shared) throw std::invalid_argument("record sets share no instance");

    std::map<std::string, std::vector<std::string>> sizes, feats;
    for (const auto& id : all) {
        const auto& r = a.count(id) ? a.at(id) : b.at(id);
        sizes[to_string(size_class(r.n))].push_back(id);
        feats[r.features.empty() ? "-" : r.features].push_back(id);
    }
    GapReport rep;
    rep.overall = detail::gap_row("all", all, a, b, cpu_scale);
    for (const char* cls : {"small", "medium", "large", "other"})
        if (sizes.count(cls)) rep.by_size.push_back(detail::gap_row(cls, sizes[cls], a, b, cpu_scale));
    for (const auto& [f, ids] : feats) rep.by_features.push_back(detail::gap_row(f, ids, a, b, cpu_scale));
    return rep;
}

inline void write_report(std::ostream& out, const GapReport& rep) {
    auto line = [&](const GapRow& r) {
        out << std::left << std::setw(16) << r.group << std::right << std::setw(6) << r.instances << std::setw(6)
            << r.both_solved << std::fixed << std::setprecision(2) << std::setw(10) << r.d_obj << std::setw(10) << r.d_cpu
            << std::setw(7) << r.d_sol << '\n';
        out.unsetf(std::ios::fixed);
    };
    auto header = [&](const char* title) {
        out << title << '\n'
            << std::left << std::setw(16) << "group" << std::right << std::setw(6) << "inst" << std::setw(6) << "both"
            << std::setw(10) << "dOBJ%" << std::setw(10) << "dCPU%" << std::setw(7) << "dSOL" << '\n';
    };
    header("by size class");
    for (const auto& r : rep.by_size) line(r);
    out << '\n';
    header("by features");
    for (const auto& r : rep.by_features) line(r);
    out << '\n';
    header("overall");
    line(rep.overall);
}

}  // namespace topstmin
