#pragma once

#include <cctype>
#include <chrono>
#include <cmath>
#include <istream>
#include <cstdint>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "csh.hpp"
#include "instance.hpp"
#include "mnaa.hpp"
#include "solution.hpp"
#include "vnd.hpp"

namespace topstmin {

enum class Algo { Mnaa, Vnd, CshSt, CshMt };

inline const char* to_string(Algo a) {
    switch (a) {
        case Algo::Mnaa: return "MNAA";
        case Algo::Vnd: return "VND";
        case Algo::CshSt: return "CSH-st";
        case Algo::CshMt: return "CSH-mt";
    }
    return "?";
}

inline Algo parse_algo(std::string_view s) {
    std::string low(s);
    for (auto& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (low == "mnaa") return Algo::Mnaa;
    if (low == "vnd") return Algo::Vnd;
    if (low == "csh-st") return Algo::CshSt;
    if (low == "csh-mt") return Algo::CshMt;
    throw std::invalid_argument("unknown algorithm '" + std::string(s) + "' (expected mnaa, vnd, csh-st or csh-mt)");
}

enum class SizeClass { Small, Medium, Large, Other };

inline SizeClass size_class(int n) {
    if (n >= 21 && n <= 33) return SizeClass::Small;
    if (n >= 64 && n <= 66) return SizeClass::Medium;
    if (n >= 100 && n <= 102) return SizeClass::Large;
    return SizeClass::Other;
}

inline const char* to_string(SizeClass c) {
    switch (c) {
        case SizeClass::Small: return "small";
        case SizeClass::Medium: return "medium";
        case SizeClass::Large: return "large";
        case SizeClass::Other: return "other";
    }
    return "?";
}

// Iteration budgets by size class: standalone VND, CSH outer loop, VND inside CSH.
struct SizeDefaults {
    long vnd_iterations;
    int csh_iterations;
    long csh_inner_iterations;
};

inline SizeDefaults defaults_for(int n) {
    switch (size_class(n)) {
        case SizeClass::Medium: return {100000, 30, 10000};
        case SizeClass::Large: return {500000, 50, 30000};
        default: return {10000, 10, 5000};
    }
}

using ParamMap = std::map<std::string, std::string>;

inline ParamMap parse_params(const std::vector<std::string>& items) {
    ParamMap out;
    for (const auto& it : items) {
        const auto eq = it.find('=');
        if (eq == std::string::npos || eq == 0) throw std::invalid_argument("parameter '" + it + "' is not key=value");
        out[it.substr(0, eq)] = it.substr(eq + 1);
    }
    return out;
}

struct RunConfig {
    Algo algo = Algo::Vnd;
    VndParams vnd;
    CshParams csh;
};

namespace detail {

inline long param_long(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long out = 0;
    try {
        out = std::stol(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || v.empty()) throw std::invalid_argument("parameter " + key + " expects an integer, got '" + v + "'");
    return out;
}

inline double param_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out = 0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || v.empty()) throw std::invalid_argument("parameter " + key + " expects a number, got '" + v + "'");
    return out;
}

inline bool param_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw std::invalid_argument("parameter " + key + " expects 0/1, got '" + v + "'");
}

}  // namespace detail

// Size-class defaults, then the explicit overrides. Recognised keys:
//   iterations       VND iteration budget (vnd) or outer iterations (csh-*)
//   inner            VND iteration budget inside CSH
//   sir_patience, tabu_fraction, pool_cap, time_limit
//   rp_time_limit, rp_solution_limit, rp_root_only, milp_time_limit
//   threads, backend (internal|external), lp_iteration_limit
inline RunConfig make_config(Algo algo, int n, const ParamMap& params) {
    RunConfig cfg;
    cfg.algo = algo;
    const auto d = defaults_for(n);
    cfg.vnd.max_nonimproving = d.vnd_iterations;
    cfg.csh.iterations = d.csh_iterations;
    cfg.csh.vnd.max_nonimproving = d.csh_inner_iterations;
    if (algo == Algo::CshMt) cfg.csh.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const bool csh = algo == Algo::CshSt || algo == Algo::CshMt;
    for (const auto& [k, v] : params) {
        if (k == "iterations") {
            if (csh) cfg.csh.iterations = static_cast<int>(detail::param_long(k, v));
            else cfg.vnd.max_nonimproving = detail::param_long(k, v);
        } else if (k == "inner") {
            cfg.csh.vnd.max_nonimproving = detail::param_long(k, v);
        } else if (k == "sir_patience") {
            cfg.vnd.sir_patience = cfg.csh.vnd.sir_patience = detail::param_long(k, v);
        } else if (k == "tabu_fraction") {
            cfg.vnd.tabu_fraction = cfg.csh.vnd.tabu_fraction = detail::param_double(k, v);
        } else if (k == "pool_cap") {
            cfg.vnd.route_pool_cap = cfg.csh.vnd.route_pool_cap = static_cast<std::size_t>(detail::param_long(k, v));
        } else if (k == "time_limit") {
            cfg.vnd.time_limit_s = cfg.csh.vnd.time_limit_s = detail::param_double(k, v);
        } else if (k == "rp_time_limit") {
            cfg.csh.rp_time_limit_s = detail::param_double(k, v);
        } else if (k == "rp_solution_limit") {
            cfg.csh.rp_solution_limit = detail::param_long(k, v);
        } else if (k == "rp_root_only") {
            cfg.csh.rp_root_only = detail::param_bool(k, v);
        } else if (k == "milp_time_limit") {
            cfg.csh.milp_time_limit_s = detail::param_double(k, v);
        } else if (k == "threads") {
            cfg.csh.threads = static_cast<int>(detail::param_long(k, v));
        } else if (k == "backend") {
            cfg.csh.solver.backend = milp::parse_backend(v);
        } else if (k == "lp_iteration_limit") {
            cfg.csh.solver.internal.lp_iteration_limit = detail::param_long(k, v);
        } else {
            throw std::invalid_argument("unknown parameter '" + k + "'");
        }
    }
    if (csh) cfg.csh.validate();
    else cfg.vnd.validate();
    return cfg;
}

// FNV-1a over the canonical "k=v;..." rendering of the effective parameters.
inline std::string params_digest(const RunConfig& c) {
    std::ostringstream s;
    s << to_string(c.algo) << ";vnd=" << c.vnd.max_nonimproving << ',' << c.vnd.sir_patience << ','
      << detail::fmt_double(c.vnd.tabu_fraction) << ',' << c.vnd.route_pool_cap << ',' << detail::fmt_double(c.vnd.time_limit_s);
    if (c.algo == Algo::CshSt || c.algo == Algo::CshMt) {
        s << ";csh=" << c.csh.iterations << ',' << c.csh.vnd.max_nonimproving << ','
          << detail::fmt_double(c.csh.rp_time_limit_s) << ',' << c.csh.rp_solution_limit << ',' << c.csh.rp_root_only << ','
          << detail::fmt_double(c.csh.milp_time_limit_s) << ',' << c.csh.threads << ','
          << (c.csh.solver.backend == milp::Backend::External ? "external" : "internal") << ','
          << c.csh.solver.internal.lp_iteration_limit;
    }
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s.str()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << h;
    return hex.str();
}

struct RunRecord {
    std::string instance;
    std::string algo;
    std::string params;  // digest
    double profit = 0.0;
    bool feasible = false;
    double cpu_seconds = 0.0;
    double lit_seconds = 0.0;
    long lii = 0;
    int n = 0;
    std::string features;  // e.g. CM-CPI-NLI, "-" for plain instances
    std::string routes;    // "1-3-5|1-2-4-5"

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

inline std::string routes_text(const Solution& sol) {
    std::string out;
    for (int r = 0; r < sol.route_count(); ++r) {
        if (r) out += '|';
        const auto& seq = sol.route(r).seq;
        for (std::size_t i = 0; i < seq.size(); ++i) {
            if (i) out += '-';
            out += std::to_string(seq[i]);
        }
    }
    return out;
}

inline std::vector<std::vector<int>> parse_routes_text(std::string_view text) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::string num;
    auto flush_num = [&] {
        if (num.empty()) throw std::invalid_argument("malformed route dump");
        cur.push_back(std::stoi(num));
        num.clear();
    };
    for (char c : text) {
        if (c == '-') flush_num();
        else if (c == '|') {
            flush_num();
            out.push_back(std::move(cur));
            cur.clear();
        } else if (std::isdigit(static_cast<unsigned char>(c))) num += c;
        else throw std::invalid_argument("malformed route dump");
    }
    flush_num();
    out.push_back(std::move(cur));
    return out;
}

inline std::string to_record_line(const RunRecord& r) {
    std::ostringstream s;
    s << "instance=" << r.instance << " algo=" << r.algo << " params=" << r.params
      << " profit=" << detail::fmt_double(r.profit) << " feasible=" << (r.feasible ? 1 : 0)
      << " cpu=" << detail::fmt_double(r.cpu_seconds) << " lit=" << detail::fmt_double(r.lit_seconds) << " lii=" << r.lii
      << " n=" << r.n << " features=" << (r.features.empty() ? "-" : r.features)
      << " routes=" << (r.routes.empty() ? "-" : r.routes);
    return s.str();
}

inline RunRecord parse_record_line(std::string_view line) {
    RunRecord r;
    std::map<std::string, std::string> kv;
    std::istringstream in{std::string(line)};
    std::string tok;
    while (in >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("record token '" + tok + "' is not key=value");
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto need = [&](const char* k) -> const std::string& {
        auto it = kv.find(k);
        if (it == kv.end()) throw std::invalid_argument(std::string("record lacks '") + k + "'");
        return it->second;
    };
    r.instance = need("instance");
    r.algo = need("algo");
    r.params = need("params");
    r.profit = std::stod(need("profit"));
    r.feasible = need("feasible") == "1";
    r.cpu_seconds = std::stod(need("cpu"));
    r.lit_seconds = std::stod(need("lit"));
    r.lii = std::stol(need("lii"));
    r.n = std::stoi(need("n"));
    r.features = need("features");
    if (r.features == "-") r.features.clear();
    r.routes = need("routes");
    if (r.routes == "-") r.routes.clear();
    return r;
}

inline std::vector<RunRecord> read_records(std::istream& in) {
    std::vector<RunRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        out.push_back(parse_record_line(line));
    }
    return out;
}

// The record's solution, re-checked against the instance.
inline bool record_consistent(const RunRecord& r, const Instance& inst) {
    if (r.routes.empty()) return !r.feasible;
    const auto sol = Solution::from_sequences(parse_routes_text(r.routes), inst);
    return std::abs(sol.profit() - r.profit) <= 1e-6 && is_feasible(sol, inst) == r.feasible;
}

// Generated instance files carry a "# features CM-CPI-NLI" comment line.
inline std::string features_from_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string hash, key, value;
        if (ls >> hash >> key >> value && hash == "#" && key == "features") return value;
    }
    return {};
}

struct RunOutcome {
    RunRecord record;
    Solution solution;
    bool infeasible = false;  // the algorithm proved or reported infeasibility
    std::string note;
};

inline RunOutcome run_algorithm(const Instance& inst, const RunConfig& cfg, const std::string& instance_id,
                                const std::string& features = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    RunOutcome out;
    out.solution = Solution(inst);
    double lit = 0.0;
    long lii = 0;
    switch (cfg.algo) {
        case Algo::Mnaa: {
            const auto a = run_mnaa(inst);
            out.solution = a.solution;
            lii = static_cast<long>(a.steps.size());
            lit = elapsed();
            if (!a.feasible_allocation) out.note = "mandatory allocation incomplete";
            break;
        }
        case Algo::Vnd: {
            const auto a = run_mnaa(inst);
            const auto v = run_vnd(inst, a.solution, cfg.vnd);
            if (v.found_feasible) out.solution = v.best;
            else out.solution = a.solution;
            lii = v.lii;
            lit = v.lit_seconds;
            break;
        }
        case Algo::CshSt:
        case Algo::CshMt: {
            const auto r = cfg.algo == Algo::CshSt ? run_csh_st(inst, cfg.csh) : run_csh_mt(inst, cfg.csh);
            out.solution = r.best;
            out.infeasible = r.status == CshStatus::Infeasible;
            out.note = r.note;
            lii = r.lii;
            lit = r.lit_seconds;
            break;
        }
    }
    auto& rec = out.record;
    rec.instance = instance_id;
    rec.algo = to_string(cfg.algo);
    rec.params = params_digest(cfg);
    rec.feasible = is_feasible(out.solution, inst);
    if (!rec.feasible) out.infeasible = true;
    rec.profit = out.solution.profit();
    rec.cpu_seconds = elapsed();
    rec.lit_seconds = lit;
    rec.lii = lii;
    rec.n = inst.n();
    rec.features = features;
    rec.routes = routes_text(out.solution);
    return out;
}

}  // namespace topstmin
