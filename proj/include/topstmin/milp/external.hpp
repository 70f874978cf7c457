#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>

#include "../instance.hpp"
#include "lp_format.hpp"
#include "model.hpp"

namespace topstmin::milp {

inline constexpr const char* kMilpCommandEnv = "TOPSTMIN_MILP_CMD";

// Shell command template; {model}, {solution}, {time_limit} and
// {solution_limit} are substituted before running it.
struct ExternalConfig {
    std::string command_template;
    bool keep_files = false;

    static ExternalConfig from_env() {
        ExternalConfig c;
        if (const char* v = std::getenv(kMilpCommandEnv)) c.command_template = v;
        return c;
    }
};

namespace detail {

inline std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) s.replace(pos, from.size(), to);
    return s;
}

inline std::filesystem::path fresh_workdir() {
    static std::atomic<unsigned long> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    std::ostringstream name;
    name << "topstmin-milp-" << stamp << '-' << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '-'
         << counter++;
    auto dir = std::filesystem::temp_directory_path() / name.str();
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace detail

// Reads "name value" lines; any mention of "infeasible" marks the model infeasible.
inline Result parse_external_solution(const std::string& text, const Model& model) {
    Result res;
    const std::string low = detail::lower(text);
    if (low.find("infeasible") != std::string::npos && low.find("primal feasible") == std::string::npos) {
        res.status = Status::Infeasible;
        return res;
    }
    std::unordered_map<std::string, int> index;
    for (int j = 0; j < model.num_vars(); ++j) index.emplace(model.vars[j].name, j);
    std::vector<double> x(model.num_vars(), 0.0);
    bool any = false;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string name, value;
        if (!(ls >> name >> value)) continue;
        auto it = index.find(name);
        if (it == index.end()) continue;
        char* end = nullptr;
        const double v = std::strtod(value.c_str(), &end);
        if (end == value.c_str()) continue;
        x[it->second] = model.vars[it->second].integer ? std::round(v) : v;
        any = true;
    }
    if (!any) {
        res.status = Status::Infeasible;
        return res;
    }
    res.values = x;
    res.incumbents.push_back(x);
    res.objective = evaluate_objective(model, x);
    res.status = low.find("optimal") != std::string::npos ? Status::Optimal : Status::Feasible;
    return res;
}

inline Result solve_external(const Model& model, const ExternalConfig& cfg) {
    if (cfg.command_template.empty())
        throw BackendError(std::string("external MILP backend not configured (set ") + kMilpCommandEnv + ")");
    const auto t0 = std::chrono::steady_clock::now();
    const auto dir = detail::fresh_workdir();
    const auto model_path = dir / "model.lp";
    const auto sol_path = dir / "model.sol";
    const auto log_path = dir / "solver.log";
    {
        std::ofstream out(model_path);
        write_lp(out, model);
    }
    const auto& ctl = model.controls;
    std::string cmd = cfg.command_template;
    cmd = detail::replace_all(cmd, "{model}", model_path.string());
    cmd = detail::replace_all(cmd, "{solution}", sol_path.string());
    cmd = detail::replace_all(cmd, "{time_limit}", topstmin::detail::fmt_double(ctl.time_limit_s > 0 ? ctl.time_limit_s : 1e9));
    cmd = detail::replace_all(cmd, "{solution_limit}", std::to_string(ctl.solution_limit > 0 ? ctl.solution_limit : 2000000000L));
    const std::string full = "(" + cmd + ") > '" + log_path.string() + "' 2>&1";
    const int rc = std::system(full.c_str());
    const std::string log = detail::read_file(log_path);

    auto cleanup = [&] {
        if (!cfg.keep_files) {
            std::error_code ec;
            std::filesystem::remove_all(dir, ec);
        }
    };
    if (rc != 0) {
        cleanup();
        throw BackendError("external MILP solver exited with status " + std::to_string(rc) + ":\n" + log);
    }
    if (!std::filesystem::exists(sol_path)) {
        cleanup();
        throw BackendError("external MILP solver wrote no solution file:\n" + log);
    }
    Result res = parse_external_solution(detail::read_file(sol_path), model);
    cleanup();
    res.log = log;
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (res.has_solution()) {
        if (auto err = verify(model, res.values)) throw BackendError("external solution rejected: " + *err + "\n" + log);
        if (ctl.solution_limit == 1 && res.status != Status::Optimal) res.status = Status::SolutionLimit;
    }
    return res;
}

}  // namespace topstmin::milp
