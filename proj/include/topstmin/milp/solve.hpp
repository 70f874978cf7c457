#pragma once

#include <string>

#include "branch_and_bound.hpp"
#include "external.hpp"
#include "model.hpp"

namespace topstmin::milp {

enum class Backend { Internal, External };

inline Backend parse_backend(const std::string& s) {
    if (s == "internal") return Backend::Internal;
    if (s == "external") return Backend::External;
    throw std::invalid_argument("unknown MILP backend '" + s + "'");
}

struct SolverConfig {
    Backend backend = Backend::Internal;
    ExternalConfig external = ExternalConfig::from_env();
    BnbSettings internal;
};

inline Result solve(const Model& model, const SolverConfig& cfg = {}) {
    if (cfg.backend == Backend::External) return solve_external(model, cfg.external);
    return solve_internal(model, cfg.internal);
}

}  // namespace topstmin::milp
