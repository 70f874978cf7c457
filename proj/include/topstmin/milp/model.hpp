#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace topstmin::milp {

enum class Sense { LE, GE, EQ };
enum class Direction { Maximize, Minimize };
enum class Status { Optimal, Feasible, Infeasible, TimeLimit, SolutionLimit };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "Optimal";
        case Status::Feasible: return "Feasible";
        case Status::Infeasible: return "Infeasible";
        case Status::TimeLimit: return "TimeLimit";
        case Status::SolutionLimit: return "SolutionLimit";
    }
    return "?";
}

struct Term {
    int var = -1;
    double coef = 0.0;
};

struct Variable {
    std::string name;
    double lb = 0.0;
    double ub = 1.0;
    bool integer = true;
    int priority = 0;  // higher values are branched on first
};

struct Constraint {
    std::string name;
    std::vector<Term> terms;
    Sense sense = Sense::LE;
    double rhs = 0.0;
};

struct Controls {
    double time_limit_s = 0.0;  // 0 = unlimited
    long solution_limit = 0;    // 0 = unlimited
    bool root_only = false;
    std::optional<double> warm_lower_bound;  // objective value known to be attainable
};

struct Model {
    std::vector<Variable> vars;
    std::vector<Constraint> rows;
    std::vector<Term> objective;
    Direction direction = Direction::Maximize;
    Controls controls;

    int add_binary(std::string name, int priority = 0) {
        vars.push_back({std::move(name), 0.0, 1.0, true, priority});
        return static_cast<int>(vars.size()) - 1;
    }
    int add_row(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
        for (const auto& t : terms)
            if (t.var < 0 || t.var >= static_cast<int>(vars.size()))
                throw std::out_of_range("constraint " + name + " references an undeclared variable");
        rows.push_back({std::move(name), std::move(terms), sense, rhs});
        return static_cast<int>(rows.size()) - 1;
    }
    void fix(int var, double value) { vars[var].lb = vars[var].ub = value; }
    int num_vars() const { return static_cast<int>(vars.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }
};

struct Result {
    Status status = Status::Infeasible;
    std::vector<double> values;          // best incumbent (empty if none)
    double objective = 0.0;
    std::vector<std::vector<double>> incumbents;  // in discovery order
    long nodes = 0;
    double seconds = 0.0;
    std::string log;

    bool has_solution() const { return !values.empty(); }
};

inline double evaluate_objective(const Model& m, const std::vector<double>& x) {
    double z = 0.0;
    for (const auto& t : m.objective) z += t.coef * x[t.var];
    return z;
}

// First violated bound/integrality/constraint, or nullopt when x satisfies the model.
inline std::optional<std::string> verify(const Model& m, const std::vector<double>& x, double tol = 1e-6) {
    if (static_cast<int>(x.size()) != m.num_vars()) return "assignment has wrong length";
    for (int j = 0; j < m.num_vars(); ++j) {
        const auto& v = m.vars[j];
        if (x[j] < v.lb - tol || x[j] > v.ub + tol) return "variable " + v.name + " out of bounds";
        if (v.integer && std::abs(x[j] - std::round(x[j])) > tol) return "variable " + v.name + " not integral";
    }
    for (const auto& row : m.rows) {
        double lhs = 0.0;
        for (const auto& t : row.terms) lhs += t.coef * x[t.var];
        const bool ok = row.sense == Sense::LE   ? lhs <= row.rhs + tol
                        : row.sense == Sense::GE ? lhs >= row.rhs - tol
                                                 : std::abs(lhs - row.rhs) <= tol;
        if (!ok) return "constraint " + row.name + " violated";
    }
    return std::nullopt;
}

class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace topstmin::milp
