#pragma once

#include <ostream>
#include <sstream>
#include <string>

#include "../instance.hpp"
#include "model.hpp"

namespace topstmin::milp {

namespace detail {
inline void write_linear(std::ostream& out, const std::vector<Term>& terms, const Model& m) {
    if (terms.empty()) {
        out << " 0 " << (m.vars.empty() ? std::string("dummy") : m.vars.front().name);
        return;
    }
    int on_line = 0;
    bool first = true;
    for (const auto& t : terms) {
        if (on_line == 8) {
            out << "\n   ";
            on_line = 0;
        }
        const double c = t.coef;
        out << (c < 0 ? " - " : first ? " " : " + ") << topstmin::detail::fmt_double(c < 0 ? -c : c) << ' '
            << m.vars[t.var].name;
        first = false;
        ++on_line;
    }
}
}  // namespace detail

// CPLEX-style LP text: objective, constraints, bounds, binaries/generals.
inline void write_lp(std::ostream& out, const Model& m) {
    out << "\\ topstmin model: " << m.num_vars() << " variables, " << m.num_rows() << " constraints\n";
    out << (m.direction == Direction::Maximize ? "Maximize\n" : "Minimize\n");
    out << " obj:";
    detail::write_linear(out, m.objective, m);
    out << "\nSubject To\n";
    for (int i = 0; i < m.num_rows(); ++i) {
        const auto& r = m.rows[i];
        out << ' ' << (r.name.empty() ? "c" + std::to_string(i) : r.name) << ':';
        detail::write_linear(out, r.terms, m);
        out << (r.sense == Sense::LE ? " <= " : r.sense == Sense::GE ? " >= " : " = ")
            << topstmin::detail::fmt_double(r.rhs) << '\n';
    }
    out << "Bounds\n";
    for (const auto& v : m.vars) {
        if (v.lb == v.ub) out << ' ' << v.name << " = " << topstmin::detail::fmt_double(v.lb) << '\n';
        else if (!(v.integer && v.lb == 0.0 && v.ub == 1.0))
            out << ' ' << topstmin::detail::fmt_double(v.lb) << " <= " << v.name << " <= "
                << topstmin::detail::fmt_double(v.ub) << '\n';
    }
    bool any_bin = false, any_gen = false;
    for (const auto& v : m.vars) {
        if (!v.integer) continue;
        if (v.lb >= 0.0 && v.ub <= 1.0) any_bin = true;
        else any_gen = true;
    }
    if (any_bin) {
        out << "Binaries\n";
        for (const auto& v : m.vars)
            if (v.integer && v.lb >= 0.0 && v.ub <= 1.0) out << ' ' << v.name << '\n';
    }
    if (any_gen) {
        out << "Generals\n";
        for (const auto& v : m.vars)
            if (v.integer && !(v.lb >= 0.0 && v.ub <= 1.0)) out << ' ' << v.name << '\n';
    }
    out << "End\n";
}

inline std::string to_lp_text(const Model& m) {
    std::ostringstream out;
    write_lp(out, m);
    return out.str();
}

}  // namespace topstmin::milp
