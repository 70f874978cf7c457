#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace topstmin {

// Feasibility tolerance on every time comparison (c_r <= T_max + kTimeEps).
inline constexpr double kTimeEps = 1e-6;

// Which constraint families are active.
enum class Variant { TOP, P, PL };

inline const char* to_string(Variant v) {
    switch (v) {
        case Variant::TOP: return "TOP";
        case Variant::P: return "P";
        case Variant::PL: return "PL";
    }
    return "?";
}

inline Variant parse_variant(std::string_view s) {
    if (s == "TOP") return Variant::TOP;
    if (s == "P") return Variant::P;
    if (s == "PL") return Variant::PL;
    throw std::invalid_argument("unknown variant '" + std::string(s) + "'");
}

struct Point {
    double x = 0.0;
    double y = 0.0;
};

using Arc = std::pair<int, int>;

// Raw, mutable description of an instance. Node ids are 1-based: node 1 is the
// source, node n the destination, 2..n-1 are customers. Per-node vectors are
// indexed by node id and have size n+1 (slot 0 unused).
struct InstanceData {
    int n = 0;
    int m = 1;
    double t_max = 0.0;
    Variant variant = Variant::TOP;
    std::vector<Point> coords;     // empty, or n+1 entries
    std::vector<double> profit;    // n+1
    std::vector<double> service;   // n+1
    std::vector<double> travel;    // (n+1)*(n+1), row-major
    std::vector<int> mandatory;
    std::vector<Arc> phys;         // forbidden arcs (i,j)
    std::vector<Arc> logic;        // unordered customer pairs, stored with a < b
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Immutable problem data with O(1) lookups. Construction only checks what the
// lookup tables need (sizes and index ranges); semantic problems are reported
// by validate_instance.
class Instance {
public:
    Instance() = default;

    explicit Instance(InstanceData data) : d_(std::move(data)) {
        const int n = d_.n;
        if (n < 2) throw std::invalid_argument("instance needs at least 2 nodes");
        if (d_.m < 1) throw std::invalid_argument("fleet size must be positive");
        const auto sz = static_cast<std::size_t>(n + 1);
        if (d_.profit.size() != sz || d_.service.size() != sz)
            throw std::invalid_argument("profit/service vectors must have n+1 entries");
        if (d_.travel.size() != sz * sz)
            throw std::invalid_argument("travel matrix must be (n+1)x(n+1)");
        if (!d_.coords.empty() && d_.coords.size() != sz)
            throw std::invalid_argument("coords must be empty or have n+1 entries");
        auto in_range = [n](int v) { return v >= 1 && v <= n; };
        mandatory_flag_.assign(sz, 0);
        for (int k : d_.mandatory) {
            if (!in_range(k)) throw std::invalid_argument("mandatory node out of range");
            mandatory_flag_[k] = 1;
        }
        std::sort(d_.mandatory.begin(), d_.mandatory.end());
        d_.mandatory.erase(std::unique(d_.mandatory.begin(), d_.mandatory.end()), d_.mandatory.end());

        forbidden_.assign(sz * sz, 0);
        for (auto [i, j] : d_.phys) {
            if (!in_range(i) || !in_range(j)) throw std::invalid_argument("forbidden arc out of range");
            forbidden_[idx(i, j)] = 1;
        }
        std::sort(d_.phys.begin(), d_.phys.end());
        d_.phys.erase(std::unique(d_.phys.begin(), d_.phys.end()), d_.phys.end());

        logic_.assign(sz * sz, 0);
        partners_.assign(sz, {});
        for (auto& [a, b] : d_.logic) {
            if (!in_range(a) || !in_range(b)) throw std::invalid_argument("logical pair out of range");
            if (a > b) std::swap(a, b);
        }
        std::sort(d_.logic.begin(), d_.logic.end());
        d_.logic.erase(std::unique(d_.logic.begin(), d_.logic.end()), d_.logic.end());
        for (auto [a, b] : d_.logic) {
            logic_[idx(a, b)] = logic_[idx(b, a)] = 1;
            partners_[a].push_back(b);
            if (a != b) partners_[b].push_back(a);
        }
        for (auto& p : partners_) std::sort(p.begin(), p.end());
    }

    const InstanceData& data() const { return d_; }

    int n() const { return d_.n; }
    int m() const { return d_.m; }
    double t_max() const { return d_.t_max; }
    Variant variant() const { return d_.variant; }
    int source() const { return 1; }
    int sink() const { return d_.n; }
    int customer_count() const { return d_.n - 2; }
    bool is_customer(int k) const { return k >= 2 && k <= d_.n - 1; }
    bool has_coords() const { return !d_.coords.empty(); }
    const Point& coord(int k) const { return d_.coords[k]; }

    double profit(int k) const { return d_.profit[k]; }
    double service(int k) const { return d_.service[k]; }
    double travel(int i, int j) const { return d_.travel[idx(i, j)]; }

    const std::vector<int>& mandatory() const { return d_.mandatory; }
    const std::vector<Arc>& forbidden_arcs() const { return d_.phys; }
    const std::vector<Arc>& logical_pairs() const { return d_.logic; }

    // Raw set membership, regardless of variant.
    bool in_mandatory_set(int k) const { return mandatory_flag_[k] != 0; }
    bool in_forbidden_set(int i, int j) const { return forbidden_[idx(i, j)] != 0; }
    bool in_logic_set(int a, int b) const { return logic_[idx(a, b)] != 0; }

    // Variant-aware views used by the algorithms.
    bool is_mandatory(int k) const { return d_.variant != Variant::TOP && mandatory_flag_[k] != 0; }
    bool arc_blocked(int i, int j) const { return d_.variant != Variant::TOP && forbidden_[idx(i, j)] != 0; }
    bool conflicting(int a, int b) const { return d_.variant == Variant::PL && logic_[idx(a, b)] != 0; }
    // C_k under the active variant.
    const std::vector<int>& logic_partners(int k) const {
        static const std::vector<int> none;
        return d_.variant == Variant::PL ? partners_[k] : none;
    }
    std::vector<int> active_mandatory() const {
        return d_.variant == Variant::TOP ? std::vector<int>{} : d_.mandatory;
    }

    // (i,j) belongs to the traversable arc set.
    bool traversable(int i, int j) const {
        return i >= 1 && i <= d_.n - 1 && j >= 2 && j <= d_.n && i != j;
    }
    // Traversable and not physically forbidden under the active variant.
    bool arc_usable(int i, int j) const { return traversable(i, j) && !arc_blocked(i, j); }

    friend bool operator==(const Instance& a, const Instance& b) {
        const auto& x = a.d_;
        const auto& y = b.d_;
        auto same_coords = [&] {
            if (x.coords.size() != y.coords.size()) return false;
            for (std::size_t i = 0; i < x.coords.size(); ++i)
                if (x.coords[i].x != y.coords[i].x || x.coords[i].y != y.coords[i].y) return false;
            return true;
        };
        return x.n == y.n && x.m == y.m && x.t_max == y.t_max && x.variant == y.variant && same_coords() &&
               x.profit == y.profit && x.service == y.service && x.travel == y.travel &&
               x.mandatory == y.mandatory && x.phys == y.phys && x.logic == y.logic;
    }

private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(d_.n + 1) + static_cast<std::size_t>(j);
    }

    InstanceData d_;
    std::vector<char> mandatory_flag_;
    std::vector<char> forbidden_;
    std::vector<char> logic_;
    std::vector<std::vector<int>> partners_;
};

// Euclidean travel matrix from coordinates, full double precision.
inline std::vector<double> euclidean_travel(const std::vector<Point>& coords) {
    const std::size_t sz = coords.size();
    std::vector<double> t(sz * sz, 0.0);
    for (std::size_t i = 1; i < sz; ++i)
        for (std::size_t j = 1; j < sz; ++j)
            t[i * sz + j] = std::hypot(coords[i].x - coords[j].x, coords[i].y - coords[j].y);
    return t;
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

inline double to_double(std::string_view tok, int line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError(line, "expected a number, got '" + std::string(tok) + "'");
    return v;
}

inline long long to_int(std::string_view tok, int line) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError(line, "expected an integer, got '" + std::string(tok) + "'");
    return v;
}

// Shortest text that parses back to exactly the same double (17 significant digits).
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

// Reads the classical TOP benchmark format: `n`, `m`, `tmax` header lines then
// one `x y score [service]` line per node, source first and destination last.
inline Instance parse_top_instance(std::istream& in) {
    std::string line;
    int line_no = 0;
    long long n = -1, m = -1;
    double tmax = 0.0;
    bool have_tmax = false;
    InstanceData d;
    std::vector<Point> pts(1);
    std::vector<double> score(1), serv(1);
    int header_seen = 0;
    int last_header_line = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto tok = detail::split_ws(line);
        if (tok.empty()) continue;
        if (header_seen < 3) {
            if (tok.size() != 2) throw ParseError(line_no, "malformed header, expected '<key> <value>'");
            if (tok[0] == "n") {
                n = detail::to_int(tok[1], line_no);
            } else if (tok[0] == "m") {
                m = detail::to_int(tok[1], line_no);
            } else if (tok[0] == "tmax") {
                tmax = detail::to_double(tok[1], line_no);
                have_tmax = true;
            } else {
                throw ParseError(line_no, "malformed header, unknown key '" + std::string(tok[0]) + "'");
            }
            ++header_seen;
            last_header_line = line_no;
            continue;
        }
        if (tok.size() != 3 && tok.size() != 4)
            throw ParseError(line_no, "node line must be 'x y score [service]'");
        pts.push_back({detail::to_double(tok[0], line_no), detail::to_double(tok[1], line_no)});
        score.push_back(detail::to_double(tok[2], line_no));
        serv.push_back(tok.size() == 4 ? detail::to_double(tok[3], line_no) : 0.0);
    }
    if (n < 0) throw ParseError(last_header_line, "malformed header: missing 'n'");
    if (m < 0) throw ParseError(last_header_line, "malformed header: missing 'm'");
    if (!have_tmax) throw ParseError(last_header_line, "malformed header: missing 'tmax'");
    const int nodes = static_cast<int>(pts.size()) - 1;
    if (nodes < 2) throw ParseError(line_no, "fewer than 2 nodes");
    if (nodes != n)
        throw ParseError(line_no, "header declares n=" + std::to_string(n) + " but " + std::to_string(nodes) +
                                      " node lines were read");
    if (m < 1) throw ParseError(last_header_line, "fleet size must be positive");

    d.n = nodes;
    d.m = static_cast<int>(m);
    d.t_max = tmax;
    d.variant = Variant::TOP;
    d.coords = std::move(pts);
    d.profit = std::move(score);
    d.service = std::move(serv);
    d.profit[1] = d.profit[nodes] = 0.0;
    d.service[1] = d.service[nodes] = 0.0;
    d.travel = euclidean_travel(d.coords);
    return Instance(std::move(d));
}

inline Instance parse_top_instance(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_top_instance(in);
}

// Extended line-oriented format:
//   HEADER n m tmax variant
//   NODE idx x y profit service        (x y may be '-' for non-geometric data)
//   MANDATORY idx...
//   PHYS i j
//   LOGIC i j
//   TRAVEL i j t                       (only for non-geometric data; overrides coords)
inline Instance parse_extended_instance(std::istream& in) {
    std::string line;
    int line_no = 0;
    bool have_header = false, have_mandatory = false;
    bool geometric = true;
    InstanceData d;
    std::vector<char> node_seen;
    std::vector<std::pair<Arc, double>> explicit_travel;
    std::vector<std::pair<Arc, int>> phys_lines, logic_lines;
    std::vector<std::pair<int, int>> mandatory_lines;

    while (std::getline(in, line)) {
        ++line_no;
        auto tok = detail::split_ws(line);
        if (tok.empty() || tok[0].front() == '#') continue;
        const auto key = tok[0];
        if (key == "HEADER") {
            if (have_header) throw ParseError(line_no, "duplicate HEADER section");
            if (tok.size() != 5) throw ParseError(line_no, "HEADER must be 'HEADER n m tmax variant'");
            const auto n = detail::to_int(tok[1], line_no);
            const auto m = detail::to_int(tok[2], line_no);
            if (n < 2) throw ParseError(line_no, "fewer than 2 nodes");
            if (m < 1) throw ParseError(line_no, "fleet size must be positive");
            d.n = static_cast<int>(n);
            d.m = static_cast<int>(m);
            d.t_max = detail::to_double(tok[3], line_no);
            try {
                d.variant = parse_variant(tok[4]);
            } catch (const std::invalid_argument& e) {
                throw ParseError(line_no, e.what());
            }
            const auto sz = static_cast<std::size_t>(d.n + 1);
            d.coords.assign(sz, {});
            d.profit.assign(sz, 0.0);
            d.service.assign(sz, 0.0);
            node_seen.assign(sz, 0);
            have_header = true;
            continue;
        }
        if (!have_header) throw ParseError(line_no, "expected HEADER before '" + std::string(key) + "'");
        auto node_id = [&](std::string_view t) {
            const auto v = detail::to_int(t, line_no);
            if (v < 1 || v > d.n) throw ParseError(line_no, "node index " + std::to_string(v) + " out of range");
            return static_cast<int>(v);
        };
        if (key == "NODE") {
            if (tok.size() != 6) throw ParseError(line_no, "NODE must be 'NODE idx x y profit service'");
            const int k = node_id(tok[1]);
            if (node_seen[k]) throw ParseError(line_no, "duplicate NODE " + std::to_string(k));
            node_seen[k] = 1;
            if (tok[2] == "-" || tok[3] == "-") {
                geometric = false;
            } else {
                d.coords[k] = {detail::to_double(tok[2], line_no), detail::to_double(tok[3], line_no)};
            }
            d.profit[k] = detail::to_double(tok[4], line_no);
            d.service[k] = detail::to_double(tok[5], line_no);
        } else if (key == "MANDATORY") {
            if (have_mandatory) throw ParseError(line_no, "duplicate MANDATORY section");
            have_mandatory = true;
            for (std::size_t i = 1; i < tok.size(); ++i) mandatory_lines.emplace_back(node_id(tok[i]), line_no);
        } else if (key == "PHYS") {
            if (tok.size() != 3) throw ParseError(line_no, "PHYS must be 'PHYS i j'");
            phys_lines.push_back({{node_id(tok[1]), node_id(tok[2])}, line_no});
        } else if (key == "LOGIC") {
            if (tok.size() != 3) throw ParseError(line_no, "LOGIC must be 'LOGIC i j'");
            logic_lines.push_back({{node_id(tok[1]), node_id(tok[2])}, line_no});
        } else if (key == "TRAVEL") {
            if (tok.size() != 4) throw ParseError(line_no, "TRAVEL must be 'TRAVEL i j t'");
            explicit_travel.push_back({{node_id(tok[1]), node_id(tok[2])}, detail::to_double(tok[3], line_no)});
        } else {
            throw ParseError(line_no, "unknown section '" + std::string(key) + "'");
        }
    }
    if (!have_header) throw ParseError(line_no, "missing HEADER");
    for (int k = 1; k <= d.n; ++k)
        if (!node_seen[k]) throw ParseError(line_no, "missing NODE " + std::to_string(k));

    auto customer = [&](int k) { return k >= 2 && k <= d.n - 1; };
    for (auto [k, ln] : mandatory_lines) {
        if (!customer(k)) throw ParseError(ln, "mandatory node " + std::to_string(k) + " is not a customer");
        d.mandatory.push_back(k);
    }
    for (auto [arc, ln] : phys_lines) {
        auto [i, j] = arc;
        if (!(i <= d.n - 1 && j >= 2 && i != j))
            throw ParseError(ln, "forbidden arc (" + std::to_string(i) + "," + std::to_string(j) +
                                     ") is not traversable");
        d.phys.push_back(arc);
    }
    for (auto [pair, ln] : logic_lines) {
        auto [a, b] = pair;
        if (!customer(a) || !customer(b) || a == b)
            throw ParseError(ln, "logical pair (" + std::to_string(a) + "," + std::to_string(b) +
                                     ") must join two distinct customers");
        d.logic.push_back(pair);
    }
    d.profit[1] = d.profit[d.n] = 0.0;
    d.service[1] = d.service[d.n] = 0.0;
    if (geometric && explicit_travel.empty()) {
        d.travel = euclidean_travel(d.coords);
    } else {
        d.coords.clear();
        const auto sz = static_cast<std::size_t>(d.n + 1);
        d.travel.assign(sz * sz, 0.0);
        for (auto [arc, t] : explicit_travel) d.travel[arc.first * sz + arc.second] = t;
    }
    return Instance(std::move(d));
}

inline Instance parse_extended_instance(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_extended_instance(in);
}

// Companion writer; floats carry 17 significant digits so parsing is exact.
inline void write_extended_instance(std::ostream& out, const Instance& inst) {
    const auto& d = inst.data();
    using detail::fmt_double;
    out << "HEADER " << d.n << ' ' << d.m << ' ' << fmt_double(d.t_max) << ' ' << to_string(d.variant) << '\n';
    for (int k = 1; k <= d.n; ++k) {
        out << "NODE " << k << ' ';
        if (inst.has_coords())
            out << fmt_double(d.coords[k].x) << ' ' << fmt_double(d.coords[k].y);
        else
            out << "- -";
        out << ' ' << fmt_double(d.profit[k]) << ' ' << fmt_double(d.service[k]) << '\n';
    }
    if (!d.mandatory.empty()) {
        out << "MANDATORY";
        for (int k : d.mandatory) out << ' ' << k;
        out << '\n';
    }
    for (auto [i, j] : d.phys) out << "PHYS " << i << ' ' << j << '\n';
    for (auto [a, b] : d.logic) out << "LOGIC " << a << ' ' << b << '\n';
    if (!inst.has_coords()) {
        for (int i = 1; i <= d.n; ++i)
            for (int j = 1; j <= d.n; ++j)
                if (inst.traversable(i, j)) out << "TRAVEL " << i << ' ' << j << ' ' << fmt_double(inst.travel(i, j)) << '\n';
    }
}

inline std::string to_extended_text(const Instance& inst) {
    std::ostringstream out;
    write_extended_instance(out, inst);
    return out.str();
}

// Picks the parser from the first token outside comments: extended files start with HEADER.
inline Instance parse_any_instance(std::string_view text) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto first = text.find_first_not_of(" \t\r\n", pos);
        if (first == std::string_view::npos) break;
        if (text[first] != '#') {
            if (text.substr(first, 6) == "HEADER") return parse_extended_instance(text);
            break;
        }
        pos = text.find('\n', first);
        if (pos == std::string_view::npos) break;
    }
    return parse_top_instance(text);
}

// Reports every invariant violation; an empty result means the instance is valid.
inline std::vector<std::string> validate_instance(const Instance& inst) {
    std::vector<std::string> out;
    const auto& d = inst.data();
    const int n = d.n;
    if (n < 2) {
        out.push_back("fewer than 2 nodes");
        return out;
    }
    if (d.m < 1) out.push_back("fleet size must be positive");
    if (d.t_max < 0) out.push_back("negative time budget");
    for (int k = 1; k <= n; ++k) {
        if (d.service[k] < 0) out.push_back("negative service time at node " + std::to_string(k));
        if (d.profit[k] < 0) out.push_back("negative profit at node " + std::to_string(k));
    }
    if (d.profit[1] != 0 || d.profit[n] != 0) out.push_back("terminal with nonzero profit");
    if (d.service[1] != 0 || d.service[n] != 0) out.push_back("terminal with nonzero service time");
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            if (inst.traversable(i, j) && inst.travel(i, j) < 0)
                out.push_back("negative travel time on (" + std::to_string(i) + "," + std::to_string(j) + ")");
    if (inst.has_coords()) {
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j) {
                if (!inst.traversable(i, j)) continue;
                const double e = std::hypot(d.coords[i].x - d.coords[j].x, d.coords[i].y - d.coords[j].y);
                if (std::abs(e - inst.travel(i, j)) > 1e-9 * std::max(1.0, e))
                    out.push_back("travel time on (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") differs from Euclidean distance");
            }
    }
    for (int k : d.mandatory)
        if (k < 2 || k > n - 1) out.push_back("mandatory node " + std::to_string(k) + " is not a customer");
    if (d.variant != Variant::TOP) {
        if (d.mandatory.empty()) out.push_back("variant requires at least one mandatory node");
    }
    for (auto [i, j] : d.phys)
        if (!inst.traversable(i, j))
            out.push_back("forbidden arc (" + std::to_string(i) + "," + std::to_string(j) + ") is not traversable");
    for (auto [a, b] : d.logic) {
        if (a == 1 || a == n || b == 1 || b == n)
            out.push_back("logical pair touches terminal (" + std::to_string(a) + "," + std::to_string(b) + ")");
        else if (a == b)
            out.push_back("logical pair joins node " + std::to_string(a) + " with itself");
    }
    return out;
}

}  // namespace topstmin
