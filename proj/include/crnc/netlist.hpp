#pragma once

// Combinational NAND netlists: text format, diagnostics, depth and a plain
// boolean evaluator.
//
//   # comment
//   INPUTS X1 X2
//   OUTPUTS Y
//   Z1 = NAND(~X1, X2)
//   Z2 = NAND(X1, ~X2)
//   Y  = NAND(Z1, Z2)
//
// `~` reads the dual rail of a wire. Gate lines may appear in any order.

#include "crn.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace crnc {

struct Gate {
    std::string out;
    WireRef a;
    WireRef b;
    int line = 0;

    friend bool operator==(const Gate&, const Gate&) = default;
};

/// Gates are stored in a topological order.
struct Netlist {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<Gate> gates;

    [[nodiscard]] std::size_t gate_count() const { return gates.size(); }

    [[nodiscard]] const Gate* gate_for(const std::string& w) const
    {
        for (const auto& g : gates)
            if (g.out == w) return &g;
        return nullptr;
    }
};

struct Diagnostic {
    enum class Kind { syntax, undefined, duplicate, arity, cycle, repeated_input };
    Kind kind;
    int line = 0; ///< 0 when not tied to a line
    std::string message;
};

inline const char* to_string(Diagnostic::Kind k)
{
    switch (k) {
    case Diagnostic::Kind::syntax: return "syntax";
    case Diagnostic::Kind::undefined: return "undefined wire";
    case Diagnostic::Kind::duplicate: return "duplicate wire";
    case Diagnostic::Kind::arity: return "arity";
    case Diagnostic::Kind::cycle: return "cycle";
    case Diagnostic::Kind::repeated_input: return "repeated input";
    }
    return "?";
}

inline std::string format(const Diagnostic& d)
{
    std::string s = d.line > 0 ? "line " + std::to_string(d.line) + ": " : std::string{};
    return s + to_string(d.kind) + ": " + d.message;
}

struct ParseResult {
    std::optional<Netlist> netlist;
    std::vector<Diagnostic> diagnostics;

    [[nodiscard]] bool ok() const { return netlist.has_value(); }
};

class NetlistError : public std::runtime_error {
public:
    explicit NetlistError(std::vector<Diagnostic> ds)
        : std::runtime_error(join_messages(ds)), _diags(std::move(ds))
    {}
    [[nodiscard]] const std::vector<Diagnostic>& diagnostics() const { return _diags; }

private:
    static std::string join_messages(const std::vector<Diagnostic>& ds)
    {
        std::string m;
        for (const auto& d : ds) m += (m.empty() ? "" : "\n") + format(d);
        return m;
    }
    std::vector<Diagnostic> _diags;
};

namespace detail {

inline std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline bool valid_wire_name(std::string_view w)
{
    if (w.empty() || !(std::isalpha(static_cast<unsigned char>(w[0])) || w[0] == '_')) return false;
    for (char c : w)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return !is_dual_rail(w);
}

inline std::vector<std::string> split_names(std::string_view s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

} // namespace detail

inline ParseResult parse_netlist(std::string_view text)
{
    ParseResult res;
    auto& diags = res.diagnostics;
    auto err = [&](Diagnostic::Kind k, int line, std::string msg) { diags.push_back({k, line, std::move(msg)}); };

    Netlist nl;
    std::vector<Gate> gates;
    std::map<std::string, int> defined; // wire -> defining line
    std::vector<std::pair<std::string, int>> output_decls;
    bool saw_inputs = false, saw_outputs = false;

    auto define = [&](const std::string& w, int line) {
        if (!detail::valid_wire_name(w)) {
            err(Diagnostic::Kind::syntax, line, "invalid wire name '" + w + "'");
            return false;
        }
        if (auto it = defined.find(w); it != defined.end()) {
            err(Diagnostic::Kind::duplicate, line,
                "wire '" + w + "' already defined on line " + std::to_string(it->second));
            return false;
        }
        defined[w] = line;
        return true;
    };

    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
        const std::string line = detail::trim(raw);
        if (line.empty()) continue;

        auto keyword = [&](std::string_view kw) {
            return line.size() >= kw.size() && line.compare(0, kw.size(), kw) == 0 &&
                   (line.size() == kw.size() || line[kw.size()] == ' ' || line[kw.size()] == '\t');
        };
        if (keyword("INPUTS")) {
            if (saw_inputs) err(Diagnostic::Kind::duplicate, lineno, "second INPUTS line");
            saw_inputs = true;
            for (auto& w : detail::split_names(std::string_view(line).substr(6)))
                if (define(w, lineno)) nl.inputs.push_back(w);
            continue;
        }
        if (keyword("OUTPUTS")) {
            if (saw_outputs) err(Diagnostic::Kind::duplicate, lineno, "second OUTPUTS line");
            saw_outputs = true;
            for (auto& w : detail::split_names(std::string_view(line).substr(7))) output_decls.emplace_back(w, lineno);
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            err(Diagnostic::Kind::syntax, lineno, "expected 'W = NAND(a, b)'");
            continue;
        }
        const std::string lhs = detail::trim(std::string_view(line).substr(0, eq));
        const std::string rhs = detail::trim(std::string_view(line).substr(eq + 1));
        const auto open = rhs.find('(');
        if (open == std::string::npos || rhs.back() != ')') {
            err(Diagnostic::Kind::syntax, lineno, "expected 'NAND(a, b)' on the right-hand side");
            continue;
        }
        const std::string fn = detail::trim(std::string_view(rhs).substr(0, open));
        if (fn != "NAND") {
            err(Diagnostic::Kind::syntax, lineno, "unknown gate '" + fn + "' (only NAND is supported)");
            continue;
        }
        const std::string args = rhs.substr(open + 1, rhs.size() - open - 2);
        std::vector<std::string> parts;
        {
            std::string cur;
            for (char c : args) {
                if (c == ',') {
                    parts.push_back(detail::trim(cur));
                    cur.clear();
                } else {
                    cur += c;
                }
            }
            parts.push_back(detail::trim(cur));
        }
        if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
            err(Diagnostic::Kind::arity, lineno,
                "NAND takes exactly two inputs, got " + std::to_string(args.empty() ? 0 : parts.size()));
            continue;
        }
        std::vector<WireRef> refs;
        bool bad = false;
        for (const auto& p : parts) {
            std::string name = p;
            bool neg = false;
            while (!name.empty() && name[0] == '~') {
                neg = !neg;
                name = detail::trim(std::string_view(name).substr(1));
            }
            if (!detail::valid_wire_name(name)) {
                err(Diagnostic::Kind::syntax, lineno, "invalid wire reference '" + p + "'");
                bad = true;
            }
            refs.push_back({name, neg});
        }
        if (bad) continue;
        if (refs[0].wire == refs[1].wire) {
            err(Diagnostic::Kind::repeated_input, lineno,
                "gate reads wire '" + refs[0].wire + "' on both inputs; use a distinct wire");
            continue;
        }
        if (!define(lhs, lineno)) continue;
        gates.push_back({lhs, refs[0], refs[1], lineno});
    }

    if (!saw_inputs) err(Diagnostic::Kind::syntax, 0, "missing INPUTS line");
    if (!saw_outputs) err(Diagnostic::Kind::syntax, 0, "missing OUTPUTS line");

    for (const auto& g : gates)
        for (const auto* r : {&g.a, &g.b})
            if (!defined.contains(r->wire))
                err(Diagnostic::Kind::undefined, g.line, "wire '" + r->wire + "' is never defined");
    std::set<std::string> seen_out;
    for (const auto& [w, line] : output_decls) {
        if (!defined.contains(w))
            err(Diagnostic::Kind::undefined, line, "output '" + w + "' is never defined");
        else if (!seen_out.insert(w).second)
            err(Diagnostic::Kind::duplicate, line, "output '" + w + "' listed twice");
        else
            nl.outputs.push_back(w);
    }

    // Kahn's algorithm over gate-to-gate edges.
    std::map<std::string, std::size_t> producer;
    for (std::size_t i = 0; i < gates.size(); ++i) producer[gates[i].out] = i;
    std::vector<int> indeg(gates.size(), 0);
    std::vector<std::vector<std::size_t>> succ(gates.size());
    for (std::size_t i = 0; i < gates.size(); ++i)
        for (const auto* r : {&gates[i].a, &gates[i].b})
            if (auto it = producer.find(r->wire); it != producer.end()) {
                succ[it->second].push_back(i);
                ++indeg[i];
            }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready; // keep source order
    for (std::size_t i = 0; i < gates.size(); ++i)
        if (indeg[i] == 0) ready.push(i);
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        const auto i = ready.top();
        ready.pop();
        order.push_back(i);
        for (auto j : succ[i])
            if (--indeg[j] == 0) ready.push(j);
    }
    if (order.size() != gates.size()) {
        std::string names;
        for (std::size_t i = 0; i < gates.size(); ++i)
            if (indeg[i] > 0) names += (names.empty() ? "" : ", ") + gates[i].out;
        int line = 0;
        for (std::size_t i = 0; i < gates.size() && line == 0; ++i)
            if (indeg[i] > 0) line = gates[i].line;
        err(Diagnostic::Kind::cycle, line, "combinational cycle through {" + names + "}");
    }

    if (!diags.empty()) {
        std::stable_sort(diags.begin(), diags.end(),
                         [](const Diagnostic& x, const Diagnostic& y) { return x.line < y.line; });
        return res;
    }
    for (auto i : order) nl.gates.push_back(gates[i]);
    res.netlist = std::move(nl);
    return res;
}

inline Netlist parse_netlist_or_throw(std::string_view text)
{
    auto r = parse_netlist(text);
    if (!r.ok()) throw NetlistError(std::move(r.diagnostics));
    return std::move(*r.netlist);
}

/// Longest gate path ending at each wire (0 for primary inputs).
inline std::map<std::string, int> wire_depths(const Netlist& nl)
{
    std::map<std::string, int> d;
    for (const auto& w : nl.inputs) d[w] = 0;
    for (const auto& g : nl.gates) d[g.out] = 1 + std::max(d.at(g.a.wire), d.at(g.b.wire));
    return d;
}

/// Longest input-to-output path, in gates.
inline int depth(const Netlist& nl)
{
    const auto d = wire_depths(nl);
    int best = 0;
    for (const auto& w : nl.outputs) best = std::max(best, d.at(w));
    return best;
}

/// Pure boolean evaluation; `w` is indexed like nl.inputs, the result like nl.outputs.
inline std::vector<int> eval_boolean(const Netlist& nl, const std::vector<int>& w)
{
    if (w.size() != nl.inputs.size())
        throw NetlistError({{Diagnostic::Kind::arity, 0,
                             "expected " + std::to_string(nl.inputs.size()) + " input bits, got " +
                                 std::to_string(w.size())}});
    std::map<std::string, int> val;
    for (std::size_t i = 0; i < w.size(); ++i) val[nl.inputs[i]] = w[i] ? 1 : 0;
    auto read = [&](const WireRef& r) { return r.negated ? 1 - val.at(r.wire) : val.at(r.wire); };
    for (const auto& g : nl.gates) val[g.out] = (read(g.a) && read(g.b)) ? 0 : 1;
    std::vector<int> out;
    for (const auto& o : nl.outputs) out.push_back(val.at(o));
    return out;
}

/// Renders a netlist back to the text format.
inline std::string to_text(const Netlist& nl)
{
    std::string s = "INPUTS";
    for (const auto& w : nl.inputs) s += " " + w;
    s += "\nOUTPUTS";
    for (const auto& w : nl.outputs) s += " " + w;
    s += "\n";
    for (const auto& g : nl.gates) s += g.out + " = NAND(" + g.a.str() + ", " + g.b.str() + ")\n";
    return s;
}

} // namespace crnc
