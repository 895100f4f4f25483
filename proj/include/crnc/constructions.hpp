#pragma once

// Concrete dual-rail constructions: the robust NAND gate, the SR latch built
// from two NAND gates, the four-reaction D latch, and the master-slave
// flip-flop composed from two D latches.

#include "crn.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace crnc {

/// Perturbation bounds: input (d1), measurement (d2), initial state (d3) and
/// rate constant (d4), plus the satisfaction tolerance (defaults to d1).
struct DeltaVector {
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
    double d4 = 0.0;
    std::optional<double> eps;

    [[nodiscard]] double epsilon() const { return eps.value_or(d1); }

    /// d2 + d3 < d1 < 1/25 and d2 + d3 < 1/100, all strictly positive.
    [[nodiscard]] bool in_guaranteed_region() const { return precondition_failures().empty(); }

    [[nodiscard]] std::vector<std::string> precondition_failures() const
    {
        std::vector<std::string> out;
        if (!(d1 > 0 && d2 > 0 && d3 > 0 && d4 > 0)) out.emplace_back("all deltas must be strictly positive");
        if (!(d2 + d3 < d1)) out.emplace_back("d2 + d3 < d1 violated");
        if (!(d1 < 1.0 / 25.0)) out.emplace_back("d1 < 1/25 violated");
        if (!(d2 + d3 < 1.0 / 100.0)) out.emplace_back("d2 + d3 < 1/100 violated");
        return out;
    }

    /// Same shape with every perturbation magnitude multiplied by `f`; the
    /// tolerance is pinned at its current value.
    [[nodiscard]] DeltaVector scaled(double f) const { return {d1 * f, d2 * f, d3 * f, d4 * f, epsilon()}; }

    void validate() const
    {
        for (double d : {d1, d2, d3, d4})
            if (!(d >= 0.0) || !std::isfinite(d)) throw CrnError("deltas must be finite and nonnegative");
        if (eps && !(*eps > 0.0)) throw CrnError("eps must be positive");
    }

    /// Parses "d1,d2,d3,d4".
    static DeltaVector parse(const std::string& text)
    {
        std::vector<double> v;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(item, &used));
                if (used != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw CrnError("bad delta component '" + item + "'");
            }
        }
        if (v.size() != 4) throw CrnError("expected four comma-separated deltas, got '" + text + "'");
        DeltaVector d{v[0], v[1], v[2], v[3], std::nullopt};
        d.validate();
        return d;
    }

    friend bool operator==(const DeltaVector&, const DeltaVector&) = default;
};

struct GateParams {
    DeltaVector delta;
    double tau = 1.0;

    void validate() const
    {
        delta.validate();
        if (!(tau > 0.0) || !std::isfinite(tau)) throw CrnError("propagation delay must be positive");
    }

    [[nodiscard]] GateParams with_delay(double t) const { return {delta, t}; }
};

/// k = 100·d4 + 13/τ.
inline double rate_constant(const GateParams& p)
{
    p.validate();
    return 100.0 * p.delta.d4 + 13.0 / p.tau;
}

enum class GateKind { nand, sr_latch, d_latch, circuit, flip_flop };

inline const char* to_string(GateKind k)
{
    switch (k) {
    case GateKind::nand: return "nand";
    case GateKind::sr_latch: return "sr";
    case GateKind::d_latch: return "dlatch";
    case GateKind::circuit: return "circuit";
    case GateKind::flip_flop: return "dff";
    }
    return "?";
}

struct GateInstance {
    GateKind kind = GateKind::nand;
    IoCrn crn;
    State canonical_x0;
    std::vector<WireRef> inputs;
    std::vector<WireRef> outputs; ///< observed wires; V is their rails in order
    double k = 0.0;               ///< per-gate base rate constant
    std::vector<std::string> notes;

    /// Observed species V: (rail, dual rail) for each output wire.
    [[nodiscard]] std::vector<Species> observed() const
    {
        std::vector<Species> v;
        for (const auto& w : outputs) {
            v.push_back(w.rail());
            v.push_back(w.dual_rail());
        }
        return v;
    }

    /// Input wires in signal order (positive rail names).
    [[nodiscard]] std::vector<std::string> input_wires() const
    {
        std::vector<std::string> w;
        for (const auto& r : inputs) w.push_back(r.wire);
        return w;
    }
};

/// Every (W, W_bar) pair among the state species.
inline std::vector<std::pair<Species, Species>> rail_pairs(const IoCrn& crn)
{
    std::vector<std::pair<Species, Species>> out;
    for (const auto& s : crn.states)
        if (!is_dual_rail(s) && crn.states.contains(dual_of(s))) out.emplace_back(s, dual_of(s));
    return out;
}

/// Replaces the canonical initial state, requiring rail sum 1 per output pair.
inline GateInstance with_initial_state(GateInstance g, const State& x0)
{
    for (const auto& [s, v] : x0) {
        if (!g.crn.states.contains(s)) throw CrnError("initial state names non-state species '" + s + "'");
        if (!(v >= 0.0)) throw CrnError("initial concentration of '" + s + "' is negative");
    }
    for (const auto& [a, b] : rail_pairs(g.crn)) {
        const double sa = x0.contains(a) ? x0.at(a) : 0.0;
        const double sb = x0.contains(b) ? x0.at(b) : 0.0;
        if (std::abs(sa + sb - 1.0) > 1e-12)
            throw CrnError("initial state must satisfy " + a + " + " + b + " = 1");
    }
    g.canonical_x0 = x0;
    return g;
}

namespace detail {

inline void require_distinct(std::initializer_list<const WireRef*> ws, const char* what)
{
    std::set<std::string> seen;
    for (const auto* w : ws)
        if (!seen.insert(w->wire).second)
            throw CrnError(std::string(what) + ": wire name '" + w->wire + "' used twice");
    for (const auto* w : ws)
        if (w->wire.empty() || is_dual_rail(w->wire))
            throw CrnError(std::string(what) + ": invalid wire name '" + w->wire + "'");
}

} // namespace detail

/// NAND gate on rails x1, x2 writing the pair (y, ~y):
///   X1 + X2 + Y   -k->  X1 + X2 + Y'
///   X1' + Y'      -k->  X1' + Y
///   X2' + Y'      -k->  X2' + Y
///   2Y + Y'       -3k-> 3Y
///   2Y' + Y       -3k-> 3Y'
/// where ' denotes the dual rail and k = 100·d4 + 13/τ.
inline GateInstance build_nand(const WireRef& x1, const WireRef& x2, const WireRef& y, const GateParams& params)
{
    detail::require_distinct({&x1, &x2, &y}, "build_nand");
    const double k = rate_constant(params);
    const Species X1 = x1.rail(), X1b = x1.dual_rail();
    const Species X2 = x2.rail(), X2b = x2.dual_rail();
    const Species Y = y.rail(), Yb = y.dual_rail();

    GateInstance g;
    g.kind = GateKind::nand;
    g.k = k;
    g.inputs = {x1, x2};
    g.outputs = {y};
    g.crn.inputs = {X1, X1b, X2, X2b};
    g.crn.states = {Y, Yb};
    g.crn.reactions = {
        {{{X1, 1}, {X2, 1}, {Y, 1}}, {{X1, 1}, {X2, 1}, {Yb, 1}}, k},
        {{{X1b, 1}, {Yb, 1}}, {{X1b, 1}, {Y, 1}}, k},
        {{{X2b, 1}, {Yb, 1}}, {{X2b, 1}, {Y, 1}}, k},
        {{{Y, 2}, {Yb, 1}}, {{Y, 3}}, 3.0 * k},
        {{{Yb, 2}, {Y, 1}}, {{Yb, 3}}, 3.0 * k},
    };
    g.canonical_x0 = {{Y, 1.0}, {Yb, 0.0}};
    require_valid(g.crn, "NAND gate");
    return g;
}

/// Cross-coupled pair NAND_{τ/2}(S̄, Q̄2 -> Q1) ⊔ NAND_{τ/2}(R̄, Q1 -> Q̄2).
/// `sbar`/`rbar` select the active-low input rails, `q1` the first output rail
/// and `q2bar` the second gate's output rail. Both Q1 and Q2 are observed.
inline GateInstance build_sr_latch(const WireRef& sbar, const WireRef& rbar, const WireRef& q1,
                                   const WireRef& q2bar, const GateParams& params)
{
    detail::require_distinct({&sbar, &rbar, &q1, &q2bar}, "build_sr_latch");
    const GateParams half = params.with_delay(params.tau / 2.0);
    const GateInstance n1 = build_nand(sbar, q2bar, q1, half);
    const GateInstance n2 = build_nand(rbar, q1, q2bar, half);
    JoinResult j = join_checked(n1.crn, n2.crn);
    if (!j.modular) throw CrnError("build_sr_latch: gates share state species");

    GateInstance g;
    g.kind = GateKind::sr_latch;
    g.k = n1.k;
    g.crn = std::move(j.crn);
    g.inputs = {sbar, rbar};
    g.outputs = {q1, ~q2bar};
    g.canonical_x0 = n1.canonical_x0;
    g.canonical_x0.insert(n2.canonical_x0.begin(), n2.canonical_x0.end());
    return g;
}

/// Four-reaction D latch with k = 100·d4 + 13/τ:
///   D + E + Q'   -k->  D + E + Q
///   D' + E + Q   -k->  D' + E + Q'
///   2Q + Q'      -3k-> 3Q
///   2Q' + Q      -3k-> 3Q'
inline GateInstance build_d_latch(const WireRef& d, const WireRef& e, const WireRef& q, const GateParams& params)
{
    detail::require_distinct({&d, &e, &q}, "build_d_latch");
    const double k = rate_constant(params);
    const Species D = d.rail(), Db = d.dual_rail();
    const Species E = e.rail(), Eb = e.dual_rail();
    const Species Q = q.rail(), Qb = q.dual_rail();

    GateInstance g;
    g.kind = GateKind::d_latch;
    g.k = k;
    g.inputs = {d, e};
    g.outputs = {q};
    g.crn.inputs = {D, Db, E, Eb};
    g.crn.states = {Q, Qb};
    g.crn.reactions = {
        {{{D, 1}, {E, 1}, {Qb, 1}}, {{D, 1}, {E, 1}, {Q, 1}}, k},
        {{{Db, 1}, {E, 1}, {Q, 1}}, {{Db, 1}, {E, 1}, {Qb, 1}}, k},
        {{{Q, 2}, {Qb, 1}}, {{Q, 3}}, 3.0 * k},
        {{{Qb, 2}, {Q, 1}}, {{Qb, 3}}, 3.0 * k},
    };
    g.canonical_x0 = {{Q, 1.0}, {Qb, 0.0}};
    g.notes.push_back("input '" + Eb + "' is declared but read by no reaction");
    require_valid(g.crn, "D latch");
    return g;
}

/// Negative-edge-triggered master-slave flip-flop: DL(d, clk -> m) ⊔ DL(m, ~clk -> q),
/// each latch with delay τ. The master output wire is named `<q>_m`.
inline GateInstance build_d_flip_flop(const WireRef& d, const WireRef& clk, const WireRef& q,
                                      const GateParams& params)
{
    detail::require_distinct({&d, &clk, &q}, "build_d_flip_flop");
    const WireRef m = wire(q.wire + "_m");
    if (m.wire == d.wire || m.wire == clk.wire) throw CrnError("build_d_flip_flop: master wire name collides");
    const GateInstance master = build_d_latch(d, clk, m, params);
    const GateInstance slave = build_d_latch(m, ~clk, q, params);
    JoinResult j = join_checked(master.crn, slave.crn);
    if (!j.modular) throw CrnError("build_d_flip_flop: latches share state species");

    GateInstance g;
    g.kind = GateKind::flip_flop;
    g.k = master.k;
    g.crn = std::move(j.crn);
    g.inputs = {d, clk};
    g.outputs = {q};
    g.canonical_x0 = master.canonical_x0;
    g.canonical_x0.insert(slave.canonical_x0.begin(), slave.canonical_x0.end());
    g.notes.push_back("master output wire '" + m.wire + "' is internal");
    return g;
}

} // namespace crnc
