#pragma once

// Canonical demo schedules for the NAND gate, XOR, SR latch, D latch and the
// master-slave flip-flop.

#include "compiler.hpp"
#include "constructions.hpp"
#include "netlist.hpp"
#include "verification.hpp"

#include <cstdio>
#include <string>
#include <vector>

namespace crnc {

struct Scenario {
    std::string name;
    SweepTarget target;
    double tau = 1.0;
    std::optional<Netlist> netlist;
};

/// Back-to-back segments of the given lengths (in units of τ) with ramp τ/10.
inline BitSchedule make_schedule(double tau, const std::vector<std::pair<double, std::map<std::string, int>>>& steps)
{
    BitSchedule s;
    s.ramp_width = tau / 10.0;
    double t = 0.0;
    for (const auto& [len, bits] : steps) {
        s.segments.push_back({t, t + len * tau, bits});
        t += len * tau;
    }
    return s;
}

inline const char* xor_netlist_text()
{
    return "INPUTS X1 X2\n"
           "OUTPUTS Y\n"
           "Z1 = NAND(~X1, X2)\n"
           "Z2 = NAND(X1, ~X2)\n"
           "Y = NAND(Z1, Z2)\n";
}

/// All four input pairs, 3τ each, starting from X1=X2=1 so the output must switch.
inline Scenario nand_scenario(const GateParams& p)
{
    Scenario sc{"nand", {}, p.tau, std::nullopt};
    sc.target.gate = build_nand(wire("X1"), wire("X2"), wire("Y"), p);
    sc.target.schedule = make_schedule(p.tau, {{3, {{"X1", 1}, {"X2", 1}}},
                                               {3, {{"X1", 1}, {"X2", 0}}},
                                               {3, {{"X1", 0}, {"X2", 0}}},
                                               {3, {{"X1", 0}, {"X2", 1}}}});
    sc.target.intervals =
        derive_intervals(nand_requirement(wire("X1"), wire("X2"), wire("Y")), sc.target.schedule, p.tau);
    return sc;
}

/// Compiles `nl` and drives every input vector for 3τ, in Gray-code order.
inline Scenario circuit_scenario(const Netlist& nl, const GateParams& p, std::string name = "circuit")
{
    Scenario sc{std::move(name), {}, p.tau, nl};
    sc.target.gate = compile(nl, p).instance();
    const std::size_t n = nl.inputs.size();
    std::vector<std::pair<double, std::map<std::string, int>>> steps;
    for (std::uint64_t i = 0; i < (1ULL << n); ++i) {
        const std::uint64_t g = i ^ (i >> 1);
        std::map<std::string, int> bits;
        for (std::size_t k = 0; k < n; ++k) bits[nl.inputs[k]] = static_cast<int>((g >> (n - 1 - k)) & 1U);
        steps.emplace_back(3.0, std::move(bits));
    }
    if (steps.empty()) steps.emplace_back(3.0, std::map<std::string, int>{});
    sc.target.schedule = make_schedule(p.tau, steps);
    sc.target.intervals = derive_intervals(circuit_requirement(nl), sc.target.schedule, p.tau);
    return sc;
}

inline Scenario xor_scenario(const GateParams& p)
{
    return circuit_scenario(parse_netlist_or_throw(xor_netlist_text()), p, "xor");
}

/// Set for 2τ, hold to 8τ, reset for 2τ, hold to 16τ. S and R are active high;
/// the gates read their dual rails.
inline Scenario sr_scenario(const GateParams& p)
{
    Scenario sc{"sr", {}, p.tau, std::nullopt};
    const WireRef sbar = ~wire("S"), rbar = ~wire("R"), q1 = wire("Q1"), q2bar = ~wire("Q2");
    sc.target.gate = build_sr_latch(sbar, rbar, q1, q2bar, p);
    sc.target.schedule = make_schedule(p.tau, {{2, {{"S", 1}, {"R", 0}}},
                                               {6, {{"S", 0}, {"R", 0}}},
                                               {2, {{"S", 0}, {"R", 1}}},
                                               {6, {{"S", 0}, {"R", 0}}}});
    sc.target.intervals = derive_intervals(sr_requirement(sbar, rbar, q1, ~q2bar), sc.target.schedule, p.tau);
    return sc;
}

/// Transparent phases follow D; the opaque phase toggles D while E=0.
inline Scenario dlatch_scenario(const GateParams& p)
{
    Scenario sc{"dlatch", {}, p.tau, std::nullopt};
    sc.target.gate = build_d_latch(wire("D"), wire("E"), wire("Q"), p);
    sc.target.schedule = make_schedule(p.tau, {{2, {{"D", 1}, {"E", 1}}},
                                               {2, {{"D", 0}, {"E", 1}}},
                                               {2, {{"D", 1}, {"E", 1}}},
                                               {2, {{"D", 1}, {"E", 0}}},
                                               {2, {{"D", 0}, {"E", 0}}},
                                               {2, {{"D", 1}, {"E", 0}}},
                                               {2, {{"D", 0}, {"E", 0}}},
                                               {3, {{"D", 0}, {"E", 1}}}});
    sc.target.intervals =
        derive_intervals(dlatch_requirement(wire("D"), wire("E"), wire("Q")), sc.target.schedule, p.tau);
    return sc;
}

namespace detail {

inline std::string short_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

} // namespace detail

/// Flip-flop windows: Q holds its initial value until the first falling clock
/// edge, and after each falling edge at f it must show the D value sampled at f
/// from f + τ until the next falling edge (or the end).
inline std::vector<IntervalSpec> dff_windows(const BitSchedule& s, const std::string& d, const std::string& clk,
                                             const Species& q, int q_initial, double tau)
{
    std::vector<double> falls;
    std::vector<int> sampled;
    for (std::size_t i = 1; i < s.segments.size(); ++i)
        if (s.segments[i - 1].bits.at(clk) == 1 && s.segments[i].bits.at(clk) == 0) {
            falls.push_back(s.segments[i].start);
            sampled.push_back(s.segments[i - 1].bits.at(d));
        }
    std::vector<IntervalSpec> out;
    const double first = falls.empty() ? s.end() : falls.front();
    out.push_back({0.0, first, "initial", {{q, q_initial}}, 0.0});
    for (std::size_t i = 0; i < falls.size(); ++i) {
        const double hi = i + 1 < falls.size() ? falls[i + 1] : s.end();
        out.push_back({falls[i], hi, "edge@" + detail::short_number(falls[i]), {{q, sampled[i]}}, tau});
    }
    return out;
}

/// Clock high 2τ / low 2τ (with some 1τ low phases where D changes); D is
/// stable for at least τ before every falling edge.
inline Scenario dff_scenario(const GateParams& p)
{
    Scenario sc{"dff", {}, p.tau, std::nullopt};
    sc.target.gate = build_d_flip_flop(wire("D"), wire("CLK"), wire("Q"), p);
    sc.target.schedule = make_schedule(p.tau, {{2, {{"D", 0}, {"CLK", 1}}},
                                               {2, {{"D", 0}, {"CLK", 0}}},
                                               {1, {{"D", 1}, {"CLK", 0}}},
                                               {2, {{"D", 1}, {"CLK", 1}}},
                                               {2, {{"D", 1}, {"CLK", 0}}},
                                               {1, {{"D", 0}, {"CLK", 0}}},
                                               {2, {{"D", 0}, {"CLK", 1}}},
                                               {2, {{"D", 0}, {"CLK", 0}}},
                                               {2, {{"D", 1}, {"CLK", 1}}},
                                               {2, {{"D", 1}, {"CLK", 0}}}});
    sc.target.intervals = dff_windows(sc.target.schedule, "D", "CLK", "Q", 1, p.tau);
    return sc;
}

inline std::vector<std::string> scenario_names() { return {"nand", "xor", "sr", "dlatch", "dff"}; }

inline Scenario make_scenario(const std::string& name, const GateParams& p)
{
    if (name == "nand") return nand_scenario(p);
    if (name == "xor") return xor_scenario(p);
    if (name == "sr") return sr_scenario(p);
    if (name == "dlatch") return dlatch_scenario(p);
    if (name == "dff") return dff_scenario(p);
    throw CrnError("unknown scenario '" + name + "'");
}

} // namespace crnc
