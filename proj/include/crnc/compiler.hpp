#pragma once

// Netlist to I/O CRN: one NAND gate per netlist gate, each with delay τ/d,
// joined in topological order.

#include "constructions.hpp"
#include "netlist.hpp"

#include <map>
#include <string>
#include <vector>

namespace crnc {

struct CompiledCircuit {
    Netlist netlist;
    IoCrn crn;
    int depth = 0;
    double gate_tau = 0.0;
    GateParams params;
    State canonical_x0;
    std::map<std::string, std::vector<std::size_t>> reactions_of; ///< gate output wire -> reaction indices

    /// The circuit as a generic instance observing every primary output.
    [[nodiscard]] GateInstance instance() const
    {
        GateInstance g;
        g.kind = GateKind::circuit;
        g.crn = crn;
        g.canonical_x0 = canonical_x0;
        for (const auto& w : netlist.inputs) g.inputs.push_back(wire(w));
        for (const auto& w : netlist.outputs) g.outputs.push_back(wire(w));
        g.k = netlist.gates.empty() ? 0.0 : rate_constant(params.with_delay(gate_tau));
        return g;
    }
};

inline CompiledCircuit compile(const Netlist& nl, const GateParams& params)
{
    params.validate();
    CompiledCircuit cc;
    cc.netlist = nl;
    cc.params = params;
    cc.depth = depth(nl);
    const int d = std::max(1, cc.depth);
    cc.gate_tau = params.tau / d;

    for (const auto& w : nl.inputs) {
        cc.crn.inputs.insert(w);
        cc.crn.inputs.insert(dual_of(w));
    }
    const GateParams gp = params.with_delay(cc.gate_tau);
    for (const auto& g : nl.gates) {
        const GateInstance n = build_nand(g.a, g.b, wire(g.out), gp);
        const std::size_t before = cc.crn.reactions.size();
        JoinResult j = join_checked(cc.crn, n.crn);
        if (!j.modular) throw CrnError("compile: gate '" + g.out + "' shares state species with another gate");
        cc.crn = std::move(j.crn);
        auto& idx = cc.reactions_of[g.out];
        for (std::size_t i = before; i < cc.crn.reactions.size(); ++i) idx.push_back(i);
        cc.canonical_x0.insert(n.canonical_x0.begin(), n.canonical_x0.end());
    }
    return cc;
}

} // namespace crnc
