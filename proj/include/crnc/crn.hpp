#pragma once

// Input/output chemical reaction networks: species, reactions, the catalytic
// input constraint, and the join operator.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crnc {

using Species = std::string;
using SpeciesSet = std::set<Species>;
/// Stoichiometry multiset: species -> positive coefficient.
using Multiset = std::map<Species, int>;
/// Concentration vector indexed by species name.
using State = std::map<Species, double>;

inline constexpr std::string_view dual_suffix = "_bar";

/// Dual-rail partner of a species. `W` <-> `W_bar`.
inline Species dual_of(std::string_view name)
{
    if (name.size() > dual_suffix.size() && name.ends_with(dual_suffix))
        return Species(name.substr(0, name.size() - dual_suffix.size()));
    return Species(name) + Species(dual_suffix);
}

/// Name of the logical wire a rail belongs to.
inline std::string wire_of(std::string_view rail)
{
    if (rail.size() > dual_suffix.size() && rail.ends_with(dual_suffix))
        return std::string(rail.substr(0, rail.size() - dual_suffix.size()));
    return std::string(rail);
}

inline bool is_dual_rail(std::string_view name)
{
    return name.size() > dual_suffix.size() && name.ends_with(dual_suffix);
}

/// A reference to a logical wire, optionally selecting its complement.
/// Negation is free in the dual-rail scheme: `~X` just swaps the rails.
struct WireRef {
    std::string wire;
    bool negated = false;

    [[nodiscard]] Species rail() const { return negated ? dual_of(wire) : wire; }
    [[nodiscard]] Species dual_rail() const { return negated ? wire : dual_of(wire); }
    [[nodiscard]] WireRef operator~() const { return {wire, !negated}; }
    [[nodiscard]] std::string str() const { return negated ? "~" + wire : wire; }

    friend bool operator==(const WireRef&, const WireRef&) = default;
};

inline WireRef wire(std::string name) { return {std::move(name), false}; }

struct Reaction {
    Multiset reactants;
    Multiset products;
    double k = 1.0;

    /// p(sp) - r(sp); zero for species absent from the reaction.
    [[nodiscard]] int net_effect(const Species& sp) const
    {
        auto count = [&](const Multiset& m) {
            auto it = m.find(sp);
            return it == m.end() ? 0 : it->second;
        };
        return count(products) - count(reactants);
    }

    [[nodiscard]] SpeciesSet species() const
    {
        SpeciesSet out;
        for (const auto& [s, n] : reactants) out.insert(s);
        for (const auto& [s, n] : products) out.insert(s);
        return out;
    }

    friend bool operator==(const Reaction&, const Reaction&) = default;
};

inline int net_effect(const Reaction& rx, const Species& sp) { return rx.net_effect(sp); }

/// Reaction whose rate constant is a positive function of time.
struct TdReaction {
    Multiset reactants;
    Multiset products;
    std::function<double(double)> rate_fn;

    [[nodiscard]] int net_effect(const Species& sp) const
    {
        auto count = [&](const Multiset& m) {
            auto it = m.find(sp);
            return it == m.end() ? 0 : it->second;
        };
        return count(products) - count(reactants);
    }
};

struct Violation {
    enum class Kind { overlap, input_consumed, unknown_species, bad_reaction };
    Kind kind;
    std::string message;
};

inline const char* to_string(Violation::Kind k)
{
    switch (k) {
    case Violation::Kind::overlap: return "overlap";
    case Violation::Kind::input_consumed: return "input consumed";
    case Violation::Kind::unknown_species: return "unknown species";
    case Violation::Kind::bad_reaction: return "bad reaction";
    }
    return "?";
}

struct IoCrn {
    SpeciesSet inputs;
    SpeciesSet states;
    std::vector<Reaction> reactions;

    friend bool operator==(const IoCrn&, const IoCrn&) = default;
};

struct TdIoCrn {
    SpeciesSet inputs;
    SpeciesSet states;
    std::vector<TdReaction> reactions;
};

namespace detail {

template <class Rx>
std::vector<Violation> validate_parts(const SpeciesSet& inputs, const SpeciesSet& states,
                                      const std::vector<Rx>& reactions)
{
    std::vector<Violation> out;
    for (const auto& s : inputs)
        if (states.contains(s))
            out.push_back({Violation::Kind::overlap, "species '" + s + "' is both input and state"});

    for (std::size_t i = 0; i < reactions.size(); ++i) {
        const auto& rx = reactions[i];
        const std::string where = "reaction #" + std::to_string(i);
        if (rx.reactants == rx.products)
            out.push_back({Violation::Kind::bad_reaction, where + " has identical reactants and products"});
        for (const auto* side : {&rx.reactants, &rx.products})
            for (const auto& [s, n] : *side) {
                if (n <= 0)
                    out.push_back({Violation::Kind::bad_reaction,
                                   where + " has non-positive coefficient for '" + s + "'"});
                if (!inputs.contains(s) && !states.contains(s))
                    out.push_back({Violation::Kind::unknown_species,
                                   where + " uses undeclared species '" + s + "'"});
            }
        for (const auto& u : inputs)
            if (int d = rx.net_effect(u); d != 0)
                out.push_back({Violation::Kind::input_consumed,
                               where + " changes input '" + u + "' by " + std::to_string(d)});
    }
    return out;
}

} // namespace detail

/// Checks U ∩ S = ∅, catalytic inputs, and closure of the species set.
/// Violations are data; an empty result means the network is well formed.
inline std::vector<Violation> validate(const IoCrn& crn)
{
    auto out = detail::validate_parts(crn.inputs, crn.states, crn.reactions);
    for (std::size_t i = 0; i < crn.reactions.size(); ++i)
        if (!(crn.reactions[i].k > 0.0))
            out.push_back({Violation::Kind::bad_reaction,
                           "reaction #" + std::to_string(i) + " has non-positive rate constant"});
    return out;
}

inline std::vector<Violation> validate(const TdIoCrn& crn)
{
    return detail::validate_parts(crn.inputs, crn.states, crn.reactions);
}

class CrnError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string describe(const std::vector<Violation>& vs)
{
    std::string msg;
    for (const auto& v : vs) {
        if (!msg.empty()) msg += "; ";
        msg += std::string(to_string(v.kind)) + ": " + v.message;
    }
    return msg;
}

inline void require_valid(const IoCrn& crn, std::string_view what = "I/O CRN")
{
    if (auto vs = validate(crn); !vs.empty())
        throw CrnError(std::string(what) + " is invalid: " + describe(vs));
}

struct JoinResult {
    IoCrn crn;
    bool modular = false;
    SpeciesSet shared_states;
};

/// U = (U1 ∪ U2) \ (S1 ∪ S2), R = R1 ∪ R2, S = S1 ∪ S2.
/// Throws CrnError when the result breaks the I/O CRN invariants, e.g. when
/// one operand mutates a species the other reads as an input.
inline JoinResult join_checked(const IoCrn& n1, const IoCrn& n2)
{
    JoinResult out;
    auto& j = out.crn;
    j.states = n1.states;
    j.states.insert(n2.states.begin(), n2.states.end());
    for (const auto* u : {&n1.inputs, &n2.inputs})
        for (const auto& s : *u)
            if (!j.states.contains(s)) j.inputs.insert(s);

    j.reactions = n1.reactions;
    for (const auto& rx : n2.reactions)
        if (std::find(j.reactions.begin(), j.reactions.end(), rx) == j.reactions.end())
            j.reactions.push_back(rx);

    std::set_intersection(n1.states.begin(), n1.states.end(), n2.states.begin(), n2.states.end(),
                          std::inserter(out.shared_states, out.shared_states.end()));
    out.modular = out.shared_states.empty();

    require_valid(j, "join");
    return out;
}

inline IoCrn join(const IoCrn& n1, const IoCrn& n2) { return join_checked(n1, n2).crn; }

/// Lifts a static network to the time-dependent model with constant rates.
inline TdIoCrn to_time_dependent(const IoCrn& crn)
{
    TdIoCrn out{crn.inputs, crn.states, {}};
    out.reactions.reserve(crn.reactions.size());
    for (const auto& rx : crn.reactions) {
        const double k = rx.k;
        out.reactions.push_back({rx.reactants, rx.products, [k](double) { return k; }});
    }
    return out;
}

/// Sets of reactions compare as sets: order-insensitive equality of (U, R, S).
inline bool same_network(const IoCrn& a, const IoCrn& b)
{
    if (a.inputs != b.inputs || a.states != b.states || a.reactions.size() != b.reactions.size())
        return false;
    for (const auto& rx : a.reactions)
        if (std::find(b.reactions.begin(), b.reactions.end(), rx) == b.reactions.end()) return false;
    return true;
}

} // namespace crnc
