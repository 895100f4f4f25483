#pragma once

// JSON documents for networks, schedules, noise specs, intervals and reports.

#include "crn.hpp"
#include "signal.hpp"
#include "verification.hpp"

#include "json.hpp"

#include <string>

namespace crnc {

using Json = nlohmann::json;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

template <class T>
T get_field(const Json& j, const char* key, const char* what)
{
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string(what) + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string(what) + ": field '" + key + "': " + e.what());
    }
}

} // namespace detail

inline Json to_json(const IoCrn& crn)
{
    Json rx = Json::array();
    for (const auto& r : crn.reactions)
        rx.push_back({{"reactants", Json(r.reactants)}, {"products", Json(r.products)}, {"k", r.k}});
    return {{"inputs", Json(crn.inputs)}, {"states", Json(crn.states)}, {"reactions", rx}};
}

inline IoCrn crn_from_json(const Json& j)
{
    IoCrn crn;
    crn.inputs = detail::get_field<SpeciesSet>(j, "inputs", "crn");
    crn.states = detail::get_field<SpeciesSet>(j, "states", "crn");
    const auto rx = detail::get_field<Json>(j, "reactions", "crn");
    if (!rx.is_array()) throw FormatError("crn: 'reactions' must be an array");
    for (const auto& r : rx)
        crn.reactions.push_back({detail::get_field<Multiset>(r, "reactants", "reaction"),
                                 detail::get_field<Multiset>(r, "products", "reaction"),
                                 detail::get_field<double>(r, "k", "reaction")});
    require_valid(crn, "crn document");
    return crn;
}

inline Json to_json(const BitSchedule& s)
{
    Json segs = Json::array();
    for (const auto& seg : s.segments) segs.push_back({{"start", seg.start}, {"end", seg.end}, {"bits", Json(seg.bits)}});
    return {{"ramp_width", s.ramp_width}, {"segments", segs}};
}

inline BitSchedule schedule_from_json(const Json& j)
{
    BitSchedule s;
    s.ramp_width = detail::get_field<double>(j, "ramp_width", "schedule");
    const auto segs = detail::get_field<Json>(j, "segments", "schedule");
    if (!segs.is_array()) throw FormatError("schedule: 'segments' must be an array");
    for (const auto& seg : segs)
        s.segments.push_back({detail::get_field<double>(seg, "start", "segment"),
                              detail::get_field<double>(seg, "end", "segment"),
                              detail::get_field<std::map<std::string, int>>(seg, "bits", "segment")});
    s.validate(s.wires());
    return s;
}

inline Json to_json(const NoiseSpec& n)
{
    Json terms = Json::array();
    for (const auto& t : n.terms) terms.push_back({{"freq", t.freq}, {"phase", t.phase}, {"amplitude", t.amplitude}});
    return {{"amplitude", n.amplitude}, {"kind", to_string(n.kind)}, {"seed", n.seed}, {"terms", terms},
            {"max_terms", n.max_terms}, {"freq_min", n.freq_min}, {"freq_max", n.freq_max}};
}

inline NoiseSpec noise_from_json(const Json& j)
{
    NoiseSpec n;
    n.amplitude = detail::get_field<double>(j, "amplitude", "noise");
    if (j.contains("kind")) n.kind = parse_noise_kind(j.at("kind").get<std::string>());
    if (j.contains("seed")) n.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("max_terms")) n.max_terms = j.at("max_terms").get<int>();
    if (j.contains("freq_min")) n.freq_min = j.at("freq_min").get<double>();
    if (j.contains("freq_max")) n.freq_max = j.at("freq_max").get<double>();
    if (j.contains("terms"))
        for (const auto& t : j.at("terms"))
            n.terms.push_back({detail::get_field<double>(t, "freq", "noise term"),
                               detail::get_field<double>(t, "phase", "noise term"),
                               detail::get_field<double>(t, "amplitude", "noise term")});
    n.validate();
    return n;
}

inline Json to_json(const IntervalSpec& iv)
{
    Json j = {{"t1", iv.t1}, {"t2", iv.t2}, {"tag", iv.tag}, {"expected", Json(iv.expected)}};
    if (iv.settle) j["settle"] = *iv.settle;
    return j;
}

inline Json to_json(const std::vector<IntervalSpec>& ivs)
{
    Json a = Json::array();
    for (const auto& iv : ivs) a.push_back(to_json(iv));
    return a;
}

inline std::vector<IntervalSpec> intervals_from_json(const Json& j)
{
    if (!j.is_array()) throw FormatError("intervals: expected an array");
    std::vector<IntervalSpec> out;
    for (const auto& e : j) {
        IntervalSpec iv;
        iv.t1 = detail::get_field<double>(e, "t1", "interval");
        iv.t2 = detail::get_field<double>(e, "t2", "interval");
        iv.tag = e.value("tag", std::string{});
        iv.expected = detail::get_field<std::map<Species, int>>(e, "expected", "interval");
        if (e.contains("settle")) iv.settle = e.at("settle").get<double>();
        if (!(iv.t2 > iv.t1)) throw FormatError("interval: t2 must exceed t1");
        out.push_back(std::move(iv));
    }
    return out;
}

inline Json to_json(const IntervalResult& r)
{
    return {{"interval", to_json(r.spec)}, {"distance", r.distance}, {"worst_time", r.worst_time},
            {"margin", r.margin}, {"pass", r.pass}};
}

inline Json to_json(const VerificationReport& rep)
{
    Json ivs = Json::array();
    for (const auto& r : rep.intervals) ivs.push_back(to_json(r));
    Json trials = Json::array();
    for (const auto& t : rep.trials) {
        Json jt = {{"index", t.index}, {"simulated", t.simulated}, {"pass", t.pass},
                   {"conservation_error", t.conservation_error}};
        if (t.simulated) jt["margin"] = t.margin;
        if (!t.error.empty()) jt["error"] = t.error;
        trials.push_back(std::move(jt));
    }
    Json j = {{"pass", rep.pass},
              {"eps", rep.eps},
              {"slack", rep.slack},
              {"seed", rep.seed},
              {"preconditions_ok", rep.preconditions_ok},
              {"failed_trials", rep.failed_trials},
              {"simulation_failures", rep.simulation_failures},
              {"notes", rep.notes},
              {"intervals", ivs},
              {"trials", trials}};
    if (std::isfinite(rep.worst_margin)) j["worst_margin"] = rep.worst_margin;
    return j;
}

} // namespace crnc
