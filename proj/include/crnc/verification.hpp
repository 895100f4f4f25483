#pragma once

// Requirements as (input condition, expected outputs) clauses, interval
// derivation from bit schedules, ε-satisfaction checks on measured outputs and
// the perturbation sweep.

#include "compiler.hpp"
#include "constructions.hpp"
#include "kinetics.hpp"
#include "netlist.hpp"
#include "rng.hpp"
#include "signal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

namespace crnc {

class VerificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Wire values over one schedule piece; -1 marks a wire that is changing.
using PieceBits = std::map<std::string, int>;

inline bool holds(const PieceBits& bits, const WireRef& r, int a)
{
    auto it = bits.find(r.wire);
    if (it == bits.end() || it->second < 0) return false;
    return (r.negated ? 1 - it->second : it->second) == a;
}

/// P must hold on [t1, t1+τ] and Q on [t1+τ, t2]; P implies Q.
struct InputCondition {
    std::string tag;
    std::function<bool(const PieceBits&)> P;
    std::function<bool(const PieceBits&)> Q;
};

struct Clause {
    InputCondition cond;
    std::map<Species, int> expected; ///< rail -> bit; the partner rail carries the complement
};

struct Requirement {
    std::string name;
    std::vector<Clause> clauses;
};

inline InputCondition pointwise(std::string tag, std::function<bool(const PieceBits&)> p)
{
    return {std::move(tag), p, p};
}

inline Requirement nand_requirement(const WireRef& x1, const WireRef& x2, const WireRef& y)
{
    Requirement r{"nand", {}};
    r.clauses.push_back({pointwise("phi11", [=](const PieceBits& b) { return holds(b, x1, 1) && holds(b, x2, 1); }),
                         {{y.rail(), 0}}});
    r.clauses.push_back({pointwise("phi0", [=](const PieceBits& b) { return holds(b, x1, 0) || holds(b, x2, 0); }),
                         {{y.rail(), 1}}});
    return r;
}

inline std::string bit_string(const std::vector<int>& w)
{
    std::string s;
    for (int b : w) s += b ? '1' : '0';
    return s;
}

/// One clause per input vector w: inputs held at w, outputs at C(w).
inline Requirement circuit_requirement(const Netlist& nl)
{
    Requirement r{"circuit", {}};
    const std::size_t n = nl.inputs.size();
    for (std::uint64_t m = 0; m < (1ULL << n); ++m) {
        std::vector<int> w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<int>((m >> (n - 1 - i)) & 1U);
        const auto out = eval_boolean(nl, w);
        std::map<Species, int> exp;
        for (std::size_t j = 0; j < nl.outputs.size(); ++j) exp[nl.outputs[j]] = out[j];
        auto inputs = nl.inputs;
        r.clauses.push_back({pointwise("phi_" + bit_string(w),
                                       [inputs, w](const PieceBits& b) {
                                           for (std::size_t i = 0; i < inputs.size(); ++i)
                                               if (!holds(b, wire(inputs[i]), w[i])) return false;
                                           return true;
                                       }),
                             std::move(exp)});
    }
    return r;
}

/// Set: S̄=0 ∧ R̄=1 for τ, then R̄=1; expects Q1=1 ∧ Q2=1. Reset is symmetric.
inline Requirement sr_requirement(const WireRef& sbar, const WireRef& rbar, const WireRef& q1, const WireRef& q2)
{
    Requirement r{"sr", {}};
    r.clauses.push_back({{"set", [=](const PieceBits& b) { return holds(b, sbar, 0) && holds(b, rbar, 1); },
                          [=](const PieceBits& b) { return holds(b, rbar, 1); }},
                         {{q1.rail(), 1}, {q2.rail(), 1}}});
    r.clauses.push_back({{"reset", [=](const PieceBits& b) { return holds(b, rbar, 0) && holds(b, sbar, 1); },
                          [=](const PieceBits& b) { return holds(b, sbar, 1); }},
                         {{q1.rail(), 0}, {q2.rail(), 0}}});
    return r;
}

/// φ_a: D=a ∧ E=1 for τ, then D=a ∨ E=0; expects Q=a.
inline Requirement dlatch_requirement(const WireRef& d, const WireRef& e, const WireRef& q)
{
    Requirement r{"dlatch", {}};
    for (int a : {0, 1})
        r.clauses.push_back({{"phi_" + std::to_string(a),
                              [=](const PieceBits& b) { return holds(b, d, a) && holds(b, e, 1); },
                              [=](const PieceBits& b) { return holds(b, d, a) || holds(b, e, 0); }},
                             {{q.rail(), a}}});
    return r;
}

struct IntervalSpec {
    double t1 = 0.0;
    double t2 = 0.0;
    std::string tag;
    std::map<Species, int> expected;
    std::optional<double> settle; ///< window starts at t1 + settle (default τ)

    [[nodiscard]] Interval window(double tau) const { return {t1 + settle.value_or(tau), t2}; }
};

struct SchedulePiece {
    double lo, hi;
    PieceBits bits;
};

/// Splits [0, end] into ramp and steady pieces with the wire values in each.
inline std::vector<SchedulePiece> schedule_pieces(const BitSchedule& s)
{
    std::vector<SchedulePiece> out;
    if (s.segments.empty()) return out;
    auto steady = [](const ScheduleSegment& seg) { return PieceBits(seg.bits.begin(), seg.bits.end()); };
    if (s.segments.front().start > 0.0) out.push_back({0.0, s.segments.front().start, steady(s.segments.front())});
    for (std::size_t i = 0; i < s.segments.size(); ++i) {
        const auto& seg = s.segments[i];
        if (i > 0) {
            const auto& prev = s.segments[i - 1];
            if (seg.start > prev.end) out.push_back({prev.end, seg.start, steady(prev)});
            PieceBits ramp;
            for (const auto& [w, b] : seg.bits) {
                auto it = prev.bits.find(w);
                ramp[w] = (it != prev.bits.end() && it->second == b) ? b : -1;
            }
            out.push_back({seg.start, seg.start + s.ramp_width, std::move(ramp)});
            out.push_back({seg.start + s.ramp_width, seg.end, steady(seg)});
        } else {
            out.push_back({seg.start, seg.end, steady(seg)});
        }
    }
    return out;
}

namespace detail {

inline std::vector<Interval> runs(const std::vector<SchedulePiece>& pieces,
                                  const std::function<bool(const PieceBits&)>& pred)
{
    std::vector<Interval> out;
    for (const auto& pc : pieces) {
        if (!pred(pc.bits)) continue;
        if (!out.empty() && std::abs(out.back().hi - pc.lo) < 1e-12)
            out.back().hi = pc.hi;
        else
            out.push_back({pc.lo, pc.hi});
    }
    return out;
}

} // namespace detail

/// For every maximal run [q1, q2] of Q, the earliest t1 with P on [t1, t1+τ]
/// gives the strongest checked interval [t1, q2]; every other admissible
/// interval inside that run has a window contained in [t1+τ, q2].
inline std::vector<IntervalSpec> derive_intervals(const Requirement& req, const BitSchedule& sched, double tau)
{
    const auto pieces = schedule_pieces(sched);
    std::vector<IntervalSpec> out;
    for (const auto& cl : req.clauses) {
        const auto qruns = detail::runs(pieces, cl.cond.Q);
        const auto pruns = detail::runs(pieces, cl.cond.P);
        for (const auto& q : qruns) {
            for (const auto& p : pruns) {
                if (p.lo < q.lo - 1e-12 || p.hi > q.hi + 1e-12) continue;
                if (p.length() + 1e-12 < tau || q.hi - p.lo + 1e-12 < tau) continue;
                out.push_back({p.lo, q.hi, cl.cond.tag, cl.expected, std::nullopt});
                break;
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const IntervalSpec& a, const IntervalSpec& b) { return a.t1 < b.t1; });
    return out;
}

struct IntervalResult {
    IntervalSpec spec;
    double distance = 0.0;   ///< sup over the window of the Euclidean distance
    double worst_time = 0.0;
    double margin = 0.0;     ///< ε - distance
    bool pass = false;
};

struct TrialResult {
    int index = 0;
    bool simulated = false;
    std::string error;
    double margin = std::numeric_limits<double>::infinity();
    bool pass = false;
    std::vector<IntervalResult> intervals;
    bool rates_capped = false;
    double conservation_error = 0.0; ///< max |rail sum - initial rail sum| over the horizon
    std::optional<Trace> trace;
};

struct VerificationReport {
    double eps = 0.0;
    double slack = 1e-6;
    double worst_margin = std::numeric_limits<double>::infinity();
    bool pass = true;
    std::vector<IntervalResult> intervals;
    std::vector<TrialResult> trials;
    std::vector<std::string> notes;
    bool preconditions_ok = true;
    std::uint64_t seed = 0;
    int failed_trials = 0;
    int simulation_failures = 0;
};

/// Target encoding of one output coordinate, or nullopt when unconstrained.
inline std::optional<double> expected_value(const std::map<Species, int>& expected, const Species& s)
{
    if (auto it = expected.find(s); it != expected.end()) return static_cast<double>(it->second);
    const Species partner = is_dual_rail(s) ? wire_of(s) : dual_of(s);
    if (auto it = expected.find(partner); it != expected.end()) return 1.0 - it->second;
    return std::nullopt;
}

/// ε-satisfaction on each window [t1+τ, t2]: passes when the sup distance to the
/// exact encoding is at most ε + slack. Outside the windows the measured signal
/// itself serves as the witness.
inline VerificationReport check_requirement(const Signal& output, const std::vector<IntervalSpec>& intervals, double eps,
                                            double tau, double grid_dt, double slack = 1e-6)
{
    VerificationReport rep;
    rep.eps = eps;
    rep.slack = slack;
    const auto& sp = output.species();
    std::vector<double> v(sp.size());
    for (const auto& iv : intervals) {
        if (!iv.settle && iv.t2 - iv.t1 < tau - 1e-9)
            throw VerificationError("interval [" + std::to_string(iv.t1) + ", " + std::to_string(iv.t2) +
                                    "] is shorter than tau");
        if (iv.t2 > output.horizon() + 1e-9)
            throw VerificationError("interval ends at " + std::to_string(iv.t2) + " beyond the trace horizon " +
                                    std::to_string(output.horizon()));
        std::vector<std::size_t> idx;
        std::vector<double> target;
        for (std::size_t i = 0; i < sp.size(); ++i)
            if (auto e = expected_value(iv.expected, sp[i])) {
                idx.push_back(i);
                target.push_back(*e);
            }
        for (const auto& [s, b] : iv.expected)
            if (!output.index_of(s) && !output.index_of(is_dual_rail(s) ? wire_of(s) : dual_of(s)))
                throw VerificationError("expected output '" + s + "' is not observed");

        const Interval win = iv.window(tau);
        IntervalResult r{iv, 0.0, win.lo, 0.0, false};
        std::vector<double> got(idx.size());
        for (double t : sample_grid(win, grid_dt)) {
            output.eval_into(t, v);
            for (std::size_t k = 0; k < idx.size(); ++k) got[k] = v[idx[k]];
            const double dist = euclidean_distance(got, target);
            if (dist > r.distance) {
                r.distance = dist;
                r.worst_time = t;
            }
        }
        r.margin = eps - r.distance;
        r.pass = r.distance <= eps + slack;
        rep.worst_margin = std::min(rep.worst_margin, r.margin);
        rep.pass = rep.pass && r.pass;
        rep.intervals.push_back(std::move(r));
    }
    return rep;
}

/// Largest drift of every (W, W_bar) state pair from its initial total.
inline double conservation_error(const Trace& tr)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.species.size(); ++i) {
        const auto& s = tr.species[i];
        if (is_dual_rail(s)) continue;
        auto j = tr.index_of(dual_of(s));
        if (!j || tr.values.empty()) continue;
        const double p0 = tr.values.front()[i] + tr.values.front()[*j];
        for (const auto& row : tr.values) worst = std::max(worst, std::abs(row[i] + row[*j] - p0));
    }
    return worst;
}

/// What a sweep runs against: a network, its wiring and the schedule driving it.
struct SweepTarget {
    GateInstance gate;
    BitSchedule schedule;
    std::vector<IntervalSpec> intervals;
};

struct SweepConfig {
    DeltaVector delta;
    double tau = 1.0;
    int trials = 1;
    std::uint64_t seed = 0;
    NoiseKind noise = NoiseKind::sinusoidal;
    std::optional<SimConfig> sim; ///< defaults to SimConfig::for_delay(tau, schedule end)
    double slack = 1e-6;
    unsigned threads = 0; ///< 0: hardware concurrency, capped by CRNC_THREADS
    bool keep_traces = false;
    double rate_freq_min = 0.5;
    double rate_freq_max = 5.0;
};

/// One sampled perturbation tuple.
struct Perturbation {
    Signal input;
    TdIoCrn crn;
    State x0;
    NoiseSpec measurement;
    bool rates_capped = false;
};

inline unsigned sweep_threads(unsigned requested)
{
    unsigned n = requested ? requested : std::max(1U, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CRNC_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
    }
    return std::max(1U, n);
}

/// Samples trial `trial`: input noise in the δ1 ball, sinusoidal rate drift of
/// amplitude δ4 per reaction, an initial offset on the δ3 sphere and δ2
/// measurement noise. Pure function of (target, cfg, trial).
inline Perturbation sample_perturbation(const SweepTarget& target, const SweepConfig& cfg, int trial)
{
    const auto& g = target.gate;
    const auto& dv = cfg.delta;
    CounterRng rng = CounterRng{cfg.seed, 0x7472}.substream(static_cast<std::uint64_t>(trial));
    Perturbation pt;

    const Signal clean = schedule_to_signal(target.schedule, g.input_wires());
    const NoiseSpec in_noise = NoiseSpec::euclidean_ball(dv.d1, clean.size(), cfg.noise, rng.next_u64());
    pt.input = add_noise(clean, in_noise);

    pt.crn = TdIoCrn{g.crn.inputs, g.crn.states, {}};
    for (const auto& rx : g.crn.reactions) {
        const double omega = rng.uniform(cfg.rate_freq_min, cfg.rate_freq_max) / cfg.tau;
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        double amp = dv.d4;
        if (amp >= rx.k) {
            amp = 0.5 * rx.k;
            pt.rates_capped = true;
        }
        const double k = rx.k;
        if (amp == 0.0)
            pt.crn.reactions.push_back({rx.reactants, rx.products, [k](double) { return k; }});
        else
            pt.crn.reactions.push_back(
                {rx.reactants, rx.products, [k, amp, omega, phi](double t) { return k + amp * std::sin(omega * t + phi); }});
    }

    pt.x0 = g.canonical_x0;
    for (const auto& s : g.crn.states) pt.x0.try_emplace(s, 0.0);
    if (dv.d3 > 0.0) {
        std::vector<double> dir;
        double norm = 0.0;
        for (std::size_t i = 0; i < pt.x0.size(); ++i) {
            dir.push_back(rng.normal());
            norm += dir.back() * dir.back();
        }
        norm = std::sqrt(norm);
        std::size_t i = 0;
        for (auto& [s, v] : pt.x0) v = std::max(0.0, v + (norm > 0 ? dv.d3 * dir[i++] / norm : 0.0));
    }

    pt.measurement = NoiseSpec::euclidean_ball(dv.d2, g.observed().size(), cfg.noise, rng.next_u64());
    return pt;
}

inline TrialResult run_trial(const SweepTarget& target, const SweepConfig& cfg, int trial)
{
    TrialResult tr;
    tr.index = trial;
    try {
        Perturbation pt = sample_perturbation(target, cfg, trial);
        tr.rates_capped = pt.rates_capped;
        const SimConfig sim = cfg.sim.value_or(SimConfig::for_delay(cfg.tau, target.schedule.end()));
        Trace trace = simulate(pt.crn, pt.x0, pt.input, sim);
        tr.simulated = true;
        tr.conservation_error = conservation_error(trace);
        const Signal out = measure(trace, Context{pt.input, target.gate.observed()}, pt.measurement);
        const auto rep =
            check_requirement(out, target.intervals, cfg.delta.epsilon(), cfg.tau, sim.output_dt, cfg.slack);
        tr.intervals = rep.intervals;
        tr.margin = rep.worst_margin;
        tr.pass = rep.pass;
        if (cfg.keep_traces) tr.trace = std::move(trace);
    } catch (const SimulationError& e) {
        tr.error = e.what();
    }
    return tr;
}

/// Runs `cfg.trials` independently perturbed simulations and aggregates the
/// worst margin. Precondition violations are reported, not fatal.
inline VerificationReport robust_sweep(const SweepTarget& target, const SweepConfig& cfg)
{
    if (cfg.trials < 1) throw VerificationError("trials must be at least 1");
    if (!(cfg.tau > 0.0)) throw VerificationError("tau must be positive");
    cfg.delta.validate();
    target.schedule.validate(target.gate.input_wires());

    VerificationReport rep;
    rep.eps = cfg.delta.epsilon();
    rep.slack = cfg.slack;
    rep.seed = cfg.seed;
    for (const auto& f : cfg.delta.precondition_failures()) {
        rep.preconditions_ok = false;
        rep.notes.push_back("precondition: " + f);
    }
    for (const auto& n : target.gate.notes) rep.notes.push_back(n);

    rep.trials.resize(static_cast<std::size_t>(cfg.trials));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < cfg.trials; i = next++) rep.trials[static_cast<std::size_t>(i)] = run_trial(target, cfg, i);
    };
    const unsigned n = std::min<unsigned>(sweep_threads(cfg.threads), static_cast<unsigned>(cfg.trials));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    bool capped = false;
    for (const auto& t : rep.trials) {
        capped = capped || t.rates_capped;
        if (!t.simulated) {
            ++rep.simulation_failures;
            rep.pass = false;
            continue;
        }
        if (!t.pass) ++rep.failed_trials;
        rep.pass = rep.pass && t.pass;
        rep.worst_margin = std::min(rep.worst_margin, t.margin);
    }
    if (capped) rep.notes.push_back("rate drift amplitude capped at k/2 where d4 >= k");
    if (!rep.trials.empty()) rep.intervals = rep.trials.front().intervals;
    return rep;
}

/// Unperturbed run from the canonical state, checked against the intervals.
inline VerificationReport verify_nominal(const SweepTarget& target, double tau, double eps,
                                         std::optional<SimConfig> sim = std::nullopt, double slack = 1e-6)
{
    SweepConfig cfg;
    cfg.delta = {0, 0, 0, 0, eps};
    cfg.tau = tau;
    cfg.noise = NoiseKind::none;
    cfg.sim = sim;
    cfg.slack = slack;
    cfg.threads = 1;
    return robust_sweep(target, cfg);
}

} // namespace crnc
