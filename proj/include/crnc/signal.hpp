#pragma once

// Piecewise-smooth vector-valued signals over named species: dual-rail bit
// schedules, bounded sinusoidal noise, and sup-norm distances.

#include "crn.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace crnc {

class SignalError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double length() const { return hi - lo; }
};

/// Immutable, reentrant evaluator t -> concentration vector, with the times
/// where smoothness may drop registered as breakpoints for the integrator.
class Signal {
public:
    using Evaluator = std::function<void(double, std::span<double>)>;

    Signal() = default;

    Signal(std::vector<Species> species, Evaluator eval, std::vector<double> breakpoints, double horizon)
        : _species{std::move(species)}, _eval{std::move(eval)}, _breakpoints{std::move(breakpoints)},
          _horizon{horizon}
    {
        std::sort(_breakpoints.begin(), _breakpoints.end());
        _breakpoints.erase(std::unique(_breakpoints.begin(), _breakpoints.end()), _breakpoints.end());
    }

    static Signal constant(std::vector<Species> species, std::vector<double> values, double horizon)
    {
        if (species.size() != values.size())
            throw SignalError("constant signal: species/value count mismatch");
        for (double v : values)
            if (!(v >= 0.0)) throw SignalError("constant signal: negative concentration");
        return Signal{std::move(species),
                      [values = std::move(values)](double, std::span<double> out) {
                          std::copy(values.begin(), values.end(), out.begin());
                      },
                      {}, horizon};
    }

    static Signal empty(double horizon) { return constant({}, {}, horizon); }

    /// Piecewise-linear interpolation of samples on a sorted time grid.
    static Signal from_samples(std::vector<Species> species, std::vector<double> times,
                               std::vector<std::vector<double>> rows)
    {
        if (times.size() != rows.size()) throw SignalError("sampled signal: time/row count mismatch");
        for (const auto& r : rows)
            if (r.size() != species.size()) throw SignalError("sampled signal: row width mismatch");
        const double horizon = times.empty() ? 0.0 : times.back();
        auto data = std::make_shared<const std::pair<std::vector<double>, std::vector<std::vector<double>>>>(
            std::move(times), std::move(rows));
        return Signal{std::move(species),
                      [data](double t, std::span<double> out) {
                          const auto& [ts, rs] = *data;
                          if (ts.empty()) {
                              std::fill(out.begin(), out.end(), 0.0);
                              return;
                          }
                          if (t <= ts.front()) {
                              std::copy(rs.front().begin(), rs.front().end(), out.begin());
                              return;
                          }
                          if (t >= ts.back()) {
                              std::copy(rs.back().begin(), rs.back().end(), out.begin());
                              return;
                          }
                          const auto hi = static_cast<std::size_t>(
                              std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
                          const auto lo = hi - 1;
                          const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
                          for (std::size_t i = 0; i < out.size(); ++i)
                              out[i] = rs[lo][i] + w * (rs[hi][i] - rs[lo][i]);
                      },
                      {}, horizon};
    }

    [[nodiscard]] const std::vector<Species>& species() const { return _species; }
    [[nodiscard]] std::size_t size() const { return _species.size(); }
    [[nodiscard]] const std::vector<double>& breakpoints() const { return _breakpoints; }
    [[nodiscard]] double horizon() const { return _horizon; }

    void eval_into(double t, std::span<double> out) const
    {
        if (out.size() != _species.size()) throw SignalError("signal evaluation: output width mismatch");
        if (_eval) _eval(t, out);
    }

    [[nodiscard]] std::vector<double> operator()(double t) const
    {
        std::vector<double> v(_species.size());
        eval_into(t, v);
        return v;
    }

    [[nodiscard]] std::optional<std::size_t> index_of(const Species& s) const
    {
        auto it = std::find(_species.begin(), _species.end(), s);
        if (it == _species.end()) return std::nullopt;
        return static_cast<std::size_t>(it - _species.begin());
    }

    [[nodiscard]] double value(double t, const Species& s) const
    {
        auto idx = index_of(s);
        if (!idx) throw SignalError("signal has no species '" + s + "'");
        return (*this)(t)[*idx];
    }

private:
    std::vector<Species> _species;
    Evaluator _eval;
    std::vector<double> _breakpoints;
    double _horizon = 0.0;
};

// ---------------------------------------------------------------------------
// Bit schedules

struct ScheduleSegment {
    double start = 0.0;
    double end = 0.0;
    std::map<std::string, int> bits;
};

struct BitSchedule {
    double ramp_width = 0.1;
    std::vector<ScheduleSegment> segments;

    [[nodiscard]] double end() const { return segments.empty() ? 0.0 : segments.back().end; }

    /// Wires mentioned anywhere, sorted.
    [[nodiscard]] std::vector<std::string> wires() const
    {
        std::set<std::string> w;
        for (const auto& seg : segments)
            for (const auto& [name, b] : seg.bits) w.insert(name);
        return {w.begin(), w.end()};
    }

    void validate(std::span<const std::string> required_wires) const
    {
        if (!(ramp_width > 0.0)) throw SignalError("schedule: ramp_width must be positive");
        for (std::size_t i = 0; i < segments.size(); ++i) {
            const auto& s = segments[i];
            const std::string where = "schedule segment #" + std::to_string(i);
            if (!(s.end > s.start)) throw SignalError(where + ": end must exceed start");
            if (!(ramp_width < s.end - s.start))
                throw SignalError(where + ": ramp_width must be shorter than every segment");
            if (i > 0 && s.start < segments[i - 1].end)
                throw SignalError(where + ": overlaps the previous segment");
            for (const auto& [name, b] : s.bits)
                if (b != 0 && b != 1) throw SignalError(where + ": bit for '" + name + "' is not 0/1");
            for (const auto& w : required_wires)
                if (!s.bits.contains(w)) throw SignalError(where + ": no bit for wire '" + w + "'");
        }
    }
};

/// C1 smoothstep on [0, 1].
inline double smoothstep(double x)
{
    x = std::clamp(x, 0.0, 1.0);
    return x * x * (3.0 - 2.0 * x);
}

/// Dual-rail encoding of a bit schedule. Species order is (W, W_bar) per wire.
/// Inside a segment, from ramp_width after its start, each wire carries its bit
/// exactly; the first ramp_width of a segment is a smoothstep from the previous
/// value. Before the first segment and in gaps the previous value is held.
inline Signal schedule_to_signal(const BitSchedule& sched, const std::vector<std::string>& wires)
{
    sched.validate(wires);

    std::vector<Species> species;
    for (const auto& w : wires) {
        species.push_back(w);
        species.push_back(dual_of(w));
    }

    struct Table {
        std::vector<double> starts;
        std::vector<std::vector<double>> values; // [segment][wire]
        double ramp = 0.0;
    };
    auto table = std::make_shared<Table>();
    table->ramp = sched.ramp_width;
    for (const auto& seg : sched.segments) {
        table->starts.push_back(seg.start);
        std::vector<double> v;
        for (const auto& w : wires) v.push_back(static_cast<double>(seg.bits.at(w)));
        table->values.push_back(std::move(v));
    }

    std::vector<double> bps;
    for (std::size_t i = 1; i < sched.segments.size(); ++i) {
        bps.push_back(sched.segments[i].start);
        bps.push_back(sched.segments[i].start + sched.ramp_width);
    }

    auto eval = [table, n = wires.size()](double t, std::span<double> out) {
        const auto& tb = *table;
        if (tb.starts.empty()) {
            std::fill(out.begin(), out.end(), 0.0);
            return;
        }
        auto it = std::upper_bound(tb.starts.begin(), tb.starts.end(), t);
        const std::size_t i = it == tb.starts.begin() ? 0 : static_cast<std::size_t>(it - tb.starts.begin()) - 1;
        const double x = i == 0 ? 1.0 : (t - tb.starts[i]) / tb.ramp;
        const double s = smoothstep(x);
        for (std::size_t w = 0; w < n; ++w) {
            double v = tb.values[i][w];
            if (x < 1.0) {
                const double prev = tb.values[i - 1][w];
                v = prev + (v - prev) * s;
            }
            out[2 * w] = v;
            out[2 * w + 1] = 1.0 - v;
        }
    };
    return Signal{std::move(species), eval, std::move(bps), sched.end()};
}

// ---------------------------------------------------------------------------
// Noise

struct NoiseTerm {
    double freq = 1.0; ///< angular frequency
    double phase = 0.0;
    double amplitude = 0.0;
};

enum class NoiseKind { none, sinusoidal, random };

inline const char* to_string(NoiseKind k)
{
    switch (k) {
    case NoiseKind::none: return "none";
    case NoiseKind::sinusoidal: return "sinusoidal";
    case NoiseKind::random: return "random";
    }
    return "?";
}

inline NoiseKind parse_noise_kind(std::string_view s)
{
    if (s == "none") return NoiseKind::none;
    if (s == "sinusoidal") return NoiseKind::sinusoidal;
    if (s == "random") return NoiseKind::random;
    throw SignalError("unknown noise kind '" + std::string(s) + "'");
}

/// Bounded additive noise, applied independently per coordinate. With explicit
/// `terms` every coordinate gets exactly those terms; otherwise terms are drawn
/// per coordinate from `seed`. In every case sum |amplitude_i| <= `amplitude`.
struct NoiseSpec {
    double amplitude = 0.0;
    NoiseKind kind = NoiseKind::sinusoidal;
    std::vector<NoiseTerm> terms;
    std::uint64_t seed = 0;
    int max_terms = 8;
    double freq_min = 0.5;
    double freq_max = 5.0;

    /// Per-coordinate bound chosen so the Euclidean norm over `coords`
    /// coordinates never exceeds `radius`.
    static NoiseSpec euclidean_ball(double radius, std::size_t coords, NoiseKind kind, std::uint64_t seed)
    {
        NoiseSpec s;
        s.kind = kind;
        s.seed = seed;
        s.amplitude = coords == 0 ? 0.0 : radius / std::sqrt(static_cast<double>(coords));
        return s;
    }

    [[nodiscard]] bool is_zero() const { return kind == NoiseKind::none || amplitude == 0.0; }

    void validate() const
    {
        if (!(amplitude >= 0.0)) throw SignalError("noise amplitude must be nonnegative");
        if (!terms.empty()) {
            double sum = 0.0;
            for (const auto& t : terms) sum += std::abs(t.amplitude);
            if (sum > amplitude * (1.0 + 1e-12))
                throw SignalError("noise terms exceed the amplitude bound");
        }
        if (max_terms < 1) throw SignalError("noise max_terms must be at least 1");
    }

    [[nodiscard]] std::vector<NoiseTerm> coordinate_terms(std::size_t coord) const
    {
        if (is_zero()) return {};
        if (!terms.empty()) return terms;
        CounterRng rng = CounterRng{seed, 0x6e6f697365ULL}.substream(coord);
        std::vector<NoiseTerm> out;
        if (kind == NoiseKind::sinusoidal) {
            out.push_back({rng.uniform(freq_min, freq_max), rng.uniform(0.0, 2.0 * std::numbers::pi), amplitude});
            return out;
        }
        const int n = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_terms));
        std::vector<double> w(static_cast<std::size_t>(n));
        double total = 0.0;
        for (auto& x : w) total += (x = rng.uniform(0.05, 1.0));
        for (double x : w)
            out.push_back({rng.uniform(freq_min, 4.0 * freq_max), rng.uniform(0.0, 2.0 * std::numbers::pi),
                           amplitude * x / total});
        return out;
    }
};

inline double eval_noise(std::span<const NoiseTerm> terms, double t)
{
    double s = 0.0;
    for (const auto& term : terms) s += term.amplitude * std::sin(term.freq * t + term.phase);
    return s;
}

/// result(t) = max(0, s(t) + noise(t)) per coordinate.
inline Signal add_noise(const Signal& s, const NoiseSpec& spec)
{
    spec.validate();
    if (spec.is_zero()) return s;
    auto terms = std::make_shared<std::vector<std::vector<NoiseTerm>>>();
    for (std::size_t i = 0; i < s.size(); ++i) terms->push_back(spec.coordinate_terms(i));
    auto eval = [base = s, terms](double t, std::span<double> out) {
        base.eval_into(t, out);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = std::max(0.0, out[i] + eval_noise((*terms)[i], t));
    };
    return Signal{s.species(), eval, s.breakpoints(), s.horizon()};
}

/// Grid points t0, t0+dt, ... plus the right endpoint.
inline std::vector<double> sample_grid(Interval window, double dt)
{
    if (!(dt > 0.0)) throw SignalError("grid spacing must be positive");
    std::vector<double> ts;
    if (window.hi < window.lo) return ts;
    const auto n = static_cast<std::size_t>(std::floor((window.hi - window.lo) / dt + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) ts.push_back(std::min(window.lo + static_cast<double>(i) * dt, window.hi));
    if (window.hi - ts.back() > 1e-12 * std::max(1.0, std::abs(window.hi))) ts.push_back(window.hi);
    return ts;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

/// Grid approximation of sup_{t in window} |a(t) - b(t)| (Euclidean per t).
inline double sup_distance(const Signal& a, const Signal& b, Interval window, double grid_dt)
{
    if (a.species() != b.species()) throw SignalError("sup_distance: species orders differ");
    std::vector<double> va(a.size()), vb(b.size());
    double worst = 0.0;
    for (double t : sample_grid(window, grid_dt)) {
        a.eval_into(t, va);
        b.eval_into(t, vb);
        worst = std::max(worst, euclidean_distance(va, vb));
    }
    return worst;
}

} // namespace crnc
