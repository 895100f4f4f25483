#pragma once

// Deterministic mass-action semantics and trace generation.

#include "crn.hpp"
#include "ode.hpp"
#include "signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crnc {

/// k (or k̂(t)) times the product of reactant concentrations raised to their
/// stoichiometric powers. `global` holds both state and input concentrations.
template <class Rx>
double reaction_rate(const Rx& rx, const State& global, double t = 0.0)
{
    double rate;
    if constexpr (requires { rx.rate_fn; })
        rate = rx.rate_fn(t);
    else
        rate = rx.k;
    for (const auto& [s, n] : rx.reactants) {
        auto it = global.find(s);
        if (it == global.end()) throw CrnError("reaction_rate: no concentration for '" + s + "'");
        rate *= std::pow(it->second, n);
    }
    return rate;
}

/// dx/dt for every state species; inputs get no entry.
template <class Crn>
State mass_action_derivative(const Crn& crn, const State& x, const State& u, double t = 0.0)
{
    State global = u;
    for (const auto& [s, v] : x) global[s] = v;
    State out;
    for (const auto& s : crn.states) out[s] = 0.0;
    for (const auto& rx : crn.reactions) {
        const double r = reaction_rate(rx, global, t);
        for (const auto& s : crn.states)
            if (int d = rx.net_effect(s); d != 0) out[s] += d * r;
    }
    return out;
}

/// Index-based form of a network bound to an input signal's species order.
class MassActionSystem {
public:
    MassActionSystem(const TdIoCrn& crn, const std::vector<Species>& input_order)
        : _states{crn.states.begin(), crn.states.end()}
    {
        if (auto vs = validate(crn); !vs.empty()) throw CrnError("simulate: invalid network: " + describe(vs));
        auto state_index = [&](const Species& s) -> std::optional<std::size_t> {
            auto it = std::lower_bound(_states.begin(), _states.end(), s);
            if (it == _states.end() || *it != s) return std::nullopt;
            return static_cast<std::size_t>(it - _states.begin());
        };
        for (const auto& rx : crn.reactions) {
            Term term;
            term.rate = rx.rate_fn;
            for (const auto& [s, n] : rx.reactants) {
                if (auto i = state_index(s)) {
                    term.factors.push_back({false, *i, n});
                } else {
                    auto it = std::find(input_order.begin(), input_order.end(), s);
                    if (it == input_order.end())
                        throw CrnError("simulate: input signal does not drive input species '" + s + "'");
                    term.factors.push_back({true, static_cast<std::size_t>(it - input_order.begin()), n});
                }
            }
            for (std::size_t i = 0; i < _states.size(); ++i)
                if (int d = rx.net_effect(_states[i]); d != 0) term.delta.push_back({i, d});
            _terms.push_back(std::move(term));
        }
    }

    [[nodiscard]] const std::vector<Species>& states() const { return _states; }

    void derivative(double t, std::span<const double> x, std::span<const double> u, std::span<double> dxdt) const
    {
        std::fill(dxdt.begin(), dxdt.end(), 0.0);
        for (const auto& term : _terms) {
            double r = term.rate(t);
            for (const auto& f : term.factors) {
                const double c = f.input ? u[f.index] : x[f.index];
                for (int p = 0; p < f.power; ++p) r *= c;
            }
            for (const auto& [i, d] : term.delta) dxdt[i] += d * r;
        }
    }

private:
    struct Factor {
        bool input;
        std::size_t index;
        int power;
    };
    struct Term {
        std::function<double(double)> rate;
        std::vector<Factor> factors;
        std::vector<std::pair<std::size_t, int>> delta;
    };

    std::vector<Species> _states;
    std::vector<Term> _terms;
};

struct SimConfig {
    double horizon = 1.0;
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = 0.1;
    double output_dt = 0.005;

    /// Defaults tied to a propagation delay: output_dt = τ/200, max_step = τ/10.
    static SimConfig for_delay(double tau, double horizon)
    {
        SimConfig c;
        c.horizon = horizon;
        c.output_dt = tau / 200.0;
        c.max_step = tau / 10.0;
        return c;
    }

    void validate() const
    {
        if (!(horizon >= 0.0)) throw SimulationError("horizon must be nonnegative", 0.0);
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(max_step > 0.0) || !(output_dt > 0.0))
            throw SimulationError("tolerances, max_step and output_dt must be positive", 0.0);
        if (horizon > 0.0 && output_dt > horizon)
            throw SimulationError("output_dt exceeds the horizon", 0.0);
    }
};

/// Concentrations of the state species on a uniform grid starting at 0.
struct Trace {
    std::vector<Species> species;
    std::vector<double> times;
    std::vector<std::vector<double>> values; ///< values[row][species]
    SimConfig config;
    Signal input;
    double min_raw = std::numeric_limits<double>::infinity(); ///< smallest value before clamping
    OdeStats stats;

    [[nodiscard]] std::optional<std::size_t> index_of(const Species& s) const
    {
        auto it = std::find(species.begin(), species.end(), s);
        if (it == species.end()) return std::nullopt;
        return static_cast<std::size_t>(it - species.begin());
    }

    [[nodiscard]] std::vector<double> column(const Species& s) const
    {
        auto i = index_of(s);
        if (!i) throw SimulationError("trace has no species '" + s + "'", 0.0);
        std::vector<double> out;
        out.reserve(values.size());
        for (const auto& row : values) out.push_back(row[*i]);
        return out;
    }

    /// Linear interpolation of one species between grid points.
    [[nodiscard]] double at(double t, const Species& s) const
    {
        auto i = index_of(s);
        if (!i) throw SimulationError("trace has no species '" + s + "'", t);
        if (times.empty()) return 0.0;
        if (t <= times.front()) return values.front()[*i];
        if (t >= times.back()) return values.back()[*i];
        const auto hi = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
        const auto lo = hi - 1;
        const double w = (t - times[lo]) / (times[hi] - times[lo]);
        return values[lo][*i] + w * (values[hi][*i] - values[lo][*i]);
    }
};

inline std::vector<double> output_grid(double horizon, double dt)
{
    std::vector<double> ts;
    if (horizon <= 0.0) return ts;
    const auto n = static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
    ts.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) ts.push_back(static_cast<double>(i) * dt);
    return ts;
}

namespace detail {

inline std::vector<double> initial_vector(const std::vector<Species>& states, const State& x0)
{
    std::vector<double> y(states.size(), 0.0);
    for (const auto& [s, v] : x0) {
        auto it = std::lower_bound(states.begin(), states.end(), s);
        if (it == states.end() || *it != s) throw CrnError("initial state names non-state species '" + s + "'");
        if (!(v >= 0.0)) throw CrnError("initial concentration of '" + s + "' is negative");
        y[static_cast<std::size_t>(it - states.begin())] = v;
    }
    return y;
}

} // namespace detail

/// Integrates x' = F(x, u(t)) from x0 over [0, horizon] with adaptive
/// Dormand-Prince, restarting at every input breakpoint, and samples the
/// dense output every output_dt. Accepted states are clamped at zero.
inline Trace simulate(const TdIoCrn& crn, const State& x0, const Signal& input, const SimConfig& cfg)
{
    cfg.validate();
    MassActionSystem sys{crn, input.species()};
    Trace tr;
    tr.species = sys.states();
    tr.config = cfg;
    tr.input = input;
    tr.times = output_grid(cfg.horizon, cfg.output_dt);
    tr.values.reserve(tr.times.size());

    std::vector<double> y = detail::initial_vector(tr.species, x0);
    if (tr.times.empty()) return tr;
    tr.values.push_back(y);
    tr.min_raw = y.empty() ? 0.0 : *std::min_element(y.begin(), y.end());

    std::vector<double> u(input.size());
    auto rhs = [&](double t, std::span<const double> x, std::span<double> dxdt) {
        input.eval_into(t, u);
        sys.derivative(t, x, u, dxdt);
    };
    auto clamp = [&](double, std::span<double> x) {
        bool changed = false;
        for (double& v : x)
            if (v < 0.0) {
                tr.min_raw = std::min(tr.min_raw, v);
                v = 0.0;
                changed = true;
            }
        return changed;
    };

    std::size_t next = 1;
    std::vector<double> sample(y.size());
    auto sink = [&](const DenseStep& step, double t1, std::span<const double> y1) {
        const double eps = 1e-12 * std::max(1.0, std::abs(t1));
        while (next < tr.times.size() && tr.times[next] <= t1 + eps) {
            const double t = tr.times[next];
            if (std::abs(t - t1) <= eps)
                std::copy(y1.begin(), y1.end(), sample.begin());
            else
                step.eval(t, sample);
            for (double& v : sample) {
                tr.min_raw = std::min(tr.min_raw, v);
                v = std::max(v, 0.0);
            }
            tr.values.push_back(sample);
            ++next;
        }
    };

    std::vector<double> cuts{0.0};
    for (double b : input.breakpoints())
        if (b > 0.0 && b < cfg.horizon) cuts.push_back(b);
    cuts.push_back(cfg.horizon);

    Dopri5 ode{OdeOptions{cfg.rel_tol, cfg.abs_tol, cfg.max_step}};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        ode.integrate(rhs, cuts[i], cuts[i + 1], std::span<double>(y), clamp, sink);

    while (next < tr.times.size()) { // grid points within rounding of the horizon
        tr.values.push_back(tr.values.back());
        ++next;
    }
    tr.stats = ode.stats();
    return tr;
}

inline Trace simulate(const IoCrn& crn, const State& x0, const Signal& input, const SimConfig& cfg)
{
    return simulate(to_time_dependent(crn), x0, input, cfg);
}

/// Classical RK4 at a fixed step, sampled every output_dt (which must be an
/// integer multiple of dt). No breakpoint handling and no clamping: this is the
/// independent cross-check for the adaptive integrator.
inline Trace simulate_fixed_rk4(const TdIoCrn& crn, const State& x0, const Signal& input, double horizon,
                                double dt, double output_dt)
{
    const double ratio = output_dt / dt;
    const auto per_sample = static_cast<std::size_t>(std::llround(ratio));
    if (per_sample == 0 || std::abs(ratio - static_cast<double>(per_sample)) > 1e-9 * ratio)
        throw SimulationError("output_dt must be an integer multiple of the RK4 step", 0.0);

    MassActionSystem sys{crn, input.species()};
    Trace tr;
    tr.species = sys.states();
    tr.config.horizon = horizon;
    tr.config.output_dt = output_dt;
    tr.input = input;
    tr.times = output_grid(horizon, output_dt);
    std::vector<double> y = detail::initial_vector(tr.species, x0);
    if (tr.times.empty()) return tr;
    tr.values.push_back(y);

    std::vector<double> u(input.size()), work;
    auto rhs = [&](double t, std::span<const double> x, std::span<double> dxdt) {
        input.eval_into(t, u);
        sys.derivative(t, x, u, dxdt);
    };
    for (std::size_t row = 1; row < tr.times.size(); ++row) {
        const double t0 = tr.times[row - 1];
        for (std::size_t s = 0; s < per_sample; ++s)
            rk4_step(rhs, t0 + static_cast<double>(s) * dt, dt, std::span<double>(y), work);
        for (double v : y) tr.min_raw = std::min(tr.min_raw, v);
        tr.values.push_back(y);
    }
    return tr;
}

inline Trace simulate_fixed_rk4(const IoCrn& crn, const State& x0, const Signal& input, double horizon, double dt,
                                double output_dt)
{
    return simulate_fixed_rk4(to_time_dependent(crn), x0, input, horizon, dt, output_dt);
}

/// Context of a run: the input signal driving U and the observed species V.
/// The measurement is the zero-error projection h0; bounded measurement noise
/// is supplied separately to `measure`.
struct Context {
    Signal input;
    std::vector<Species> outputs;
};

/// Output signal v(t) = h(x(t), u(t)) over V. Observed species are read from
/// the trace when they are states and from the input signal otherwise.
inline Signal measure(const Trace& trace, const Context& ctx, const std::optional<NoiseSpec>& noise = std::nullopt)
{
    std::vector<std::optional<std::size_t>> from_state;
    std::vector<std::size_t> from_input;
    for (const auto& s : ctx.outputs) {
        if (auto i = trace.index_of(s)) {
            from_state.push_back(i);
            from_input.push_back(0);
        } else if (auto j = ctx.input.index_of(s)) {
            from_state.push_back(std::nullopt);
            from_input.push_back(*j);
        } else {
            throw CrnError("measure: output species '" + s + "' is neither a state nor an input");
        }
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(trace.times.size());
    std::vector<double> u(ctx.input.size());
    for (std::size_t r = 0; r < trace.times.size(); ++r) {
        ctx.input.eval_into(trace.times[r], u);
        std::vector<double> row(ctx.outputs.size());
        for (std::size_t k = 0; k < row.size(); ++k)
            row[k] = from_state[k] ? trace.values[r][*from_state[k]] : u[from_input[k]];
        rows.push_back(std::move(row));
    }
    Signal projected = Signal::from_samples(ctx.outputs, trace.times, std::move(rows));
    if (!noise) return projected;
    return add_noise(projected, *noise);
}

} // namespace crnc
