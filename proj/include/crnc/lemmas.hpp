#pragma once

// Scalar comparison ODEs that bound a NAND output rail, their closed forms and
// the convergence-time estimate, plus a pointwise domination check against a
// simulated trace.

#include "crn.hpp"
#include "kinetics.hpp"
#include "signal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace crnc {

class LemmaPreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct LemmaParams {
    double p = 1.0;      ///< conserved rail-pair total
    double d = 0.0;      ///< δ4 / k
    double delta1 = 0.0;
    double delta2 = 0.0;
    double delta3 = 0.0;
    double k = 13.0;
    double tau = 1.0;

    [[nodiscard]] double gamma() const { return delta1 - delta2 - delta3; }

    static LemmaParams for_gate(double k, double tau, double d4, double d1, double d2, double d3, double p)
    {
        return {p, d4 / k, d1, d2, d3, k, tau};
    }
};

/// Linear phase: x' = k(-a + b(p - x) - c x), x(0) = 0.
struct LinearCoeffs {
    double a, b, c;
};

inline LinearCoeffs linear_coeffs(const LemmaParams& lp)
{
    const double d = lp.d;
    return {lp.p * lp.p * lp.p / 18.0 * (std::pow(3.0 + d, 1.5) + 9.0 * d), (1.0 - d) * (1.0 - lp.delta1) * (1.0 - lp.delta1),
            2.0 * lp.delta1 * (1.0 + d)};
}

inline double linear_rhs(const LemmaParams& lp, double x)
{
    const auto [a, b, c] = linear_coeffs(lp);
    return lp.k * (-a + b * (lp.p - x) - c * x);
}

inline double linear_closed_form(const LemmaParams& lp, double t)
{
    const auto [a, b, c] = linear_coeffs(lp);
    if (!(b + c > 0.0)) throw LemmaPreconditionError("linear phase: b + c must be positive");
    return (b * lp.p - a) / (b + c) * (1.0 - std::exp(-lp.k * (b + c) * t));
}

inline bool linear_phase_holds(const LemmaParams& lp) { return linear_closed_form(lp, lp.tau / 2.0) > 0.6; }

/// Restoration phase: x' = a x²(p-x) - b x(p-x)² - c x, x(0) = 3/5.
struct RestoreCoeffs {
    double a, b, c;
    double cstar, A, E1, E2;
};

inline RestoreCoeffs restore_coeffs(const LemmaParams& lp)
{
    RestoreCoeffs r{};
    const double k = lp.k, d = lp.d, p = lp.p;
    r.a = 3.0 * k * (1.0 - d);
    r.b = 3.0 * k * (1.0 + d);
    r.c = 2.0 * k * lp.delta1 * (1.0 + d);
    r.cstar = 4.0 * r.c * (r.a + r.b) / (p * p * r.a * r.a);
    r.A = p / 2.0 * (r.a / (r.a + r.b)) * (1.0 - std::sqrt(std::max(0.0, 1.0 - r.cstar)));
    r.E1 = p * (r.b / (r.a + r.b)) + r.A;
    r.E2 = p - r.A;
    return r;
}

inline double restore_rhs(const LemmaParams& lp, double x)
{
    const auto c = restore_coeffs(lp);
    const double q = lp.p - x;
    return c.a * x * x * q - c.b * x * q * q - c.c * x;
}

/// Which preconditions of the convergence-time formula fail (empty when all hold).
inline std::vector<std::string> restore_precondition_failures(const LemmaParams& lp)
{
    std::vector<std::string> out;
    const auto c = restore_coeffs(lp);
    const double p = lp.p, g = lp.gamma();
    if (!(c.c < p * p * c.a * c.a / (4.0 * (c.a + c.b)))) out.emplace_back("c < p^2 a^2 / (4(a+b)) fails");
    if (!(0.6 > c.E1)) out.emplace_back("x(0) = 3/5 > E1 fails (E1 = " + std::to_string(c.E1) + ")");
    if (!(g > 0.0)) out.emplace_back("gamma = d1 - d2 - d3 must be positive");
    if (!(c.E2 > p - g))
        out.emplace_back("target p - gamma = " + std::to_string(p - g) + " is not below the fixed point E2 = " +
                         std::to_string(c.E2));
    return out;
}

/// T = (a+b)/(a b p² (1-c*)) log u. Throws when a precondition fails.
inline double restore_convergence_time(const LemmaParams& lp)
{
    if (auto f = restore_precondition_failures(lp); !f.empty()) {
        std::string msg = "restoration bound precondition failed:";
        for (const auto& s : f) msg += " " + s + ";";
        throw LemmaPreconditionError(msg);
    }
    const auto c = restore_coeffs(lp);
    const double p = lp.p, g = lp.gamma();
    const double u = ((p - g - c.E1) * (c.E2 - 0.6)) / ((0.6 - c.E1) * (c.E2 - p + g));
    return (c.a + c.b) / (c.a * c.b * p * p * (1.0 - c.cstar)) * std::log(u);
}

/// The 3^4 corner grid: δ1 ∈ {0.02, 0.03, 0.039}, d ∈ {0.001, 0.005, 0.0099},
/// p ∈ {0.99, 1.0, 1.01}, kτ ∈ {13, 20, 50}, τ = 1. δ2 = 0 and δ3 = |p - 1|.
inline std::vector<LemmaParams> lemma_grid()
{
    std::vector<LemmaParams> g;
    for (double d1 : {0.02, 0.03, 0.039})
        for (double d : {0.001, 0.005, 0.0099})
            for (double p : {0.99, 1.0, 1.01})
                for (double kt : {13.0, 20.0, 50.0}) g.push_back({p, d, d1, 0.0, std::abs(p - 1.0), kt, 1.0});
    return g;
}

enum class OutputEdge { falls, rises };

struct DominationResult {
    bool dominates = true;
    double worst_gap = std::numeric_limits<double>::infinity(); ///< min over checked points of rail - bound
    double worst_time = 0.0;
    int worst_phase = 0;
    double phase1_end_value = 0.0; ///< rail value at t1 + τ/2
    std::size_t points = 0;
};

namespace detail {

template <class F>
double rk4_scalar(F&& f, double x, double h)
{
    const double k1 = f(x), k2 = f(x + h / 2 * k1), k3 = f(x + h / 2 * k2), k4 = f(x + h * k3);
    return x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
}

template <class F>
double advance_scalar(F&& f, double x, double t0, double t1, double max_h)
{
    if (t1 <= t0) return x;
    const auto n = static_cast<int>(std::ceil((t1 - t0) / max_h));
    const double h = (t1 - t0) / n;
    for (int i = 0; i < n; ++i) x = rk4_scalar(f, x, h);
    return x;
}

} // namespace detail

/// Checks that the output rail (ȳ for a falling output under X1=X2=1, y for a rising one under
/// X1=0 or X2=0) stays above the comparison solutions on the trace grid:
/// phase 1 starts from the rail's own value at t1 and runs to t1 + τ/2, phase 2
/// restarts from 3/5 at t1 + τ/2 and runs to t2. t1 is snapped to the next grid
/// point so no interpolated value is compared.
inline DominationResult bounding_ode_dominates(const Trace& trace, const LemmaParams& lp, Interval window,
                                               OutputEdge which, const WireRef& y, double slack = 1e-6)
{
    const Species rail = which == OutputEdge::falls ? y.dual_rail() : y.rail();
    const auto col = trace.column(rail);
    const auto& ts = trace.times;
    if (ts.empty() || window.hi > ts.back() + 1e-9) throw SimulationError("domination window exceeds the trace", window.hi);

    std::size_t i = 0;
    while (i < ts.size() && ts[i] < window.lo - 1e-9) ++i;
    DominationResult r;
    if (i >= ts.size()) return r;
    const double t_start = ts[i];
    const double t_mid = t_start + lp.tau / 2.0;
    const double h = trace.config.output_dt / 20.0;
    auto f3 = [&](double x) { return linear_rhs(lp, x); };
    auto f4 = [&](double x) { return restore_rhs(lp, x); };

    auto record = [&](double gap, double t, int phase) {
        ++r.points;
        if (gap < r.worst_gap) {
            r.worst_gap = gap;
            r.worst_time = t;
            r.worst_phase = phase;
        }
    };

    double x = col[i];
    double t = t_start;
    std::size_t j = i;
    for (; j < ts.size() && ts[j] <= t_mid + 1e-12 && ts[j] <= window.hi + 1e-12; ++j) {
        x = detail::advance_scalar(f3, x, t, ts[j], h);
        t = ts[j];
        record(col[j] - x, t, 1);
    }
    r.phase1_end_value = trace.at(t_mid, rail);

    x = 0.6;
    t = t_mid;
    for (; j < ts.size() && ts[j] <= window.hi + 1e-12; ++j) {
        x = detail::advance_scalar(f4, x, t, ts[j], h);
        t = ts[j];
        record(col[j] - x, t, 2);
    }
    r.dominates = r.worst_gap >= -slack;
    return r;
}

} // namespace crnc
