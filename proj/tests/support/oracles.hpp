#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerics.

#include <crnc/netlist.hpp>
#include <crnc/rng.hpp>

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace oracle {

/// Classical RK4 for a scalar autonomous ODE with a fixed step.
inline double rk4(const std::function<double(double)>& f, double x, double t_end, double dt)
{
    const int n = static_cast<int>(std::llround(t_end / dt));
    const double h = t_end / n;
    for (int i = 0; i < n; ++i) {
        const double k1 = f(x);
        const double k2 = f(x + 0.5 * h * k1);
        const double k3 = f(x + 0.5 * h * k2);
        const double k4 = f(x + h * k3);
        x += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
    return x;
}

/// First time the RK4 trajectory of f from x0 reaches `level` (linear
/// interpolation inside the step), or +inf if it never does before t_max.
inline double rk4_crossing(const std::function<double(double)>& f, double x0, double level, double t_max, double dt)
{
    double x = x0, t = 0.0;
    if (x >= level) return 0.0;
    while (t < t_max) {
        const double k1 = f(x);
        const double k2 = f(x + 0.5 * dt * k1);
        const double k3 = f(x + 0.5 * dt * k2);
        const double k4 = f(x + dt * k3);
        const double xn = x + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        if (xn >= level) return t + dt * (level - x) / (xn - x);
        x = xn;
        t += dt;
    }
    return INFINITY;
}

/// Lemma-3 style linear comparison ODE, written out from the formulas directly.
struct Linear {
    double p, d, d1, k;
    double a() const { return p * p * p / 18.0 * (std::pow(3.0 + d, 1.5) + 9.0 * d); }
    double b() const { return (1.0 - d) * (1.0 - d1) * (1.0 - d1); }
    double c() const { return 2.0 * d1 * (1.0 + d); }
    double operator()(double x) const { return k * (-a() + b() * (p - x) - c() * x); }
};

/// Lemma-4 style cubic restoration ODE.
struct Cubic {
    double p, d, d1, k;
    double operator()(double x) const
    {
        const double a = 3 * k * (1 - d), b = 3 * k * (1 + d), c = 2 * k * d1 * (1 + d);
        return a * x * x * (p - x) - b * x * (p - x) * (p - x) - c * x;
    }
};

/// Recursive NAND evaluation straight from the gate map (no topological order).
inline std::vector<int> eval_recursive(const crnc::Netlist& nl, const std::vector<int>& w)
{
    std::map<std::string, const crnc::Gate*> by_out;
    for (const auto& g : nl.gates) by_out[g.out] = &g;
    std::map<std::string, int> inputs;
    for (std::size_t i = 0; i < nl.inputs.size(); ++i) inputs[nl.inputs[i]] = w[i];
    std::function<int(const std::string&)> value = [&](const std::string& name) -> int {
        if (auto it = inputs.find(name); it != inputs.end()) return it->second;
        const auto* g = by_out.at(name);
        const int a = value(g->a.wire) ^ (g->a.negated ? 1 : 0);
        const int b = value(g->b.wire) ^ (g->b.negated ? 1 : 0);
        return 1 - (a & b);
    };
    std::vector<int> out;
    for (const auto& o : nl.outputs) out.push_back(value(o));
    return out;
}

/// Longest path by memoized DFS from outputs back to inputs.
inline int depth_dfs(const crnc::Netlist& nl)
{
    std::map<std::string, const crnc::Gate*> by_out;
    for (const auto& g : nl.gates) by_out[g.out] = &g;
    std::map<std::string, int> memo;
    std::function<int(const std::string&)> d = [&](const std::string& name) -> int {
        auto it = by_out.find(name);
        if (it == by_out.end()) return 0;
        if (auto m = memo.find(name); m != memo.end()) return m->second;
        const int v = 1 + std::max(d(it->second->a.wire), d(it->second->b.wire));
        return memo[name] = v;
    };
    int best = 0;
    for (const auto& o : nl.outputs) best = std::max(best, d(o));
    return best;
}

/// Random NAND DAG as netlist text: 2..max_inputs inputs, 1..max_gates gates,
/// each gate reading two distinct earlier wires with random negation. The
/// last gate is always an output; a few other wires may be too.
inline std::string random_netlist_text(std::uint64_t seed, int max_gates = 8, int max_inputs = 4)
{
    crnc::CounterRng rng{seed, 0xda6};
    const int n = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_inputs - 1));
    const int g = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_gates));
    std::vector<std::string> wires;
    std::string text = "INPUTS";
    for (int i = 0; i < n; ++i) {
        wires.push_back("I" + std::to_string(i));
        text += " " + wires.back();
    }
    std::string body;
    for (int i = 0; i < g; ++i) {
        const auto m = static_cast<std::uint64_t>(wires.size());
        const auto a = rng.next_u64() % m;
        auto b = rng.next_u64() % (m - 1);
        if (b >= a) ++b;
        auto ref = [&](std::uint64_t k) { return std::string(rng.uniform() < 0.4 ? "~" : "") + wires[k]; };
        const std::string out = "G" + std::to_string(i);
        body += out + " = NAND(" + ref(a) + ", " + ref(b) + ")\n";
        wires.push_back(out);
    }
    std::string outs = " " + wires.back();
    for (std::size_t k = static_cast<std::size_t>(n); k + 1 < wires.size(); ++k)
        if (rng.uniform() < 0.25) outs += " " + wires[k];
    return text + "\nOUTPUTS" + outs + "\n" + body;
}

} // namespace oracle
