#pragma once

// Explicit Runge-Kutta integrators: adaptive Dormand-Prince 5(4) with the
// standard 4th-order continuous extension, and classical fixed-step RK4.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace crnc {

class SimulationError : public std::runtime_error {
public:
    SimulationError(const std::string& what, double time)
        : std::runtime_error(what + " at t=" + std::to_string(time)), _time{time}
    {}

    [[nodiscard]] double time() const { return _time; }

private:
    double _time;
};

struct OdeOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0; ///< 0 selects automatically
    std::size_t max_steps = 50'000'000;
};

struct OdeStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;
};

/// Dense interpolant over one accepted step [t0, t0 + h].
class DenseStep {
public:
    double t0 = 0.0;
    double h = 0.0;

    void eval(double t, std::span<double> out) const
    {
        const double theta = (t - t0) / h;
        const double theta1 = 1.0 - theta;
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
    }

    std::vector<double> r1, r2, r3, r4, r5;
};

/// Dormand-Prince 5(4). `rhs(t, y, dydt)`; `post_step(t, y)` may project the
/// accepted state (returns true if it modified y); `sink(step, t1, y1)` sees
/// every accepted step together with its dense interpolant.
class Dopri5 {
public:
    explicit Dopri5(OdeOptions opts = {}) : _opts{opts} {}

    [[nodiscard]] const OdeStats& stats() const { return _stats; }
    [[nodiscard]] double last_step() const { return _h; }

    template <class Rhs, class PostStep, class Sink>
    void integrate(Rhs&& rhs, double t0, double t1, std::span<double> y, PostStep&& post_step, Sink&& sink)
    {
        const std::size_t n = y.size();
        if (!(t1 > t0)) return;
        resize(n);

        auto f = [&](double t, std::span<const double> yy, std::span<double> out) {
            rhs(t, yy, out);
            ++_stats.rhs_evals;
        };

        std::copy(y.begin(), y.end(), _y0.begin());
        f(t0, _y0, _k1);

        double h = _h > 0.0 ? _h : initial_step(f, t0, t1);
        h = std::min({h, _opts.max_step, t1 - t0});
        double t = t0;
        bool last_rejected = false;

        while (t < t1) {
            if (_stats.accepted + _stats.rejected > _opts.max_steps)
                throw SimulationError("step budget exhausted", t);
            bool final_step = false;
            if (t + 1.01 * h >= t1) {
                h = t1 - t;
                final_step = true;
            }
            if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
                throw SimulationError("step size underflow", t);

            stages(f, t, h);

            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double sc = _opts.abs_tol + _opts.rel_tol * std::max(std::abs(_y0[i]), std::abs(_y1[i]));
                const double e = h * (e1 * _k1[i] + e3 * _k3[i] + e4 * _k4[i] + e5 * _k5[i] + e6 * _k6[i] +
                                      e7 * _k7[i]) / sc;
                err += e * e;
            }
            err = n == 0 ? 0.0 : std::sqrt(err / static_cast<double>(n));
            if (!std::isfinite(err)) {
                if (h < 1e-12) throw SimulationError("non-finite state", t);
                h *= 0.1;
                ++_stats.rejected;
                last_rejected = true;
                continue;
            }

            if (err <= 1.0) {
                ++_stats.accepted;
                build_dense(t, h);
                const double t_new = final_step ? t1 : t + h;
                for (std::size_t i = 0; i < n; ++i)
                    if (!std::isfinite(_y1[i])) throw SimulationError("non-finite state", t_new);

                const bool projected = post_step(t_new, std::span<double>(_y1));
                sink(_dense, t_new, std::span<const double>(_y1));

                std::copy(_y1.begin(), _y1.end(), _y0.begin());
                if (projected)
                    f(t_new, _y0, _k1);
                else
                    std::copy(_k7.begin(), _k7.end(), _k1.begin());
                t = t_new;

                double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                if (last_rejected) fac = std::min(fac, 1.0);
                last_rejected = false;
                const double h_next = std::min(h * fac, _opts.max_step);
                if (!final_step) _h = h_next;
                h = h_next;
            } else {
                ++_stats.rejected;
                last_rejected = true;
                h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            }
        }
        std::copy(_y0.begin(), _y0.end(), y.begin());
    }

private:
    // Butcher tableau
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                            a76 = 11.0 / 84;
    // 5th minus embedded 4th order weights
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    // continuous extension
    static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    void resize(std::size_t n)
    {
        for (auto* v : {&_y0, &_y1, &_tmp, &_k1, &_k2, &_k3, &_k4, &_k5, &_k6, &_k7, &_dense.r1, &_dense.r2,
                        &_dense.r3, &_dense.r4, &_dense.r5})
            v->assign(n, 0.0);
    }

    template <class F>
    double initial_step(F& f, double t0, double t1)
    {
        if (_opts.initial_step > 0.0) return _opts.initial_step;
        const std::size_t n = _y0.size();
        double d0 = 0.0, d1n = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = _opts.abs_tol + _opts.rel_tol * std::abs(_y0[i]);
            d0 += (_y0[i] / sc) * (_y0[i] / sc);
            d1n += (_k1[i] / sc) * (_k1[i] / sc);
        }
        d0 = n ? std::sqrt(d0 / static_cast<double>(n)) : 0.0;
        d1n = n ? std::sqrt(d1n / static_cast<double>(n)) : 0.0;
        double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
        h0 = std::min(h0, t1 - t0);
        for (std::size_t i = 0; i < n; ++i) _tmp[i] = _y0[i] + h0 * _k1[i];
        f(t0 + h0, _tmp, _k2);
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = _opts.abs_tol + _opts.rel_tol * std::abs(_y0[i]);
            d2 += ((_k2[i] - _k1[i]) / sc) * ((_k2[i] - _k1[i]) / sc);
        }
        d2 = n ? std::sqrt(d2 / static_cast<double>(n)) / h0 : 0.0;
        const double m = std::max(d1n, d2);
        const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
        return std::min(100.0 * h0, h1);
    }

    template <class F>
    void stages(F& f, double t, double h)
    {
        const std::size_t n = _y0.size();
        for (std::size_t i = 0; i < n; ++i) _tmp[i] = _y0[i] + h * a21 * _k1[i];
        f(t + c2 * h, _tmp, _k2);
        for (std::size_t i = 0; i < n; ++i) _tmp[i] = _y0[i] + h * (a31 * _k1[i] + a32 * _k2[i]);
        f(t + c3 * h, _tmp, _k3);
        for (std::size_t i = 0; i < n; ++i) _tmp[i] = _y0[i] + h * (a41 * _k1[i] + a42 * _k2[i] + a43 * _k3[i]);
        f(t + c4 * h, _tmp, _k4);
        for (std::size_t i = 0; i < n; ++i)
            _tmp[i] = _y0[i] + h * (a51 * _k1[i] + a52 * _k2[i] + a53 * _k3[i] + a54 * _k4[i]);
        f(t + c5 * h, _tmp, _k5);
        for (std::size_t i = 0; i < n; ++i)
            _tmp[i] = _y0[i] + h * (a61 * _k1[i] + a62 * _k2[i] + a63 * _k3[i] + a64 * _k4[i] + a65 * _k5[i]);
        f(t + h, _tmp, _k6);
        for (std::size_t i = 0; i < n; ++i)
            _y1[i] = _y0[i] + h * (a71 * _k1[i] + a73 * _k3[i] + a74 * _k4[i] + a75 * _k5[i] + a76 * _k6[i]);
        f(t + h, _y1, _k7);
    }

    void build_dense(double t, double h)
    {
        _dense.t0 = t;
        _dense.h = h;
        for (std::size_t i = 0; i < _y0.size(); ++i) {
            const double dy = _y1[i] - _y0[i];
            const double bspl = h * _k1[i] - dy;
            _dense.r1[i] = _y0[i];
            _dense.r2[i] = dy;
            _dense.r3[i] = bspl;
            _dense.r4[i] = dy - h * _k7[i] - bspl;
            _dense.r5[i] = h * (d1 * _k1[i] + d3 * _k3[i] + d4 * _k4[i] + d5 * _k5[i] + d6 * _k6[i] + d7 * _k7[i]);
        }
    }

    OdeOptions _opts;
    OdeStats _stats;
    double _h = 0.0;
    std::vector<double> _y0, _y1, _tmp, _k1, _k2, _k3, _k4, _k5, _k6, _k7;
    DenseStep _dense;
};

/// One classical RK4 step in place.
template <class Rhs>
void rk4_step(Rhs&& rhs, double t, double h, std::span<double> y, std::vector<double>& work)
{
    const std::size_t n = y.size();
    work.resize(5 * n);
    std::span<double> k1{work.data(), n}, k2{work.data() + n, n}, k3{work.data() + 2 * n, n},
        k4{work.data() + 3 * n, n}, tmp{work.data() + 4 * n, n};
    rhs(t, std::span<const double>(y), k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(t + 0.5 * h, std::span<const double>(tmp), k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(t + 0.5 * h, std::span<const double>(tmp), k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    rhs(t + h, std::span<const double>(tmp), k4);
    for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

} // namespace crnc
