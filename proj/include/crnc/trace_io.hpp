#pragma once

// Trace export: CSV with full precision and a minimal SVG timing diagram.

#include "kinetics.hpp"
#include "signal.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace crnc {

inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Header `t,<species>` then one row per grid point. An empty trace yields the header only.
inline void write_csv(std::ostream& os, const Trace& tr)
{
    os << 't';
    for (const auto& s : tr.species) os << ',' << s;
    os << '\n';
    for (std::size_t r = 0; r < tr.times.size(); ++r) {
        os << format_double(tr.times[r]);
        for (double v : tr.values[r]) os << ',' << format_double(v);
        os << '\n';
    }
}

inline std::string to_csv(const Trace& tr)
{
    std::ostringstream os;
    write_csv(os, tr);
    return os.str();
}

struct Lane {
    std::string label;
    std::vector<double> rail;
    std::vector<double> dual; ///< may be empty
};

/// One lane per rail pair: the positive rail solid, the dual dashed.
/// Input lanes come first when `input` is non-empty.
inline std::vector<Lane> timing_lanes(const Trace& tr, const Signal* input = nullptr)
{
    std::vector<Lane> lanes;
    auto add_pairs = [&](const std::vector<Species>& names, auto&& column) {
        for (const auto& s : names) {
            if (is_dual_rail(s)) {
                if (std::find(names.begin(), names.end(), wire_of(s)) == names.end())
                    lanes.push_back({s, column(s), {}});
                continue;
            }
            Lane l{s, column(s), {}};
            if (std::find(names.begin(), names.end(), dual_of(s)) != names.end()) l.dual = column(dual_of(s));
            lanes.push_back(std::move(l));
        }
    };
    if (input && input->size() > 0) {
        add_pairs(input->species(), [&](const Species& s) {
            std::vector<double> v;
            for (double t : tr.times) v.push_back(input->value(t, s));
            return v;
        });
    }
    add_pairs(tr.species, [&](const Species& s) { return tr.column(s); });
    return lanes;
}

inline void write_svg(std::ostream& os, const Trace& tr, const Signal* input = nullptr)
{
    const auto lanes = timing_lanes(tr, input);
    const double W = 900, lane_h = 60, pad = 8, left = 90;
    const double H = lane_h * static_cast<double>(lanes.size()) + 30;
    const double t_end = tr.times.empty() ? 1.0 : std::max(tr.times.back(), 1e-12);
    auto xs = [&](double t) { return left + (W - left - pad) * t / t_end; };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"monospace\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < lanes.size(); ++i) {
        const double top = static_cast<double>(i) * lane_h + pad;
        const double bottom = top + lane_h - 2 * pad;
        auto ys = [&](double v) { return bottom - (bottom - top) * std::clamp(v, 0.0, 1.1) / 1.1; };
        os << "<text x=\"4\" y=\"" << (top + bottom) / 2 << "\">" << lanes[i].label << "</text>\n";
        os << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << W - pad << "\" y2=\"" << bottom
           << "\" stroke=\"#ccc\"/>\n";
        auto poly = [&](const std::vector<double>& v, const char* style) {
            if (v.empty()) return;
            os << "<polyline fill=\"none\" " << style << " points=\"";
            const std::size_t stride = std::max<std::size_t>(1, v.size() / 2000);
            for (std::size_t k = 0; k < v.size(); k += stride) os << xs(tr.times[k]) << ',' << ys(v[k]) << ' ';
            os << "\"/>\n";
        };
        poly(lanes[i].rail, "stroke=\"#1f4e9c\" stroke-width=\"1.5\"");
        poly(lanes[i].dual, "stroke=\"#c0392b\" stroke-width=\"1\" stroke-dasharray=\"4 3\"");
    }
    const double axis_y = H - 10;
    os << "<text x=\"" << left << "\" y=\"" << axis_y << "\">0</text>\n";
    os << "<text x=\"" << W - 60 << "\" y=\"" << axis_y << "\">t=" << t_end << "</text>\n";
    os << "</svg>\n";
}

} // namespace crnc
