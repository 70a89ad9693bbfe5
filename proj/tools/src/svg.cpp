// Copyright 2026 The gqcr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace gqcr::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char *const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    bool log = false;
    double lo = 0.0;
    double hi = 1.0;

    double map(double v) const { return log ? std::log10(v) : v; }
    double unmap(double v) const { return log ? std::pow(10.0, v) : v; }
    double frac(double v) const { return (map(v) - lo) / (hi - lo); }
};

Axis make_axis(bool log, const std::vector<Series> &series, bool use_x) {
    Axis a;
    a.log = log;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Series &s : series) {
        for (double v : use_x ? s.x : s.y) {
            if (!std::isfinite(v) || (log && !(v > 0.0))) continue;
            lo = std::min(lo, a.map(v));
            hi = std::max(hi, a.map(v));
        }
    }
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
    const double pad = 0.05 * (hi - lo);
    a.lo = lo - pad;
    a.hi = hi + pad;
    return a;
}

}  // namespace

std::string render_svg(const PlotSpec &spec, const std::vector<Series> &series) {
    const Axis ax = make_axis(spec.log_x, series, true);
    const Axis ay = make_axis(spec.log_y, series, false);
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + ax.frac(v) * pw; };
    auto py = [&](double v) { return kTop + (1.0 - ay.frac(v)) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(spec.title) << "</text>\n";
    o << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double tx = ax.lo + (ax.hi - ax.lo) * i / 4.0;
        const double ty = ay.lo + (ay.hi - ay.lo) * i / 4.0;
        const double gx = kLeft + pw * i / 4.0;
        const double gy = kTop + ph * (1.0 - i / 4.0);
        o << "<line x1=\"" << fmt(gx) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(gx) << "\" y2=\""
          << fmt(kTop + ph) << "\" stroke=\"#ddd\"/>\n";
        o << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(gy) << "\" x2=\"" << fmt(kLeft + pw) << "\" y2=\""
          << fmt(gy) << "\" stroke=\"#ddd\"/>\n";
        o << "<text x=\"" << fmt(gx) << "\" y=\"" << fmt(kTop + ph + 16) << "\" text-anchor=\"middle\">"
          << tick_label(ax.unmap(tx)) << "</text>\n";
        o << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(gy + 4) << "\" text-anchor=\"end\">"
          << tick_label(ay.unmap(ty)) << "</text>\n";
    }
    o << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 16) << "\" text-anchor=\"middle\">"
      << escape(spec.x_label) << "</text>\n";
    o << "<text transform=\"translate(18," << fmt(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(spec.y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const Series &s = series[k];
        const char *color = kColors[k % std::size(kColors)];
        std::ostringstream path;
        bool first = true;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            const bool ok = std::isfinite(s.x[i]) && std::isfinite(s.y[i]) &&
                            (!ax.log || s.x[i] > 0.0) && (!ay.log || s.y[i] > 0.0);
            if (!ok) {
                first = true;
                continue;
            }
            path << (first ? "M" : " L") << fmt(px(s.x[i])) << ' ' << fmt(py(s.y[i]));
            first = false;
            if (s.markers) {
                o << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i])) << "\" r=\"3\" fill=\""
                  << color << "\"/>\n";
            }
        }
        if (!s.markers) {
            o << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
        }
        o << "<text x=\"" << fmt(kLeft + 10) << "\" y=\"" << fmt(kTop + 16 + 16.0 * static_cast<double>(k))
          << "\" fill=\"" << color << "\">" << escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

double log_log_slope(const std::vector<double> &x, const std::vector<double> &y) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, n = 0.0;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly, n += 1.0;
    }
    const double denom = n * sxx - sx * sx;
    if (n < 2.0 || denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / denom;
}

}  // namespace gqcr::cli
