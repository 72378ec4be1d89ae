/* Copyright 2026 The supreg Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <supreg/svg.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace supreg::svg {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

struct Frame {
    double x0, y0, w, h;       // pixel box
    double xmin, xmax, ymin, ymax;

    double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
    double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

void widen(double& lo, double& hi) {
    if (!(hi > lo)) {
        const double pad = std::max(1.0, std::abs(lo) * 0.05);
        lo -= pad;
        hi += pad;
    }
}

void axes(std::ostringstream& o, const Frame& f, std::string_view xlabel, std::string_view ylabel) {
    o << "<rect x=\"" << num(f.x0) << "\" y=\"" << num(f.y0) << "\" width=\"" << num(f.w)
      << "\" height=\"" << num(f.h) << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = f.xmin + (f.xmax - f.xmin) * i / 4.0;
        const double yv = f.ymin + (f.ymax - f.ymin) * i / 4.0;
        o << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << num(f.y0 + f.h + 14)
          << "\" font-size=\"10\" text-anchor=\"middle\">" << num(xv) << "</text>\n";
        o << "<text x=\"" << num(f.x0 - 4) << "\" y=\"" << num(f.py(yv) + 3)
          << "\" font-size=\"10\" text-anchor=\"end\">" << num(yv) << "</text>\n";
    }
    o << "<text x=\"" << num(f.x0 + f.w / 2) << "\" y=\"" << num(f.y0 + f.h + 30)
      << "\" font-size=\"11\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
    o << "<text x=\"" << num(f.x0 - 44) << "\" y=\"" << num(f.y0 + f.h / 2)
      << "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 " << num(f.x0 - 44)
      << ' ' << num(f.y0 + f.h / 2) << ")\">" << escape(ylabel) << "</text>\n";
}

void open(std::ostringstream& o, double width, double height) {
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
      << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height)
      << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

} // namespace

std::string sweep_plot(const regimes::SweepResult& sweep, std::span<const double> thresholds,
                       std::string_view title) {
    std::ostringstream o;
    open(o, 640, 420);
    double mmax = 2.0;
    for (const auto& p : sweep.points)
        mmax = std::max(mmax, static_cast<double>(p.regime_count));
    Frame f{70, 40, 540, 320, 1.0, mmax, 0.0, 1.0};
    o << "<text x=\"320\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">" << escape(title)
      << "</text>\n";
    axes(o, f, "number of regimes", "unexplained variance ratio");
    for (double t : thresholds) {
        const double y = f.py(1.0 - t);
        o << "<line x1=\"" << num(f.x0) << "\" y1=\"" << num(y) << "\" x2=\"" << num(f.x0 + f.w)
          << "\" y2=\"" << num(y) << "\" stroke=\"#c33\" stroke-dasharray=\"4 3\"/>\n";
        o << "<text x=\"" << num(f.x0 + f.w - 4) << "\" y=\"" << num(y - 3)
          << "\" font-size=\"10\" text-anchor=\"end\" fill=\"#c33\">" << num(t * 100.0)
          << "%</text>\n";
    }
    if (!sweep.points.empty()) {
        o << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
        for (const auto& p : sweep.points)
            o << num(f.px(static_cast<double>(p.regime_count))) << ',' << num(f.py(p.unexplained_ratio))
              << ' ';
        o << "\"/>\n";
        for (const auto& p : sweep.points)
            o << "<circle cx=\"" << num(f.px(static_cast<double>(p.regime_count))) << "\" cy=\""
              << num(f.py(p.unexplained_ratio)) << "\" r=\"2.5\" fill=\"#1f77b4\"/>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::string curves_plot(const regimes::RegimeCurveSet& set, const EquilibriumSeries& equilibria,
                        std::size_t max_points) {
    const std::size_t n = set.regimes.size();
    const std::size_t cols = std::min<std::size_t>(n, 4);
    const std::size_t rows = (n + cols - 1) / std::max<std::size_t>(cols, 1);
    const double pw = 260, ph = 200, mx = 60, my = 50;
    std::ostringstream o;
    open(o, cols * (pw + mx) + 20, rows * (ph + my) + 20);

    double qmin = std::numeric_limits<double>::infinity(), qmax = -qmin;
    double pmin = qmin, pmax = -qmin;
    for (const auto& e : equilibria.observations()) {
        qmin = std::min(qmin, e.residual_load);
        qmax = std::max(qmax, e.residual_load);
        pmin = std::min(pmin, e.price);
        pmax = std::max(pmax, e.price);
    }
    widen(qmin, qmax);
    widen(pmin, pmax);

    for (std::size_t r = 0; r < n; ++r) {
        const auto& reg = set.regimes[r];
        const double x0 = 60 + static_cast<double>(r % cols) * (pw + mx);
        const double y0 = 30 + static_cast<double>(r / cols) * (ph + my);
        Frame f{x0, y0, pw, ph, qmin, qmax, pmin, pmax};
        std::string title = "regime " + std::to_string(r + 1);
        if (set.dates.size() > reg.last_day)
            title += ": " + format_date(set.dates[reg.first_day]) + " to " +
                     format_date(set.dates[reg.last_day]);
        o << "<text x=\"" << num(x0 + pw / 2) << "\" y=\"" << num(y0 - 8)
          << "\" font-size=\"11\" text-anchor=\"middle\">" << escape(title) << "</text>\n";
        axes(o, f, "residual load (MW)", "price (EUR/MWh)");
        const auto obs = equilibria.day_range(reg.first_day, reg.last_day);
        const std::size_t stride = std::max<std::size_t>(1, (obs.size() + max_points - 1) / max_points);
        o << "<g fill=\"#1f77b4\" fill-opacity=\"0.35\">\n";
        for (std::size_t i = 0; i < obs.size(); i += stride)
            o << "<circle cx=\"" << num(f.px(obs[i].residual_load)) << "\" cy=\""
              << num(f.py(std::clamp(obs[i].price, pmin, pmax))) << "\" r=\"1.2\"/>\n";
        o << "</g>\n<polyline fill=\"none\" stroke=\"#ff7f0e\" stroke-width=\"2\" points=\"";
        for (double q : reg.fit.curve.breakpoints)
            o << num(f.px(q)) << ',' << num(f.py(std::clamp(pwlf::evaluate(reg.fit.curve, q), pmin, pmax)))
              << ' ';
        o << "\"/>\n";
        o << "<text x=\"" << num(x0 + 6) << "\" y=\"" << num(y0 + 14) << "\" font-size=\"10\">R2 = "
          << num(reg.fit.r_squared) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::string similarity_heatmap(const regimes::SimilarityMatrix& matrix) {
    const std::size_t n = matrix.size;
    const double cell = std::clamp(480.0 / std::max<std::size_t>(n, 1), 12.0, 48.0);
    const double x0 = 50, y0 = 40;
    std::ostringstream o;
    open(o, x0 + cell * n + 120, y0 + cell * n + 40);
    double vmax = 0.0;
    for (const auto& v : matrix.mean_abs)
        if (v)
            vmax = std::max(vmax, *v);
    if (vmax <= 0.0)
        vmax = 1.0;
    o << "<text x=\"" << num(x0) << "\" y=\"24\" font-size=\"13\">mean absolute curve distance (EUR/MWh)</text>\n";
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto& v = matrix.mean_abs[i * n + j];
            std::string fill = "#bbbbbb";
            if (v) {
                const double t = std::clamp(*v / vmax, 0.0, 1.0);
                const int r = static_cast<int>(255 - t * (255 - 8));
                const int g = static_cast<int>(255 - t * (255 - 48));
                const int b = static_cast<int>(255 - t * (255 - 107));
                char buf[8];
                std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
                fill = buf;
            }
            o << "<rect x=\"" << num(x0 + j * cell) << "\" y=\"" << num(y0 + i * cell)
              << "\" width=\"" << num(cell) << "\" height=\"" << num(cell) << "\" fill=\"" << fill
              << "\" stroke=\"white\"/>\n";
            if (v && cell >= 28)
                o << "<text x=\"" << num(x0 + (j + 0.5) * cell) << "\" y=\"" << num(y0 + (i + 0.5) * cell + 3)
                  << "\" font-size=\"9\" text-anchor=\"middle\">" << num(*v) << "</text>\n";
        }
        o << "<text x=\"" << num(x0 - 4) << "\" y=\"" << num(y0 + (i + 0.5) * cell + 3)
          << "\" font-size=\"10\" text-anchor=\"end\">" << i + 1 << "</text>\n";
        o << "<text x=\"" << num(x0 + (i + 0.5) * cell) << "\" y=\"" << num(y0 - 4)
          << "\" font-size=\"10\" text-anchor=\"middle\">" << i + 1 << "</text>\n";
    }
    o << "<text x=\"" << num(x0 + cell * n + 10) << "\" y=\"" << num(y0 + 12)
      << "\" font-size=\"10\">max " << num(vmax) << "</text>\n";
    o << "</svg>\n";
    return o.str();
}

} // namespace supreg::svg
