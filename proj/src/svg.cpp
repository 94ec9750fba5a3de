#include "lhsm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace lhsm::io {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                          "#d62728", "#9467bd", "#8c564b"};
constexpr int kPaletteSize = 6;

std::string num(double v, int prec = 2) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

std::string tick_label(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

// Tick spacing of 1, 2 or 5 times a power of ten, aiming for ~5 ticks.
double nice_step(double range) {
    if (!(range > 0))
        return 1;
    const double raw = range / 5;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    if (r < 1.5)
        return mag;
    if (r < 3.5)
        return 2 * mag;
    if (r < 7.5)
        return 5 * mag;
    return 10 * mag;
}

} // namespace

std::string render_line_plot(const PlotSpec& spec,
                             const std::vector<Series>& series) {
    const double inf = std::numeric_limits<double>::infinity();
    double x_lo = inf, x_hi = -inf, y_lo = inf, y_hi = -inf;

    // Transformed, plottable copies of the series.
    std::vector<Series> data;
    for (const auto& s : series) {
        Series t;
        t.label = s.label;
        const std::size_t n = std::min(s.x.size(), s.y.size());
        for (std::size_t i = 0; i < n; ++i) {
            double x = s.x[i], y = s.y[i];
            if (!std::isfinite(x) || !std::isfinite(y))
                continue;
            if (spec.log_y) {
                if (!(y > 0))
                    continue;
                y = std::log10(y);
            }
            t.x.push_back(x);
            t.y.push_back(y);
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
        data.push_back(std::move(t));
    }

    if (spec.y_min != spec.y_max) {
        y_lo = spec.log_y ? std::log10(std::max(spec.y_min, 1e-300))
                          : spec.y_min;
        y_hi = spec.log_y ? std::log10(std::max(spec.y_max, 1e-300))
                          : spec.y_max;
    }
    if (!(x_lo < x_hi)) {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    if (!(y_lo < y_hi)) {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    if (!std::isfinite(x_lo) || !std::isfinite(y_lo)) {
        x_lo = y_lo = 0;
        x_hi = y_hi = 1;
    }
    // Breathing room above and below the data.
    const double y_pad = 0.06 * (y_hi - y_lo);
    if (spec.y_min == spec.y_max) {
        y_lo -= y_pad;
        y_hi += y_pad;
    }

    const int w = spec.width, h = spec.height;
    const int ml = 72, mr = 18, mt = 42, mb = 56;
    const double pw = w - ml - mr, ph = h - mt - mb;
    auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * pw; };
    auto py = [&](double y) {
        return mt + (1 - (y - y_lo) / (y_hi - y_lo)) * ph;
    };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(w) + "\" height=\"" + std::to_string(h) +
           "\" viewBox=\"0 0 " + std::to_string(w) + " " +
           std::to_string(h) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + std::to_string(w / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" +
           xml_escape(spec.title) + "</text>\n";

    // Gridlines and ticks.
    const double xs = nice_step(x_hi - x_lo);
    const double ys = nice_step(y_hi - y_lo);
    out += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">\n";
    for (double x = std::ceil(x_lo / xs) * xs; x <= x_hi + 1e-9 * xs;
         x += xs) {
        const double X = px(x);
        out += "<line x1=\"" + num(X) + "\" y1=\"" + num(double(mt)) +
               "\" x2=\"" + num(X) + "\" y2=\"" + num(mt + ph) +
               "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        out += "<text x=\"" + num(X) + "\" y=\"" + num(mt + ph + 16) +
               "\" text-anchor=\"middle\">" + tick_label(x) + "</text>\n";
    }
    for (double y = std::ceil(y_lo / ys) * ys; y <= y_hi + 1e-9 * ys;
         y += ys) {
        const double Y = py(y);
        out += "<line x1=\"" + num(double(ml)) + "\" y1=\"" + num(Y) +
               "\" x2=\"" + num(ml + pw) + "\" y2=\"" + num(Y) +
               "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
        const std::string lbl =
            spec.log_y ? ("1e" + tick_label(y)) : tick_label(y);
        out += "<text x=\"" + num(ml - 6) + "\" y=\"" + num(Y + 4) +
               "\" text-anchor=\"end\">" + lbl + "</text>\n";
    }
    out += "</g>\n";

    // Axes.
    out += "<rect x=\"" + std::to_string(ml) + "\" y=\"" +
           std::to_string(mt) + "\" width=\"" + num(pw) + "\" height=\"" +
           num(ph) + "\" fill=\"none\" stroke=\"#333\"/>\n";
    out += "<text x=\"" + std::to_string(ml + int(pw) / 2) + "\" y=\"" +
           std::to_string(h - 12) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">" +
           xml_escape(spec.x_label) + "</text>\n";
    out += "<text x=\"16\" y=\"" + std::to_string(mt + int(ph) / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\" transform=\"rotate(-90 16 " +
           std::to_string(mt + int(ph) / 2) + ")\">" +
           xml_escape(spec.y_label) + "</text>\n";

    // Series.
    for (std::size_t si = 0; si < data.size(); ++si) {
        const auto& s = data[si];
        const char* color = kPalette[si % kPaletteSize];
        if (s.x.size() > 1) {
            std::string pts;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                // Clip to the plot box rather than drawing outside it.
                const double X = std::clamp(px(s.x[i]), double(ml), ml + pw);
                const double Y = std::clamp(py(s.y[i]), double(mt), mt + ph);
                pts += num(X) + "," + num(Y) + " ";
            }
            out += "<polyline points=\"" + pts +
                   "\" fill=\"none\" stroke=\"" + std::string(color) +
                   "\" stroke-width=\"1.6\"/>\n";
        }
        if (spec.markers || s.x.size() == 1) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                const double X = std::clamp(px(s.x[i]), double(ml), ml + pw);
                const double Y = std::clamp(py(s.y[i]), double(mt), mt + ph);
                out += "<circle cx=\"" + num(X) + "\" cy=\"" + num(Y) +
                       "\" r=\"2.6\" fill=\"" + std::string(color) + "\"/>\n";
            }
        }
    }

    // Legend, top-right corner of the plot box.
    double ly = mt + 14;
    for (std::size_t si = 0; si < data.size(); ++si) {
        if (data[si].label.empty())
            continue;
        const char* color = kPalette[si % kPaletteSize];
        const double lx = ml + pw - 170;
        out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) +
               "\" x2=\"" + num(lx + 22) + "\" y2=\"" + num(ly - 4) +
               "\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + num(lx + 28) + "\" y=\"" + num(ly) +
               "\" font-family=\"sans-serif\" font-size=\"12\" "
               "fill=\"#222\">" +
               xml_escape(data[si].label) + "</text>\n";
        ly += 17;
    }

    out += "</svg>\n";
    return out;
}

} // namespace lhsm::io
