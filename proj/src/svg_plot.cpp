#include "screening/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace screening {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 450.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 30.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

constexpr std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v, double step) {
    char buf[32];
    const int digits = std::clamp(static_cast<int>(std::ceil(-std::log10(step))), 0, 6);
    std::snprintf(buf, sizeof buf, "%.*f", digits, std::abs(v) < 1e-12 * step ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

double nice_step(double span) {
    if (!(span > 0.0)) return 1.0;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    const double n = f < 1.5 ? 1.0 : f < 3.0 ? 2.0 : f < 7.0 ? 5.0 : 10.0;
    return n * mag;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin;
    double ymin = xmin;
    double ymax = -xmin;
    for (const auto& s : spec.series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    if (spec.y_max) ymax = std::min(ymax, *spec.y_max);
    ymin = std::min(ymin, 0.0);
    if (xmax <= xmin) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax <= ymin) ymax = ymin + 1.0;
    const double ystep = nice_step(ymax - ymin);
    ymin = std::floor(ymin / ystep) * ystep;
    ymax = std::ceil(ymax / ystep - 1e-9) * ystep;
    const double xstep = nice_step(xmax - xmin);

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(kWidth) << "\" height=\""
       << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << " " << num(kHeight) << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<defs><clipPath id=\"plot\"><rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\""
       << num(pw) << "\" height=\"" << num(ph) << "\"/></clipPath></defs>\n"
       << "<text x=\"" << num(kWidth / 2) << "\" y=\"28.00\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"16\">" << escape(spec.title) << "</text>\n";

    os << "<g font-family=\"sans-serif\" font-size=\"11\" stroke=\"none\" fill=\"black\">\n";
    for (double t = std::ceil(xmin / xstep - 1e-9) * xstep; t <= xmax + 1e-9 * xstep; t += xstep) {
        os << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(px(t)) << "\" y2=\""
           << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n"
           << "<text x=\"" << num(px(t)) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">"
           << tick_label(t, xstep) << "</text>\n";
    }
    for (double t = ymin; t <= ymax + 1e-9 * ystep; t += ystep) {
        os << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(kLeft + pw)
           << "\" y2=\"" << num(py(t)) << "\" stroke=\"#dddddd\"/>\n"
           << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">"
           << tick_label(t, ystep) << "</text>\n";
    }
    os << "</g>\n";
    os << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\""
       << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n"
       << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 18)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(spec.x_label)
       << "</text>\n"
       << "<text x=\"20.00\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"13\" transform=\"rotate(-90 20.00 " << num(kTop + ph / 2) << ")\">" << escape(spec.y_label)
       << "</text>\n";

    os << "<g clip-path=\"url(#plot)\" fill=\"none\" stroke-width=\"2\">\n";
    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const auto& s = spec.series[k];
        const char* color = kColors[k % kColors.size()];
        const std::size_t n = std::min(s.x.size(), s.y.size());
        if (n == 1) {
            os << "<circle cx=\"" << num(px(s.x[0])) << "\" cy=\"" << num(py(s.y[0])) << "\" r=\"5.00\" fill=\""
               << color << "\" stroke=\"" << color << "\"/>\n";
            continue;
        }
        os << "<polyline stroke=\"" << color << "\" points=\"";
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            os << (i ? " " : "") << num(px(s.x[i])) << "," << num(py(std::min(s.y[i], ymax + (ymax - ymin))));
        }
        os << "\"/>\n";
    }
    os << "</g>\n";

    os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const double y = kTop + 16.0 + 18.0 * static_cast<double>(k);
        const double x = kLeft + pw - 200.0;
        const char* color = kColors[k % kColors.size()];
        os << "<line x1=\"" << num(x) << "\" y1=\"" << num(y - 4) << "\" x2=\"" << num(x + 24) << "\" y2=\""
           << num(y - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
           << "<text x=\"" << num(x + 30) << "\" y=\"" << num(y) << "\">" << escape(spec.series[k].label)
           << "</text>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

}  // namespace screening
