#include "conefrac/svg.hpp"

#include "conefrac/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace conefrac {

namespace {

const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
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
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    bool log = false;
    double lo = 0.0, hi = 1.0;

    double map(double v) const { return log ? std::log10(v) : v; }
    bool valid(double v) const { return std::isfinite(v) && (!log || v > 0.0); }

    void fit(const std::vector<double>& values) {
        double a = std::numeric_limits<double>::infinity(), b = -a;
        for (double v : values) {
            if (!valid(v)) continue;
            a = std::min(a, map(v));
            b = std::max(b, map(v));
        }
        if (!std::isfinite(a)) {
            a = 0.0;
            b = 1.0;
        }
        if (b - a < 1e-12 * std::max(1.0, std::abs(a))) {
            a -= 0.5;
            b += 0.5;
        } else if (!log) {
            const double pad = 0.05 * (b - a);
            a -= pad;
            b += pad;
        }
        lo = a;
        hi = b;
    }

    // Tick positions in mapped coordinates.
    std::vector<double> ticks() const {
        std::vector<double> t;
        if (log) {
            for (double e = std::ceil(lo); e <= hi + 1e-12; e += 1.0) t.push_back(e);
            if (t.size() < 2) t = {lo, hi};
            return t;
        }
        const double raw = (hi - lo) / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 5.0, 10.0})
            if (m * mag >= raw) {
                step = m * mag;
                break;
            }
        for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * step; v += step) t.push_back(v);
        return t;
    }

    std::string tick_label(double mapped) const { return label(log ? std::pow(10.0, mapped) : mapped); }
};

}  // namespace

std::string render_svg(const PlotSpec& spec, int width, int height) {
    const double left = 70, right = 20 + (spec.series.size() > 1 ? 120 : 0), top = 36, bottom = 50;
    const double pw = width - left - right, ph = height - top - bottom;
    Axis ax, ay;
    ax.log = spec.log_x;
    ay.log = spec.log_y;
    std::vector<double> xs, ys;
    for (const auto& s : spec.series) {
        xs.insert(xs.end(), s.x.begin(), s.x.end());
        ys.insert(ys.end(), s.y.begin(), s.y.end());
    }
    for (const auto& [y, _] : spec.reference_y) ys.push_back(y);
    ax.fit(xs);
    ay.fit(ys);
    auto px = [&](double v) { return left + (ax.map(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
    auto py = [&](double v) { return top + ph - (ay.map(v) - ay.lo) / (ay.hi - ay.lo) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << num(left + pw / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(spec.title) << "</text>\n";
    os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ax.ticks()) {
        const double x = left + (t - ax.lo) / (ax.hi - ax.lo) * pw;
        os << "<line x1=\"" << num(x) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(x) << "\" y2=\""
           << num(top + ph + 5) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << num(x) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">"
           << ax.tick_label(t) << "</text>\n";
    }
    for (double t : ay.ticks()) {
        const double y = top + ph - (t - ay.lo) / (ay.hi - ay.lo) * ph;
        os << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left) << "\" y2=\"" << num(y)
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << num(left - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << ay.tick_label(t)
           << "</text>\n";
    }
    os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">"
       << escape(spec.xlabel) << "</text>\n";
    os << "<text transform=\"translate(16," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(spec.ylabel) << "</text>\n";
    for (const auto& [y, name] : spec.reference_y) {
        if (!ay.valid(y)) continue;
        os << "<line x1=\"" << num(left) << "\" y1=\"" << num(py(y)) << "\" x2=\"" << num(left + pw) << "\" y2=\""
           << num(py(y)) << "\" stroke=\"gray\" stroke-dasharray=\"5,4\"/>\n";
        os << "<text x=\"" << num(left + pw - 4) << "\" y=\"" << num(py(y) - 4) << "\" text-anchor=\"end\" fill=\"gray\">"
           << escape(name) << "</text>\n";
    }
    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const auto& s = spec.series[k];
        const char* color = palette[k % (sizeof palette / sizeof *palette)];
        const std::size_t n = std::min(s.x.size(), s.y.size());
        if (s.line) {
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < n; ++i)
                if (ax.valid(s.x[i]) && ay.valid(s.y[i])) os << num(px(s.x[i])) << "," << num(py(s.y[i])) << " ";
            os << "\"/>\n";
        }
        if (s.markers) {
            for (std::size_t i = 0; i < n; ++i)
                if (ax.valid(s.x[i]) && ay.valid(s.y[i]))
                    os << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i])) << "\" r=\"3\" fill=\""
                       << color << "\"/>\n";
        }
        if (spec.series.size() > 1) {
            const double ly = top + 14 + 16 * static_cast<double>(k);
            os << "<line x1=\"" << num(left + pw + 10) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(left + pw + 28)
               << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
            os << "<text x=\"" << num(left + pw + 32) << "\" y=\"" << num(ly) << "\">" << escape(s.label) << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

void write_svg(const std::string& path, const PlotSpec& spec) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path);
    os << render_svg(spec);
}

}  // namespace conefrac
