#include "qisq/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>

namespace qisq {

namespace {

constexpr double width = 640.0;
constexpr double height = 440.0;
constexpr double margin_left = 72.0;
constexpr double margin_right = 24.0;
constexpr double margin_top = 36.0;
constexpr double margin_bottom = 56.0;

std::string fmt(const char* pattern, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, a);
    return buf;
}

std::string escape(const std::string& s)
{
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

std::string dash_attr(StrokeStyle s)
{
    switch (s) {
        case StrokeStyle::Dashed: return " stroke-dasharray=\"8 4\"";
        case StrokeStyle::Dotted: return " stroke-dasharray=\"2 3\"";
        case StrokeStyle::Solid: break;
    }
    return "";
}

bool above(double y, double floor) { return std::isfinite(y) && y >= floor; }

// Tick labels without trailing zeros, and "0" rather than "-0".
std::string tick_label(double v, double step)
{
    if (std::abs(v) < 1e-9 * step) v = 0.0;
    const int decimals = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step) - 1e-9));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

class Frame
{
public:
    explicit Frame(const PlotSpec& s) : s_(s) {}
    double px(double x) const
    {
        return margin_left + (x - s_.x_min) / (s_.x_max - s_.x_min) * (width - margin_left - margin_right);
    }
    double py(double y) const
    {
        return margin_top + (s_.y_max - y) / (s_.y_max - s_.db_floor) * (height - margin_top - margin_bottom);
    }
    std::string xy(double x, double y) const { return fmt("%.2f", px(x)) + "," + fmt("%.2f", py(y)); }

private:
    const PlotSpec& s_;
};

}  // namespace

void PlotSpec::validate() const
{
    for (double v : {x_min, x_max, x_tick, y_max, y_tick, db_floor}) {
        if (!std::isfinite(v)) throw std::invalid_argument("plot axis settings must be finite");
    }
    if (!(x_max > x_min)) throw std::invalid_argument("plot x range is empty");
    if (!(y_max > db_floor)) throw std::invalid_argument("plot floor must lie below the y maximum");
    if (!(x_tick > 0.0) || !(y_tick > 0.0)) throw std::invalid_argument("tick spacing must be positive");
    if ((x_max - x_min) / x_tick > 100 || (y_max - db_floor) / y_tick > 100) {
        throw std::invalid_argument("too many ticks");
    }
    std::set<std::string> ids;
    for (const auto& c : curves) {
        if (c.xs.size() != c.ys.size()) throw std::invalid_argument("curve " + c.id + ": xs/ys size mismatch");
        if (!ids.insert(c.id).second) throw std::invalid_argument("duplicate curve id " + c.id);
        for (double x : c.xs) {
            if (!std::isfinite(x)) throw std::invalid_argument("curve " + c.id + ": non-finite x");
        }
        for (double y : c.ys) {
            if (std::isnan(y) || y == std::numeric_limits<double>::infinity()) {
                throw std::invalid_argument("curve " + c.id + ": y must be finite or -inf");
            }
        }
    }
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !(p.x_err >= 0.0) || !(p.y_err >= 0.0)) {
            throw std::invalid_argument("point " + p.label + ": bad coordinates or error bars");
        }
    }
}

std::vector<ClippedRun> clip_to_floor(const std::vector<double>& xs, const std::vector<double>& ys,
                                      double floor)
{
    std::vector<ClippedRun> runs;
    ClippedRun current;
    const auto flush = [&] {
        if (!current.xs.empty()) runs.push_back(std::move(current));
        current = {};
    };
    const auto crossing = [&](std::size_t i, std::size_t j) {
        // Where the segment i -> j meets the floor; an infinite end pins it there.
        if (!std::isfinite(ys[j])) return xs[j];
        if (!std::isfinite(ys[i])) return xs[i];
        return xs[i] + (floor - ys[i]) / (ys[j] - ys[i]) * (xs[j] - xs[i]);
    };
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const bool up = above(ys[i], floor);
        if (up && current.xs.empty() && i > 0) {
            current.xs.push_back(crossing(i - 1, i));
            current.ys.push_back(floor);
            current.open_start = true;
        }
        if (up) {
            current.xs.push_back(xs[i]);
            current.ys.push_back(ys[i]);
            continue;
        }
        if (!current.xs.empty()) {
            const double xc = crossing(i - 1, i);
            if (xc != current.xs.back() || current.ys.back() != floor) {
                current.xs.push_back(xc);
                current.ys.push_back(floor);
            }
            current.open_end = true;
            flush();
        }
    }
    flush();
    return runs;
}

std::string render_svg(const PlotSpec& spec)
{
    spec.validate();
    const Frame f(spec);
    const double left = margin_left;
    const double right = width - margin_right;
    const double top = margin_top;
    const double bottom = height - margin_bottom;

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", width) + "\" height=\"" +
           fmt("%.0f", height) + "\" viewBox=\"0 0 " + fmt("%.0f", width) + " " + fmt("%.0f", height) +
           "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<defs><clipPath id=\"plot-area\"><rect x=\"" + fmt("%.2f", left) + "\" y=\"" + fmt("%.2f", top) +
           "\" width=\"" + fmt("%.2f", right - left) + "\" height=\"" + fmt("%.2f", bottom - top) +
           "\"/></clipPath></defs>\n";
    if (!spec.title.empty()) {
        out += "<text x=\"" + fmt("%.2f", width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
               escape(spec.title) + "</text>\n";
    }

    // axes and ticks
    out += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    out += "<rect x=\"" + fmt("%.2f", left) + "\" y=\"" + fmt("%.2f", top) + "\" width=\"" +
           fmt("%.2f", right - left) + "\" height=\"" + fmt("%.2f", bottom - top) + "\"/>\n";
    const int nx = static_cast<int>(std::floor((spec.x_max - spec.x_min) / spec.x_tick + 1e-9));
    const int ny = static_cast<int>(std::floor((spec.y_max - spec.db_floor) / spec.y_tick + 1e-9));
    for (int i = 0; i <= nx; ++i) {
        const double x = f.px(spec.x_min + i * spec.x_tick);
        out += "<line x1=\"" + fmt("%.2f", x) + "\" y1=\"" + fmt("%.2f", bottom) + "\" x2=\"" + fmt("%.2f", x) +
               "\" y2=\"" + fmt("%.2f", bottom + 5) + "\"/>\n";
    }
    for (int i = 0; i <= ny; ++i) {
        const double y = f.py(spec.y_max - i * spec.y_tick);
        out += "<line x1=\"" + fmt("%.2f", left - 5) + "\" y1=\"" + fmt("%.2f", y) + "\" x2=\"" +
               fmt("%.2f", left) + "\" y2=\"" + fmt("%.2f", y) + "\"/>\n";
    }
    out += "</g>\n<g fill=\"black\">\n";
    for (int i = 0; i <= nx; ++i) {
        const double v = spec.x_min + i * spec.x_tick;
        out += "<text x=\"" + fmt("%.2f", f.px(v)) + "\" y=\"" + fmt("%.2f", bottom + 19) +
               "\" text-anchor=\"middle\">" + tick_label(v, spec.x_tick) + "</text>\n";
    }
    for (int i = 0; i <= ny; ++i) {
        const double v = spec.y_max - i * spec.y_tick;
        out += "<text x=\"" + fmt("%.2f", left - 8) + "\" y=\"" + fmt("%.2f", f.py(v) + 4) +
               "\" text-anchor=\"end\">" + tick_label(v, spec.y_tick) + "</text>\n";
    }
    out += "<text x=\"" + fmt("%.2f", (left + right) / 2) + "\" y=\"" + fmt("%.2f", height - 14) +
           "\" text-anchor=\"middle\">" + escape(spec.x_label) + "</text>\n";
    out += "<text x=\"18\" y=\"" + fmt("%.2f", (top + bottom) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           fmt("%.2f", (top + bottom) / 2) + ")\">" + escape(spec.y_label) + "</text>\n";
    out += "</g>\n";

    // curves
    out += "<g clip-path=\"url(#plot-area)\" fill=\"none\">\n";
    for (const auto& c : spec.curves) {
        out += "<g id=\"" + escape(c.id) + "\" stroke=\"black\" stroke-width=\"" + fmt("%.2f", c.stroke_width) +
               "\"" + dash_attr(c.style) + ">\n";
        for (const auto& run : clip_to_floor(c.xs, c.ys, spec.db_floor)) {
            out += "<polyline points=\"";
            for (std::size_t i = 0; i < run.xs.size(); ++i) {
                if (i > 0) out += ' ';
                out += f.xy(run.xs[i], run.ys[i]);
            }
            out += "\"/>\n";
            if (run.open_start) {
                out += "<circle cx=\"" + fmt("%.2f", f.px(run.xs.front())) + "\" cy=\"" +
                       fmt("%.2f", f.py(run.ys.front()) - 3) +
                       "\" r=\"3\" fill=\"white\" stroke-dasharray=\"none\" stroke-width=\"1\"/>\n";
            }
            if (run.open_end) {
                out += "<circle cx=\"" + fmt("%.2f", f.px(run.xs.back())) + "\" cy=\"" +
                       fmt("%.2f", f.py(run.ys.back()) - 3) +
                       "\" r=\"3\" fill=\"white\" stroke-dasharray=\"none\" stroke-width=\"1\"/>\n";
            }
        }
        out += "</g>\n";
    }
    out += "</g>\n";

    // points with error rectangles
    if (!spec.points.empty()) {
        out += "<g clip-path=\"url(#plot-area)\" stroke=\"black\" stroke-width=\"1\">\n";
        for (const auto& p : spec.points) {
            const double y = std::max(p.y, spec.db_floor);
            const double x0 = f.px(p.x - p.x_err);
            const double x1 = f.px(p.x + p.x_err);
            const double y0 = f.py(std::max(p.y + p.y_err, spec.db_floor));
            const double y1 = f.py(std::max(p.y - p.y_err, spec.db_floor));
            out += "<rect x=\"" + fmt("%.2f", x0) + "\" y=\"" + fmt("%.2f", y0) + "\" width=\"" +
                   fmt("%.2f", x1 - x0) + "\" height=\"" + fmt("%.2f", y1 - y0) + "\" fill=\"none\"/>\n";
            out += "<circle cx=\"" + fmt("%.2f", f.px(p.x)) + "\" cy=\"" + fmt("%.2f", f.py(y)) + "\" r=\"2.5\" fill=\"" +
                   (p.y < spec.db_floor ? "white" : "black") + "\"><title>" + escape(p.label) + "</title></circle>\n";
        }
        out += "</g>\n";
    }

    // legend
    if (!spec.curves.empty()) {
        const double lx = right - 190;
        double ly = bottom - 14.0 * static_cast<double>(spec.curves.size()) - 6;
        out += "<g font-size=\"10\">\n";
        for (const auto& c : spec.curves) {
            out += "<line x1=\"" + fmt("%.2f", lx) + "\" y1=\"" + fmt("%.2f", ly) + "\" x2=\"" + fmt("%.2f", lx + 24) +
                   "\" y2=\"" + fmt("%.2f", ly) + "\" stroke=\"black\" stroke-width=\"" + fmt("%.2f", c.stroke_width) +
                   "\"" + dash_attr(c.style) + "/>\n";
            out += "<text x=\"" + fmt("%.2f", lx + 30) + "\" y=\"" + fmt("%.2f", ly + 3.5) + "\">" +
                   escape(c.label.empty() ? c.id : c.label) + "</text>\n";
            ly += 14.0;
        }
        out += "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace qisq
