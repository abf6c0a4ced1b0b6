#include "ctsid/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ctsid {

namespace {

constexpr double kWidth = 840.0;
constexpr double kPanelHeight = 250.0;
constexpr double kMarginLeft = 78.0;
constexpr double kMarginRight = 22.0;
constexpr double kMarginTop = 46.0;
constexpr double kPanelGap = 24.0;
constexpr double kMarginBottom = 52.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
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

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void absorb(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool valid() const { return lo <= hi; }
    void pad() {
        if (!valid()) {
            lo = 0.0;
            hi = 1.0;
        } else if (hi - lo < 1e-300) {
            const double w = std::max(1.0, std::abs(hi)) * 0.1;
            lo -= w;
            hi += w;
        } else {
            const double w = (hi - lo) * 0.06;
            lo -= w;
            hi += w;
        }
    }
};

// Tick positions at a "nice" spacing (1, 2, or 5 times a power of ten).
std::vector<double> nice_ticks(double lo, double hi, int target) {
    std::vector<double> ticks;
    const double span = hi - lo;
    if (!(span > 0.0)) return ticks;
    double step = std::pow(10.0, std::floor(std::log10(span / target)));
    const double err = span / (target * step);
    if (err >= 7.5) step *= 10.0;
    else if (err >= 3.5) step *= 5.0;
    else if (err >= 1.5) step *= 2.0;
    double t = std::ceil(lo / step) * step;
    for (; t <= hi + 0.5 * step; t += step) ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    return ticks;
}

std::string tick_label(double v, bool log_axis) {
    std::ostringstream os;
    if (log_axis) {
        os << "1e" << (std::abs(v - std::round(v)) < 1e-9 ? fmt(std::round(v)) : fmt(v));
    } else {
        os.precision(4);
        os << v;
    }
    return os.str();
}

}  // namespace

void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::vector<PlotPanel>& panels) {
    const size_t n_panels = std::max<size_t>(panels.size(), 1);
    const double height =
        kMarginTop + n_panels * kPanelHeight + (n_panels - 1) * kPanelGap + kMarginBottom;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << height << "\" viewBox=\"0 0 " << kWidth << " " << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty()) {
        out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\""
            << " text-anchor=\"middle\">" << escape_xml(title) << "</text>\n";
    }

    for (size_t pi = 0; pi < panels.size(); ++pi) {
        const PlotPanel& panel = panels[pi];
        const double top = kMarginTop + pi * (kPanelHeight + kPanelGap);
        const double left = kMarginLeft;
        const double plot_w = kWidth - kMarginLeft - kMarginRight;
        const double plot_h = kPanelHeight - 36.0;

        auto tx = [&](double v) { return panel.log_x ? std::log10(v) : v; };
        auto ty = [&](double v) { return panel.log_y ? std::log10(v) : v; };
        auto usable = [&](double x, double y) {
            if (!std::isfinite(x) || !std::isfinite(y)) return false;
            if (panel.log_x && !(x > 0.0)) return false;
            if (panel.log_y && !(y > 0.0)) return false;
            return true;
        };

        Range rx, ry;
        for (const PlotSeries& s : panel.series) {
            const size_t len = std::min(s.x.size(), s.y.size());
            for (size_t k = 0; k < len; ++k) {
                if (!usable(s.x[k], s.y[k])) continue;
                rx.absorb(tx(s.x[k]));
                ry.absorb(ty(s.y[k]));
            }
        }
        for (double g : panel.reference_lines) {
            if (std::isfinite(g) && (!panel.log_y || g > 0.0)) ry.absorb(ty(g));
        }
        const bool empty = !rx.valid();
        rx.pad();
        ry.pad();

        auto px = [&](double v) { return left + (tx(v) - rx.lo) / (rx.hi - rx.lo) * plot_w; };
        auto py = [&](double v) { return top + plot_h - (ty(v) - ry.lo) / (ry.hi - ry.lo) * plot_h; };

        out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w
            << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
        if (!panel.title.empty()) {
            out << "<text x=\"" << left + 4 << "\" y=\"" << top - 6
                << "\" font-family=\"sans-serif\" font-size=\"13\">" << escape_xml(panel.title)
                << "</text>\n";
        }

        for (double t : nice_ticks(rx.lo, rx.hi, 6)) {
            const double x = left + (t - rx.lo) / (rx.hi - rx.lo) * plot_w;
            out << "<line x1=\"" << x << "\" y1=\"" << top << "\" x2=\"" << x << "\" y2=\""
                << top + plot_h << "\" stroke=\"#ddd\"/>\n"
                << "<text x=\"" << x << "\" y=\"" << top + plot_h + 16
                << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
                << tick_label(t, panel.log_x) << "</text>\n";
        }
        for (double t : nice_ticks(ry.lo, ry.hi, 5)) {
            const double y = top + plot_h - (t - ry.lo) / (ry.hi - ry.lo) * plot_h;
            out << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + plot_w
                << "\" y2=\"" << y << "\" stroke=\"#ddd\"/>\n"
                << "<text x=\"" << left - 6 << "\" y=\"" << y + 4
                << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
                << tick_label(t, panel.log_y) << "</text>\n";
        }
        if (!panel.x_label.empty()) {
            out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << top + plot_h + 32
                << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
                << escape_xml(panel.x_label) << "</text>\n";
        }
        if (!panel.y_label.empty()) {
            const double yc = top + plot_h / 2;
            out << "<text x=\"18\" y=\"" << yc << "\" font-family=\"sans-serif\" font-size=\"12\""
                << " text-anchor=\"middle\" transform=\"rotate(-90 18 " << yc << ")\">"
                << escape_xml(panel.y_label) << "</text>\n";
        }

        for (double g : panel.reference_lines) {
            if (!std::isfinite(g) || (panel.log_y && !(g > 0.0))) continue;
            const double y = py(g);
            out << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + plot_w
                << "\" y2=\"" << y << "\" stroke=\"#555\" stroke-dasharray=\"6 4\"/>\n";
        }

        for (size_t si = 0; si < panel.series.size(); ++si) {
            const PlotSeries& s = panel.series[si];
            const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
            const size_t len = std::min(s.x.size(), s.y.size());
            std::ostringstream pts;
            bool open = false;
            auto flush = [&]() {
                if (open) {
                    out << "<polyline fill=\"none\" stroke=\"" << color
                        << "\" stroke-width=\"1.6\" points=\"" << pts.str() << "\"/>\n";
                }
                pts.str("");
                open = false;
            };
            for (size_t k = 0; k < len; ++k) {
                if (!usable(s.x[k], s.y[k])) {
                    flush();
                    continue;
                }
                pts << fmt(px(s.x[k])) << ',' << fmt(py(s.y[k])) << ' ';
                open = true;
            }
            flush();
            for (size_t k = 0; k < len; ++k) {
                if (!usable(s.x[k], s.y[k])) continue;
                out << "<circle cx=\"" << fmt(px(s.x[k])) << "\" cy=\"" << fmt(py(s.y[k]))
                    << "\" r=\"2.2\" fill=\"" << color << "\"/>\n";
            }
            const double lx = left + plot_w - 150.0;
            const double ly = top + 14.0 + 15.0 * si;
            out << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 18
                << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
                << "<text x=\"" << lx + 24 << "\" y=\"" << ly
                << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(s.label)
                << "</text>\n";
        }
        if (empty) {
            out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << top + plot_h / 2
                << "\" font-family=\"sans-serif\" font-size=\"13\" fill=\"#888\""
                << " text-anchor=\"middle\">no data</text>\n";
        }
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("failed while writing " + path.string());
}

}  // namespace ctsid
