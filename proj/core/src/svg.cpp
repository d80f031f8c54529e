#include "kslab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace kslab {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 440;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 160;  // legend column
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 55;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double exponent) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "1e%d", static_cast<int>(std::lround(exponent)));
    return buf;
}

}  // namespace

void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series) {
    // Ranges over the positive, unpinned data.
    double x_min = 0.0, x_max = 1.0, y_min = -1.0, y_max = 1.0;
    bool any_x = false, any_y = false;
    for (const SvgSeries& s : series) {
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (s.xs[i] <= 0.0) continue;
            const double lx = std::log10(s.xs[i]);
            x_min = any_x ? std::min(x_min, lx) : lx;
            x_max = any_x ? std::max(x_max, lx) : lx;
            any_x = true;
            if (s.pinned || s.ys[i] <= 0.0) continue;
            const double ly = std::log10(s.ys[i]);
            y_min = any_y ? std::min(y_min, ly) : ly;
            y_max = any_y ? std::max(y_max, ly) : ly;
            any_y = true;
        }
    }
    if (x_max - x_min < 1e-9) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if (y_max - y_min < 1e-9) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    // Snap to whole decades for readable ticks.
    x_min = std::floor(x_min);
    x_max = std::ceil(x_max);
    y_min = std::floor(y_min);
    y_max = std::ceil(y_max);

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const auto to_px = [&](double lx) { return kMarginLeft + (lx - x_min) / (x_max - x_min) * plot_w; };
    const auto to_py = [&](double ly) { return kMarginTop + (y_max - ly) / (y_max - y_min) * plot_h; };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_loglog_svg: cannot open " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kMarginLeft << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\""
        << " font-weight=\"bold\">" << title << "</text>\n";

    // Gridlines and ticks per decade.
    out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">\n";
    const int x_decades = static_cast<int>(x_max - x_min);
    const int x_step = std::max(1, x_decades / 6);
    for (int d = 0; d <= x_decades; d += x_step) {
        const double lx = x_min + d;
        const double px = to_px(lx);
        out << "<line x1=\"" << fmt(px) << "\" y1=\"" << kMarginTop << "\" x2=\"" << fmt(px)
            << "\" y2=\"" << fmt(kMarginTop + plot_h) << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << fmt(px - 12) << "\" y=\"" << fmt(kMarginTop + plot_h + 18) << "\">"
            << fmt_tick(lx) << "</text>\n";
    }
    const int y_decades = static_cast<int>(y_max - y_min);
    const int y_step = std::max(1, y_decades / 8);
    for (int d = 0; d <= y_decades; d += y_step) {
        const double ly = y_min + d;
        const double py = to_py(ly);
        out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << fmt(py) << "\" x2=\""
            << fmt(kMarginLeft + plot_w) << "\" y2=\"" << fmt(py) << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << 12 << "\" y=\"" << fmt(py + 4) << "\">" << fmt_tick(ly)
            << "</text>\n";
    }
    out << "</g>\n";

    // Axes.
    out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << fmt(plot_w)
        << "\" height=\"" << fmt(plot_h) << "\" fill=\"none\" stroke=\"#000\"/>\n";
    out << "<text x=\"" << fmt(kMarginLeft + plot_w / 2 - 20) << "\" y=\"" << kHeight - 12
        << "\" font-family=\"sans-serif\" font-size=\"13\">" << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << fmt(kMarginTop - 10)
        << "\" font-family=\"sans-serif\" font-size=\"13\">" << y_label << "</text>\n";

    // Series.
    int color_index = 0;
    int legend_row = 0;
    for (const SvgSeries& s : series) {
        const char* color = kPalette[color_index % 8];
        ++color_index;
        const double pin_py = kMarginTop + plot_h - 4;
        if (!s.pinned) {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.xs.size(); ++i) {
                if (s.xs[i] <= 0.0 || s.ys[i] <= 0.0) continue;
                out << fmt(to_px(std::log10(s.xs[i]))) << ',' << fmt(to_py(std::log10(s.ys[i]))) << ' ';
            }
            out << "\"/>\n";
        }
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (s.xs[i] <= 0.0) continue;
            const double px = to_px(std::log10(s.xs[i]));
            const double py = (s.pinned || s.ys[i] <= 0.0) ? pin_py : to_py(std::log10(s.ys[i]));
            out << "<circle cx=\"" << fmt(px) << "\" cy=\"" << fmt(py) << "\" r=\"3.5\" "
                << (s.pinned ? ("fill=\"white\" stroke=\"" + std::string(color) + "\"")
                             : ("fill=\"" + std::string(color) + "\""))
                << "/>\n";
        }
        const double lx = kWidth - kMarginRight + 14;
        const double ly = kMarginTop + 10 + 18 * legend_row;
        ++legend_row;
        out << "<circle cx=\"" << fmt(lx) << "\" cy=\"" << fmt(ly - 4) << "\" r=\"4\" "
            << (s.pinned ? ("fill=\"white\" stroke=\"" + std::string(color) + "\"")
                         : ("fill=\"" + std::string(color) + "\""))
            << "/>\n";
        out << "<text x=\"" << fmt(lx + 10) << "\" y=\"" << fmt(ly)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("write_loglog_svg: write failure on " + path);
}

}  // namespace kslab
