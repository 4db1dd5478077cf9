#include "rcpfluid/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rcp {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

void write_line_svg(std::ostream& out, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<SvgSeries>& series, int width, int height) {
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_min = std::min(y_min, s.y[i]);
            y_max = std::max(y_max, s.y[i]);
        }
    if (!(x_min < x_max)) { x_min -= 0.5; x_max += 0.5; }
    if (!(y_min < y_max)) { y_min -= 0.5; y_max += 0.5; }
    const double y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    const double ml = 70, mr = 20, mt = 36, mb = 48;
    const double pw = width - ml - mr, ph = height - mt - mb;
    const auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
    const auto py = [&](double y) { return mt + ph - (y - y_min) / (y_max - y_min) * ph; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-size=\"14\">" << title << "</text>\n";

    for (int i = 0; i <= 5; ++i) {
        const double fx = x_min + (x_max - x_min) * i / 5.0;
        const double fy = y_min + (y_max - y_min) * i / 5.0;
        out << "<line x1=\"" << px(fx) << "\" y1=\"" << mt << "\" x2=\"" << px(fx)
            << "\" y2=\"" << mt + ph << "\" stroke=\"#dddddd\"/>\n";
        out << "<line x1=\"" << ml << "\" y1=\"" << py(fy) << "\" x2=\"" << ml + pw
            << "\" y2=\"" << py(fy) << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << px(fx) << "\" y=\"" << mt + ph + 16
            << "\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
        out << "<text x=\"" << ml - 6 << "\" y=\"" << py(fy) + 4
            << "\" text-anchor=\"end\">" << num(fy) << "</text>\n";
    }
    out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
        << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10
        << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << mt + ph / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << mt + ph / 2
        << ")\">" << y_label << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.3\" points=\"";
        const auto& sr = series[s];
        for (std::size_t i = 0; i < sr.x.size() && i < sr.y.size(); ++i) {
            if (!std::isfinite(sr.x[i]) || !std::isfinite(sr.y[i])) continue;
            out << num(px(sr.x[i])) << ',' << num(py(sr.y[i])) << ' ';
        }
        out << "\"/>\n";
        out << "<text x=\"" << ml + pw - 8 << "\" y=\"" << mt + 16 + 16 * double(s)
            << "\" text-anchor=\"end\" fill=\"" << color << "\">" << sr.label
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace rcp
