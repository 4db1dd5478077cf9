#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rcp {

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Minimal line plot: axes with a handful of ticks, one polyline per
// series, legend in the top-right corner.
void write_line_svg(std::ostream& out, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<SvgSeries>& series, int width = 900,
                    int height = 480);

}  // namespace rcp
