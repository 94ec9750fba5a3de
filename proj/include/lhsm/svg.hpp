#pragma once

#include <string>
#include <vector>

namespace lhsm::io {

// Minimal self-rendered line plots: no display server, no plotting
// library, deterministic text output. Enough for band diagrams and
// sweep curves; not a charting framework.

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;     // plot log10(y); y <= 0 points are dropped
    bool markers = false;   // draw point markers on top of the lines
    double y_min = 0, y_max = 0;  // equal -> autoscale from the data
    int width = 880;
    int height = 520;
};

std::string render_line_plot(const PlotSpec& spec,
                             const std::vector<Series>& series);

} // namespace lhsm::io
