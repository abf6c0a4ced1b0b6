#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ctsid {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotPanel {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<PlotSeries> series;
    std::vector<double> reference_lines;  // horizontal dashed guides
};

// Writes a vertically stacked multi-panel line plot.  Panels with no finite
// data still render labeled empty axes, so the file is always a valid SVG.
void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::vector<PlotPanel>& panels);

}  // namespace ctsid
