#pragma once

#include <string>
#include <vector>

#include "inktrace/eval.hpp"

namespace inktrace {

// Skeleton pixels in gray with each recovered component as a colored polyline plus
// direction arrows and start markers.
std::string svg_overlay(const SkeletonImage& image, const RecoveredTrajectory& trajectory);

// Simple line chart (one series per row label) used for sensitivity sweeps.
struct SeriesPlot {
    std::string title, x_label, y_label;
    struct Series {
        std::string label;
        std::vector<double> x, y;
    };
    std::vector<Series> series;
};
std::string svg_plot(const SeriesPlot& plot);

// Box-and-whisker chart for the stability sweep.
struct BoxPlot {
    std::string title, x_label, y_label;
    struct Box {
        std::string label;
        double median, q1, q3, lo, hi;
    };
    std::vector<Box> boxes;
};
std::string svg_boxplot(const BoxPlot& plot);

}  // namespace inktrace
