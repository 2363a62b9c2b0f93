#pragma once

#include <string>
#include <vector>

#include "fimcon/simulation.hpp"

namespace fimcon {

/// Minimal in-process SVG line plots: stacked panels sharing the time axis,
/// with polyline series, shaded bands for the funnel regions and a small
/// legend per panel. No external plotting dependency.
namespace svgplot {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> values;  // one per time sample
};

struct Band {
    std::string label;
    std::string fill;
    std::vector<double> upper;
    std::vector<double> lower;
};

struct Panel {
    std::string ylabel;
    std::vector<Series> series;
    std::vector<Band> bands;
};

void write(const std::string& path, const std::vector<double>& t, const std::vector<Panel>& panels,
           int width = 900, int panel_height = 160);

}  // namespace svgplot

/// Renders a trace in the fixed stacked layout: output versus reference,
/// then per level a derivative panel (from level 2 on) and the funnel band
/// with its error, then the gain, then w and u.
void write_trace_svg(const std::string& path, const SimulationTrace& trace);

}  // namespace fimcon
