#pragma once

#include "reslab/io.hpp"
#include "reslab/sweep.hpp"

#include <optional>
#include <string>
#include <vector>

namespace reslab {

/// One contour drawn on top of a heatmap.
struct OverlayLine {
    std::vector<Polyline> polylines;
    std::string color = "#ff0000";
    bool dashed = false;
    std::string label;
};

struct HeatmapOptions {
    std::string title;
    std::string metric;
    std::string config_hash;   // embedded as a provenance comment
    std::optional<double> vmin, vmax;
};

/// Deterministic SVG heatmap of a metric over the log-log parameter plane;
/// rendering the same inputs twice yields byte-identical output.
std::string render_heatmap(const std::vector<double>& gA2_axis,
                           const std::vector<double>& nsin2_axis,
                           const std::vector<std::vector<double>>& values,
                           const std::vector<OverlayLine>& overlays,
                           const HeatmapOptions& options);

/// Scatter of attractor samples against the swept parameter (log x axis).
std::string render_bifurcation(const BifurcationScan& scan, const std::string& title,
                               const std::string& config_hash);

}  // namespace reslab
