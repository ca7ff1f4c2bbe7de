#pragma once

#include "reslab/analysis.hpp"
#include "reslab/meanfield.hpp"
#include "reslab/sweep.hpp"
#include "reslab/timeseries.hpp"

#include <string>
#include <vector>

namespace reslab {

/// Series CSV: header `t,c0,c1,...`, one column of time then one per component.
std::string series_to_csv(const TimeSeries& series);
TimeSeries series_from_csv(const std::string& text);

/// Phase-diagram CSV: one row per cell, `gA2,n_sin2,<metric>_mean,
/// <metric>_std,...,diverged_frac,trials`.
std::string diagram_to_csv(const PhaseDiagram& diagram);

/// Minimal reader for plotting: axes plus one value grid per metric column.
struct DiagramTable {
    std::vector<double> gA2_axis;
    std::vector<double> nsin2_axis;
    std::vector<std::string> columns;                       // metric column names
    std::vector<std::vector<std::vector<double>>> values;   // [col][i][j]
};
DiagramTable diagram_from_csv(const std::string& text);

/// Contour CSV: `polyline,gA2,n_sin2` vertex rows.
std::string contour_to_csv(const std::vector<Polyline>& polylines);
std::vector<Polyline> contour_from_csv(const std::string& text);

/// Mean-field zero-crossing CSV: `n_sigma_in2,gA2_at_zero_crossing`.
std::string meanfield_contour_to_csv(const std::vector<ContourPoint>& points);

std::string bifurcation_to_csv(const BifurcationScan& scan);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// FNV-1a hash of a string, hex-formatted; embedded in artifacts so a figure
/// can be traced back to its configuration.
std::string fnv1a_hex(const std::string& text);

}  // namespace reslab
