#pragma once

// Dependency-free SVG rendering of scan results: 2-D heatmaps (viridis, or
// a blue-white-red diverging map for signed data) and 1-D line plots with an
// optional reference trace. Values outside the clip range paint white.

#include <optional>
#include <string>

#include "ddsim/experiments.hpp"

namespace ddsim {

struct PlotOptions {
  std::string title;
  // color clip range; unset -> [0.9, 1] for unsigned maps, symmetric about 0
  // for diverging maps
  std::optional<double> clip_min;
  std::optional<double> clip_max;
  bool diverging = false;  // diff maps: blue-white-red centered on 0
};

// 2-D scan -> heatmap, 1-D scan -> line plot (with `ideal` overlay when
// present). Returns an empty string when the scan is too degenerate to plot
// (an axis with fewer than 2 points); callers then skip the SVG file.
std::string render_scan_svg(const ScanResult& scan, const PlotOptions& opts);

}  // namespace ddsim
