#pragma once

#include <string>
#include <vector>

#include "polysound/csvio.hpp"

namespace polysound {

// Line-chart request over a CsvTable.  Styles are cycled across series;
// recognized names are "solid", "dashed", and "dotted".
struct PlotSpec {
    std::string x_column;
    std::vector<std::string> y_columns;
    std::vector<std::string> styles;  // empty means all solid
    bool log_x = false;
    std::string title;  // empty means no title element
};

// Render a standalone SVG document.  Output is deterministic: fixed canvas,
// fixed palette, coordinates rounded to hundredths, no timestamps.  Throws
// DomainError naming any missing column, on non-finite data, on fewer than
// two rows, and on non-positive x under log_x.
std::string render_svg(const CsvTable& table, const PlotSpec& spec);

// Read csv_path, render, and write out_path atomically.
void render_svg_plot(const std::string& csv_path, const std::string& out_path,
                     const PlotSpec& spec);

}  // namespace polysound
