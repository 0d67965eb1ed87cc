#include "polysound/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace polysound {

namespace {

// Canvas geometry (pixels).
constexpr double kWidth = 800.0;
constexpr double kHeight = 560.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 780.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 510.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
constexpr std::size_t kPaletteSize = sizeof kPalette / sizeof kPalette[0];

std::string fmt(const char* pattern, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::size_t column_index(const CsvTable& table, const std::string& name) {
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        if (table.columns[i] == name) return i;
    throw DomainError("column '" + name + "' not present in the csv");
}

const char* dash_for(const std::string& style) {
    if (style == "solid") return "";
    if (style == "dashed") return "8 5";
    if (style == "dotted") return "2 4";
    throw DomainError("unknown line style '" + style + "' (use solid, dashed, or dotted)");
}

std::string escape_text(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(ch);
        }
    }
    return out;
}

}  // namespace

std::string render_svg(const CsvTable& table, const PlotSpec& spec) {
    if (spec.y_columns.empty()) throw DomainError("plot needs at least one y column");
    if (table.rows.size() < 2) throw DomainError("plot needs at least 2 rows to draw a line");
    for (const auto& s : spec.styles) dash_for(s);  // validate up front

    const std::size_t xi = column_index(table, spec.x_column);
    std::vector<std::size_t> yi;
    for (const auto& name : spec.y_columns) yi.push_back(column_index(table, name));

    // Transformed x plus joint ranges.
    std::vector<double> xs(table.rows.size());
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        double x = table.rows[r][xi];
        if (!std::isfinite(x))
            throw DomainError("non-finite value in column '" + spec.x_column + "'");
        if (spec.log_x) {
            if (!(x > 0.0))
                throw DomainError("log-x needs positive values in column '" + spec.x_column +
                                  "'");
            x = std::log10(x);
        }
        xs[r] = x;
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        for (std::size_t c : yi) {
            const double y = table.rows[r][c];
            if (!std::isfinite(y))
                throw DomainError("non-finite value in a plotted y column");
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (xmin == xmax) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymin == ymax) {
        ymin -= 0.5;
        ymax += 0.5;
    }

    auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * (kRight - kLeft); };
    auto py = [&](double y) { return kBottom - (y - ymin) / (ymax - ymin) * (kBottom - kTop); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"560\" "
           "viewBox=\"0 0 800 560\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"560\" fill=\"white\"/>\n";
    if (!spec.title.empty()) {
        svg += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"15\">" +
               escape_text(spec.title) + "</text>\n";
    }

    // Grid and tick labels: five evenly spaced ticks per axis.
    for (int i = 0; i < 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        const double fy = ymin + (ymax - ymin) * i / 4.0;
        const double gx = px(fx);
        const double gy = py(fy);
        svg += "<line x1=\"" + fmt("%.2f", gx) + "\" y1=\"" + fmt("%.2f", kTop) + "\" x2=\"" +
               fmt("%.2f", gx) + "\" y2=\"" + fmt("%.2f", kBottom) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<line x1=\"" + fmt("%.2f", kLeft) + "\" y1=\"" + fmt("%.2f", gy) + "\" x2=\"" +
               fmt("%.2f", kRight) + "\" y2=\"" + fmt("%.2f", gy) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        const double x_label = spec.log_x ? std::pow(10.0, fx) : fx;
        svg += "<text x=\"" + fmt("%.2f", gx) + "\" y=\"" + fmt("%.2f", kBottom + 18.0) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
               fmt("%.3g", x_label) + "</text>\n";
        svg += "<text x=\"" + fmt("%.2f", kLeft - 8.0) + "\" y=\"" + fmt("%.2f", gy + 4.0) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
               fmt("%.3g", fy) + "</text>\n";
    }

    // Axes frame.
    svg += "<rect x=\"" + fmt("%.2f", kLeft) + "\" y=\"" + fmt("%.2f", kTop) + "\" width=\"" +
           fmt("%.2f", kRight - kLeft) + "\" height=\"" + fmt("%.2f", kBottom - kTop) +
           "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    // Axis names.
    svg += "<text x=\"" + fmt("%.2f", (kLeft + kRight) / 2.0) + "\" y=\"548\" "
           "text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
           escape_text(spec.x_column) + (spec.log_x ? " (log scale)" : "") + "</text>\n";

    // One polyline per series, so consumers can count series by counting
    // polyline elements.
    for (std::size_t s = 0; s < yi.size(); ++s) {
        const char* color = kPalette[s % kPaletteSize];
        const std::string style =
            spec.styles.empty() ? std::string("solid") : spec.styles[s % spec.styles.size()];
        const char* dash = dash_for(style);
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"1.5\"";
        if (dash[0]) svg += std::string(" stroke-dasharray=\"") + dash + "\"";
        svg += " points=\"";
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            if (r) svg.push_back(' ');
            svg += fmt("%.2f", px(xs[r])) + "," + fmt("%.2f", py(table.rows[r][yi[s]]));
        }
        svg += "\"/>\n";
    }

    // Legend, drawn with line elements to keep the polyline count equal to
    // the series count.
    for (std::size_t s = 0; s < yi.size(); ++s) {
        const double ly = kTop + 16.0 + 18.0 * static_cast<double>(s);
        const char* color = kPalette[s % kPaletteSize];
        const std::string style =
            spec.styles.empty() ? std::string("solid") : spec.styles[s % spec.styles.size()];
        const char* dash = dash_for(style);
        svg += "<line x1=\"" + fmt("%.2f", kRight - 150.0) + "\" y1=\"" + fmt("%.2f", ly) +
               "\" x2=\"" + fmt("%.2f", kRight - 120.0) + "\" y2=\"" + fmt("%.2f", ly) +
               "\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"1.5\"";
        if (dash[0]) svg += std::string(" stroke-dasharray=\"") + dash + "\"";
        svg += "/>\n";
        svg += "<text x=\"" + fmt("%.2f", kRight - 112.0) + "\" y=\"" + fmt("%.2f", ly + 4.0) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" +
               escape_text(spec.y_columns[s]) + "</text>\n";
    }

    svg += "</svg>\n";
    return svg;
}

void render_svg_plot(const std::string& csv_path, const std::string& out_path,
                     const PlotSpec& spec) {
    const CsvTable table = read_csv(csv_path);
    write_file_atomic(out_path, render_svg(table, spec));
}

}  // namespace polysound
