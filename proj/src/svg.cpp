#include "reslab/svg.hpp"

#include "reslab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace reslab {

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

/// Five-stop blue-to-yellow gradient.
std::string color_of(double t)
{
    static const double stops[5][3] = {{13, 8, 135},
                                       {84, 2, 163},
                                       {156, 23, 158},
                                       {219, 92, 104},
                                       {252, 210, 37}};
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * 4.0;
    const int k = std::min(3, static_cast<int>(pos));
    const double f = pos - k;
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(stops[k][0] + f * (stops[k + 1][0] - stops[k][0]))),
                  static_cast<int>(std::lround(stops[k][1] + f * (stops[k + 1][1] - stops[k][1]))),
                  static_cast<int>(std::lround(stops[k][2] + f * (stops[k + 1][2] - stops[k][2]))));
    return buf;
}

/// Piecewise-linear position of a data value along a log-spaced axis,
/// in units of grid index.
double log_axis_position(const std::vector<double>& axis, double value)
{
    const double lv = std::log(value);
    if (lv <= std::log(axis.front())) return 0.0;
    if (lv >= std::log(axis.back())) return static_cast<double>(axis.size() - 1);
    for (std::size_t k = 0; k + 1 < axis.size(); ++k) {
        const double a = std::log(axis[k]), b = std::log(axis[k + 1]);
        if (lv >= a && lv <= b) return k + (lv - a) / (b - a);
    }
    return 0.0;
}

}  // namespace

std::string render_heatmap(const std::vector<double>& gA2_axis,
                           const std::vector<double>& nsin2_axis,
                           const std::vector<std::vector<double>>& values,
                           const std::vector<OverlayLine>& overlays,
                           const HeatmapOptions& options)
{
    const std::size_t ni = gA2_axis.size(), nj = nsin2_axis.size();
    if (ni < 1 || nj < 1 || values.size() != ni)
        throw config_error("render_heatmap: bad grid");

    const double cell = 36.0;
    const double ml = 80.0, mb = 60.0, mt = 40.0, mr = 120.0;
    const double plot_w = cell * ni, plot_h = cell * nj;
    const double width = ml + plot_w + mr, height = mt + plot_h + mb;

    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
    for (const auto& col : values)
        for (double v : col)
            if (std::isfinite(v)) {
                vmin = std::min(vmin, v);
                vmax = std::max(vmax, v);
            }
    if (options.vmin) vmin = *options.vmin;
    if (options.vmax) vmax = *options.vmax;
    if (!(vmax > vmin)) vmax = vmin + 1.0;

    auto px = [&](double i) { return ml + (i + 0.5) * cell; };
    auto py = [&](double j) { return mt + plot_h - (j + 0.5) * cell; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width)
       << "\" height=\"" << num(height) << "\">\n";
    os << "<!-- config " << options.config_hash << " -->\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    os << "<text x=\"" << num(ml) << "\" y=\"24\" font-family=\"monospace\" "
          "font-size=\"14\">" << options.title << "</text>\n";

    for (std::size_t i = 0; i < ni; ++i) {
        for (std::size_t j = 0; j < nj; ++j) {
            const double v = values[i][j];
            const std::string fill =
                std::isfinite(v) ? color_of((v - vmin) / (vmax - vmin)) : "#cccccc";
            os << "<rect x=\"" << num(ml + i * cell) << "\" y=\""
               << num(mt + plot_h - (j + 1) * cell) << "\" width=\"" << num(cell)
               << "\" height=\"" << num(cell) << "\" fill=\"" << fill << "\"/>\n";
        }
    }

    for (const OverlayLine& overlay : overlays) {
        for (const Polyline& line : overlay.polylines) {
            if (line.size() < 2) continue;
            os << "<polyline fill=\"none\" stroke=\"" << overlay.color
               << "\" stroke-width=\"2\"";
            if (overlay.dashed) os << " stroke-dasharray=\"6 4\"";
            os << " points=\"";
            for (const ContourVertex& v : line)
                os << num(px(log_axis_position(gA2_axis, v[0]))) << ","
                   << num(py(log_axis_position(nsin2_axis, v[1]))) << " ";
            os << "\"/>\n";
        }
    }

    // Axis ticks: one label per grid line, thinned to at most 6 per axis.
    const std::size_t xstep = std::max<std::size_t>(1, ni / 6);
    for (std::size_t i = 0; i < ni; i += xstep)
        os << "<text x=\"" << num(px(static_cast<double>(i))) << "\" y=\""
           << num(mt + plot_h + 18) << "\" font-family=\"monospace\" font-size=\"10\" "
              "text-anchor=\"middle\">" << sci(gA2_axis[i]) << "</text>\n";
    const std::size_t ystep = std::max<std::size_t>(1, nj / 6);
    for (std::size_t j = 0; j < nj; j += ystep)
        os << "<text x=\"" << num(ml - 6) << "\" y=\""
           << num(py(static_cast<double>(j)) + 3) << "\" font-family=\"monospace\" "
              "font-size=\"10\" text-anchor=\"end\">" << sci(nsin2_axis[j]) << "</text>\n";
    os << "<text x=\"" << num(ml + plot_w / 2) << "\" y=\"" << num(height - 12)
       << "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">"
          "sN&#963;&#178;_A</text>\n";
    os << "<text x=\"16\" y=\"" << num(mt + plot_h / 2)
       << "\" font-family=\"monospace\" font-size=\"12\" transform=\"rotate(-90 16 "
       << num(mt + plot_h / 2) << ")\" text-anchor=\"middle\">n&#963;&#178;_in</text>\n";

    // Color bar.
    const double bar_x = ml + plot_w + 24, bar_w = 16;
    const int bar_segments = 32;
    for (int k = 0; k < bar_segments; ++k) {
        const double frac = (k + 0.5) / bar_segments;
        os << "<rect x=\"" << num(bar_x) << "\" y=\""
           << num(mt + plot_h * (1.0 - static_cast<double>(k + 1) / bar_segments))
           << "\" width=\"" << num(bar_w) << "\" height=\"" << num(plot_h / bar_segments)
           << "\" fill=\"" << color_of(frac) << "\"/>\n";
    }
    os << "<text x=\"" << num(bar_x + bar_w + 4) << "\" y=\"" << num(mt + plot_h)
       << "\" font-family=\"monospace\" font-size=\"10\">" << sci(vmin) << "</text>\n";
    os << "<text x=\"" << num(bar_x + bar_w + 4) << "\" y=\"" << num(mt + 10)
       << "\" font-family=\"monospace\" font-size=\"10\">" << sci(vmax) << "</text>\n";
    os << "<text x=\"" << num(bar_x) << "\" y=\"" << num(mt - 6)
       << "\" font-family=\"monospace\" font-size=\"10\">" << options.metric
       << "</text>\n";

    os << "</svg>\n";
    return os.str();
}

std::string render_bifurcation(const BifurcationScan& scan, const std::string& title,
                               const std::string& config_hash)
{
    const double width = 640, height = 420;
    const double ml = 70, mr = 20, mt = 40, mb = 50;
    const double plot_w = width - ml - mr, plot_h = height - mt - mb;

    double ymin = 0.0, ymax = 0.0;
    for (const auto& samples : scan.attractor_samples)
        for (double v : samples) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    if (!(ymax > ymin)) {
        ymin -= 1.0;
        ymax += 1.0;
    }

    const double lx0 = std::log(scan.parameter_values.front());
    const double lx1 = std::log(scan.parameter_values.back());
    auto px = [&](double p) {
        return ml + plot_w * (std::log(p) - lx0) / std::max(lx1 - lx0, 1e-12);
    };
    auto py = [&](double v) { return mt + plot_h * (1.0 - (v - ymin) / (ymax - ymin)); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width)
       << "\" height=\"" << num(height) << "\">\n";
    os << "<!-- config " << config_hash << " -->\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    os << "<text x=\"" << num(ml) << "\" y=\"24\" font-family=\"monospace\" "
          "font-size=\"14\">" << title << "</text>\n";

    for (std::size_t k = 0; k < scan.parameter_values.size(); ++k) {
        const double x = px(scan.parameter_values[k]);
        // Thin each rung to at most 200 dots.
        const auto& samples = scan.attractor_samples[k];
        const std::size_t step = std::max<std::size_t>(1, samples.size() / 200);
        for (std::size_t s = 0; s < samples.size(); s += step)
            os << "<circle cx=\"" << num(x) << "\" cy=\"" << num(py(samples[s]))
               << "\" r=\"1.2\" fill=\"#1f3b99\"/>\n";
        if (scan.diverged[k])
            os << "<text x=\"" << num(x) << "\" y=\"" << num(mt + 12)
               << "\" font-family=\"monospace\" font-size=\"10\" fill=\"#aa0000\" "
                  "text-anchor=\"middle\">div</text>\n";
    }

    for (std::size_t k = 0; k < scan.parameter_values.size();
         k += std::max<std::size_t>(1, scan.parameter_values.size() / 6))
        os << "<text x=\"" << num(px(scan.parameter_values[k])) << "\" y=\""
           << num(height - mb + 18) << "\" font-family=\"monospace\" font-size=\"10\" "
              "text-anchor=\"middle\">" << sci(scan.parameter_values[k]) << "</text>\n";
    os << "<text x=\"" << num(ml + plot_w / 2) << "\" y=\"" << num(height - 10)
       << "\" font-family=\"monospace\" font-size=\"12\" "
          "text-anchor=\"middle\">n&#963;&#178;_in</text>\n";
    os << "<text x=\"16\" y=\"" << num(mt + plot_h / 2)
       << "\" font-family=\"monospace\" font-size=\"12\" transform=\"rotate(-90 16 "
       << num(mt + plot_h / 2) << ")\" text-anchor=\"middle\">v0</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace reslab
