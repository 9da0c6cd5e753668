#pragma once

#include <string>
#include <vector>

namespace qisq {

enum class StrokeStyle { Solid, Dashed, Dotted };

struct PlotCurve
{
    std::string id;
    std::string label;
    std::vector<double> xs;
    std::vector<double> ys;  // -infinity allowed; clipped at the floor
    StrokeStyle style = StrokeStyle::Solid;
    double stroke_width = 1.5;
};

// Data point with a rectangular error bar (half-widths).
struct PlotPoint
{
    std::string label;
    double x = 0.0;
    double y = 0.0;
    double x_err = 0.0;
    double y_err = 0.0;
};

struct PlotSpec
{
    std::string title;
    std::string x_label;
    std::string y_label;
    double x_min = 0.0;
    double x_max = 1.0;
    double x_tick = 0.1;
    double y_max = 0.0;
    double y_tick = 5.0;
    double db_floor = -25.0;  // bottom of the y axis
    std::vector<PlotCurve> curves;
    std::vector<PlotPoint> points;

    // Throws std::invalid_argument for non-finite or empty ranges, bad ticks,
    // mismatched curve arrays or duplicate curve ids.
    void validate() const;
};

// A polyline piece above the floor. open_start/open_end mark ends cut by the floor.
struct ClippedRun
{
    std::vector<double> xs;
    std::vector<double> ys;
    bool open_start = false;
    bool open_end = false;
};

// Splits a curve at the floor, inserting the interpolated crossing points.
std::vector<ClippedRun> clip_to_floor(const std::vector<double>& xs, const std::vector<double>& ys,
                                      double floor);

// Standalone SVG; identical specs give identical bytes.
std::string render_svg(const PlotSpec& spec);

}  // namespace qisq
