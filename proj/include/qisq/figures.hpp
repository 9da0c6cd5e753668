#pragma once

#include <optional>
#include <stdexcept>

#include "qisq/meta_analysis.hpp"
#include "qisq/plot.hpp"

namespace qisq {

class UnknownFigure : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct FigureOptions
{
    double db_floor = -25.0;
    QuadratureConfig quadrature;
    // Data points (and, for figure 7, fitted scales) come from here when set.
    std::optional<AnalysisReport> report;
    unsigned threads = 1;
};

// Preset plots 4..8:
//   4  S- (dB) of a lossless OPA at w = 0 versus pump ratio x
//   5  Gaussian window bounds, both argument variants, and the ideal OPA
//   6  the same for the Lorentzian-squared window
//   7  best-fit scaled Lorentzian-squared and Gaussian curves
//   8  trapezoid family n in {0.001, 0.2, 0.5, 1, 3, 5}, both variants
// Throws UnknownFigure for any other number.
PlotSpec figure_preset(int fig, const FigureOptions& options = {});

// F_T grid used by the presets: 0.005, 0.010, ..., 1.0.
std::vector<double> figure_ft_grid();

// Scale factors plotted in figure 7 when the report carries no fit.
inline constexpr double default_lorentzian_fit_scale = 0.10610329539459689;  // 1/(3 pi)
inline constexpr double default_gaussian_fit_scale = 0.07957747154594767;    // 1/(4 pi)

}  // namespace qisq
