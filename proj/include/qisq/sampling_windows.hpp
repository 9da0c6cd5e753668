#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "qisq/quadrature.hpp"

namespace qisq {

enum class WindowKind { Gaussian, LorentzianSquared, Square, Trapezoid };

enum class SpectrumMethod { Analytic, NumericQuadrature };

std::string_view to_string(WindowKind kind);
WindowKind parse_window_kind(std::string_view name);

// Tag required to build the sharp-edged square window, whose spectrum decays
// only as 1/omega^2 and makes every downstream integral slowly convergent.
struct UnstableWindowOptIn
{
    explicit UnstableWindowOptIn() = default;
};
inline constexpr UnstableWindowOptIn allow_unstable_window{};

// A normalized, even, non-negative time-sampling function f(t).
//
// width() is t0 for Gaussian and LorentzianSquared, the full width for
// Square, and the flat-top length T_S for Trapezoid. A trapezoid has its flat
// top on [-T_S/2, T_S/2] and linear sides of horizontal extent n*T_S each.
class SamplingWindow
{
public:
    static SamplingWindow gaussian(double t0);
    static SamplingWindow lorentzian_squared(double t0);
    static SamplingWindow square(double width, UnstableWindowOptIn);
    static SamplingWindow trapezoid(double flat_length, double slope_ratio);

    WindowKind kind() const noexcept { return kind_; }
    double width() const noexcept { return width_; }
    // n for Trapezoid, 0 otherwise.
    double slope_ratio() const noexcept { return slope_ratio_; }

    // f(t) in 1/seconds.
    double operator()(double t) const;
    double sqrt_value(double t) const;

    // Half-width of the support; +infinity for Gaussian and LorentzianSquared.
    double support_half_width() const;
    bool has_analytic_spectrum() const noexcept;
    SpectrumMethod preferred_method() const noexcept;

    // Same family and shape with a different width parameter.
    SamplingWindow with_width(double width) const;

    friend bool operator==(const SamplingWindow&, const SamplingWindow&) = default;

private:
    SamplingWindow(WindowKind kind, double width, double slope_ratio);

    WindowKind kind_;
    double width_;
    double slope_ratio_;
};

double evaluate_window(const SamplingWindow& w, double t);

// (f^{1/2})_FT(omega) with g_FT(omega) = (1/2pi) * integral g(t) e^{-i omega t} dt.
// The transform of an even real function is real; the sign is kept.
double sqrt_ft_amplitude(const SamplingWindow& w, double omega, const QuadratureConfig& cfg,
                         SpectrumMethod method);

// |(f^{1/2})_FT(omega)|^2 in seconds, using the window's preferred method.
double sqrt_ft_squared(const SamplingWindow& w, double omega, const QuadratureConfig& cfg = {});
double sqrt_ft_squared(const SamplingWindow& w, double omega, const QuadratureConfig& cfg,
                       SpectrumMethod method);

// Power-law exponent q of the large-omega envelope |(f^{1/2})_FT|^2 ~ omega^-q
// for compactly supported windows (2 for Square, 3 for Trapezoid); 0 when the
// spectrum decays exponentially.
int spectrum_decay_exponent(WindowKind kind) noexcept;

struct SqrtWindowSpectrum
{
    SamplingWindow source;
    SpectrumMethod method;
    std::vector<std::pair<double, double>> samples;  // (omega, |(f^{1/2})_FT|^2)
};

SqrtWindowSpectrum sample_spectrum(const SamplingWindow& w, std::span<const double> omegas,
                                   const QuadratureConfig& cfg, SpectrumMethod method);

}  // namespace qisq
