#include "qisq/sampling_windows.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

namespace qisq {

namespace {

constexpr double pi = std::numbers::pi;

void require_positive(double value, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
    }
}

struct TrapezoidShape
{
    double half_top;  // a = T_S / 2
    double side;      // L = n * T_S
    double height;    // h, chosen so the integral is 1
    double foot() const { return half_top + side; }
};

TrapezoidShape trapezoid_shape(const SamplingWindow& w)
{
    const double ts = w.width();
    if (w.kind() == WindowKind::Square) {
        return {0.5 * ts, 0.0, 1.0 / ts};
    }
    const double n = w.slope_ratio();
    return {0.5 * ts, n * ts, 1.0 / (ts * (1.0 + n))};
}

double gaussian_amplitude(double t0, double omega)
{
    // sqrt(|.|^2) of t0/(pi sqrt(2 pi)) exp(-2 t0^2 omega^2)
    return std::sqrt(t0 / (pi * std::sqrt(2.0 * pi))) * std::exp(-t0 * t0 * omega * omega);
}

double lorentzian_sq_amplitude(double t0, double omega)
{
    return std::sqrt(t0 / (2.0 * pi)) * std::exp(-t0 * std::abs(omega));
}

// (1/pi) * integral_0^inf sqrt(f(t)) cos(omega t) dt for the compact windows.
// The side ramp is integrated in u with t = foot - L u^2, which removes the
// square-root cusp of sqrt(f) at the foot.
double compact_amplitude(const SamplingWindow& w, double omega, const QuadratureConfig& cfg)
{
    const TrapezoidShape s = trapezoid_shape(w);
    const double root_h = std::sqrt(s.height);
    // One panel per oscillation keeps each Gauss-Kronrod call well resolved.
    const auto panels = [](double phase) {
        return static_cast<std::size_t>(std::ceil(std::abs(phase) / (2.0 * pi))) + 1;
    };
    const double top = integrate_panels([&](double t) { return std::cos(omega * t); }, 0.0,
                                        s.half_top, panels(omega * s.half_top), cfg,
                                        "flat-top cosine transform", std::abs(omega) * s.half_top)
                           .value;
    double ramp = 0.0;
    if (s.side > 0.0) {
        ramp = 2.0 * s.side *
               integrate_panels(
                   [&](double u) { return u * u * std::cos(omega * (s.foot() - s.side * u * u)); },
                   0.0, 1.0, panels(2.0 * omega * s.side), cfg, "ramp cosine transform",
                   std::abs(omega) * s.foot())
                   .value;
    }
    return root_h * (top + ramp) / pi;
}

double gaussian_numeric_amplitude(const SamplingWindow& w, double omega, const QuadratureConfig& cfg)
{
    const double t0 = w.width();
    // exp(-t^2/4t0^2) < 1e-16 beyond this point.
    const double t_max = 2.0 * t0 * std::sqrt(-std::log(1e-16));
    const auto integral = integrate([&](double t) { return w.sqrt_value(t) * std::cos(omega * t); },
                                    0.0, t_max, cfg, "gaussian cosine transform");
    return integral.value / pi;
}

double lorentzian_sq_numeric_amplitude(const SamplingWindow& w, double omega,
                                       const QuadratureConfig& cfg)
{
    auto root_f = [&](double t) { return w.sqrt_value(t); };
    if (omega == 0.0) {
        const double inf = std::numeric_limits<double>::infinity();
        return integrate(root_f, 0.0, inf, cfg, "lorentzian-squared area").value / pi;
    }
    // sqrt(f) decays only as 1/t^2, so a truncated cosine integral is
    // hopeless; the double-exponential Fourier rule handles the tail.
    boost::math::quadrature::ooura_fourier_cos<double> rule(cfg.rel_tol);
    const auto [value, rel_err] = rule.integrate(root_f, std::abs(omega));
    if (!std::isfinite(value) || rel_err > std::max(cfg.rel_tol, cfg.abs_tol / std::abs(value))) {
        throw QuadratureError("lorentzian-squared cosine transform did not converge",
                              rel_err * std::abs(value), cfg.rel_tol * std::abs(value));
    }
    return value / pi;
}

}  // namespace

std::string_view to_string(WindowKind kind)
{
    switch (kind) {
        case WindowKind::Gaussian: return "gaussian";
        case WindowKind::LorentzianSquared: return "lorentzian2";
        case WindowKind::Square: return "square";
        case WindowKind::Trapezoid: return "trapezoid";
    }
    return "unknown";
}

WindowKind parse_window_kind(std::string_view name)
{
    if (name == "gaussian") return WindowKind::Gaussian;
    if (name == "lorentzian2") return WindowKind::LorentzianSquared;
    if (name == "square") return WindowKind::Square;
    if (name == "trapezoid") return WindowKind::Trapezoid;
    throw std::invalid_argument("unknown window '" + std::string(name) + "'");
}

SamplingWindow::SamplingWindow(WindowKind kind, double width, double slope_ratio)
    : kind_(kind), width_(width), slope_ratio_(slope_ratio)
{
    require_positive(width, "window width");
    if (kind == WindowKind::Trapezoid) {
        require_positive(slope_ratio, "trapezoid slope ratio n");
    }
}

SamplingWindow SamplingWindow::gaussian(double t0) { return {WindowKind::Gaussian, t0, 0.0}; }

SamplingWindow SamplingWindow::lorentzian_squared(double t0)
{
    return {WindowKind::LorentzianSquared, t0, 0.0};
}

SamplingWindow SamplingWindow::square(double width, UnstableWindowOptIn)
{
    return {WindowKind::Square, width, 0.0};
}

SamplingWindow SamplingWindow::trapezoid(double flat_length, double slope_ratio)
{
    return {WindowKind::Trapezoid, flat_length, slope_ratio};
}

double SamplingWindow::operator()(double t) const
{
    const double at = std::abs(t);
    switch (kind_) {
        case WindowKind::Gaussian: {
            const double z = t / width_;
            return std::exp(-0.5 * z * z) / (width_ * std::sqrt(2.0 * pi));
        }
        case WindowKind::LorentzianSquared: {
            const double d = t * t + width_ * width_;
            return (2.0 / pi) * width_ * width_ * width_ / (d * d);
        }
        case WindowKind::Square:
        case WindowKind::Trapezoid: {
            const TrapezoidShape s = trapezoid_shape(*this);
            if (at <= s.half_top) return s.height;
            if (at >= s.foot()) return 0.0;
            return s.height * (s.foot() - at) / s.side;
        }
    }
    return 0.0;
}

double SamplingWindow::sqrt_value(double t) const
{
    switch (kind_) {
        case WindowKind::Gaussian: {
            const double z = t / width_;
            return std::exp(-0.25 * z * z) / std::sqrt(width_ * std::sqrt(2.0 * pi));
        }
        case WindowKind::LorentzianSquared:
            return std::sqrt(2.0 / pi) * std::pow(width_, 1.5) / (t * t + width_ * width_);
        default:
            return std::sqrt((*this)(t));
    }
}

double SamplingWindow::support_half_width() const
{
    switch (kind_) {
        case WindowKind::Gaussian:
        case WindowKind::LorentzianSquared: return std::numeric_limits<double>::infinity();
        default: return trapezoid_shape(*this).foot();
    }
}

bool SamplingWindow::has_analytic_spectrum() const noexcept
{
    return kind_ == WindowKind::Gaussian || kind_ == WindowKind::LorentzianSquared;
}

SpectrumMethod SamplingWindow::preferred_method() const noexcept
{
    return has_analytic_spectrum() ? SpectrumMethod::Analytic : SpectrumMethod::NumericQuadrature;
}

SamplingWindow SamplingWindow::with_width(double width) const
{
    return {kind_, width, slope_ratio_};
}

double evaluate_window(const SamplingWindow& w, double t) { return w(t); }

double sqrt_ft_amplitude(const SamplingWindow& w, double omega, const QuadratureConfig& cfg,
                         SpectrumMethod method)
{
    if (method == SpectrumMethod::Analytic) {
        switch (w.kind()) {
            case WindowKind::Gaussian: return gaussian_amplitude(w.width(), omega);
            case WindowKind::LorentzianSquared: return lorentzian_sq_amplitude(w.width(), omega);
            default:
                throw std::invalid_argument("no closed-form spectrum for the " +
                                            std::string(to_string(w.kind())) + " window");
        }
    }
    switch (w.kind()) {
        case WindowKind::Gaussian: return gaussian_numeric_amplitude(w, omega, cfg);
        case WindowKind::LorentzianSquared: return lorentzian_sq_numeric_amplitude(w, omega, cfg);
        default: return compact_amplitude(w, omega, cfg);
    }
}

double sqrt_ft_squared(const SamplingWindow& w, double omega, const QuadratureConfig& cfg)
{
    return sqrt_ft_squared(w, omega, cfg, w.preferred_method());
}

double sqrt_ft_squared(const SamplingWindow& w, double omega, const QuadratureConfig& cfg,
                       SpectrumMethod method)
{
    const double a = sqrt_ft_amplitude(w, omega, cfg, method);
    return a * a;
}

int spectrum_decay_exponent(WindowKind kind) noexcept
{
    switch (kind) {
        case WindowKind::Square: return 2;
        case WindowKind::Trapezoid: return 3;
        default: return 0;
    }
}

SqrtWindowSpectrum sample_spectrum(const SamplingWindow& w, std::span<const double> omegas,
                                   const QuadratureConfig& cfg, SpectrumMethod method)
{
    SqrtWindowSpectrum out{w, method, {}};
    out.samples.reserve(omegas.size());
    for (double omega : omegas) {
        out.samples.emplace_back(omega, sqrt_ft_squared(w, omega, cfg, method));
    }
    return out;
}

}  // namespace qisq
