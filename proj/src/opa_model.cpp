#include "qisq/opa_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qisq {

namespace {

constexpr double pi = std::numbers::pi;

void check_pump(double x)
{
    if (!(x > 0.0 && x < 1.0)) {
        throw std::invalid_argument("pump ratio x must lie in (0, 1), got " + std::to_string(x));
    }
}

void check_efficiency(double beta)
{
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw std::invalid_argument("efficiency beta must lie in (0, 1], got " + std::to_string(beta));
    }
}

void check_sideband(double w)
{
    if (!(w >= 0.0) || !std::isfinite(w)) {
        throw std::invalid_argument("normalized sideband frequency must be finite and >= 0");
    }
}

void check_all(double x, double beta, double w)
{
    check_pump(x);
    check_efficiency(beta);
    check_sideband(w);
}

double denom_squeezed(double x, double w) { return (1.0 + x) * (1.0 + x) + w * w; }
double denom_anti(double x, double w) { return (1.0 - x) * (1.0 - x) + w * w; }

double fraction_from_ratio(double ratio) { return 1.0 - (2.0 / pi) * std::atan(std::sqrt(ratio)); }

}  // namespace

void OpaParams::validate() const
{
    check_all(x, beta, w);
    if (!std::isfinite(theta)) throw std::invalid_argument("phase theta must be finite");
}

double to_db(double linear)
{
    if (!(linear > 0.0)) throw std::invalid_argument("dB conversion needs a positive ratio");
    return 10.0 * std::log10(linear);
}

double from_db(double db) { return std::pow(10.0, db / 10.0); }

double variance(const OpaParams& p)
{
    p.validate();
    const double c = std::cos(p.theta);
    const double s = std::sin(p.theta);
    return 1.0 + 4.0 * p.beta * p.x * (c * c / denom_anti(p.x, p.w) - s * s / denom_squeezed(p.x, p.w));
}

double s_minus(double x, double beta, double w)
{
    check_all(x, beta, w);
    return 1.0 - 4.0 * beta * x / denom_squeezed(x, w);
}

double s_plus(double x, double beta, double w)
{
    check_all(x, beta, w);
    return 1.0 + 4.0 * beta * x / denom_anti(x, w);
}

double extremes_product(double x, double beta, double w)
{
    check_all(x, beta, w);
    return 1.0 + 16.0 * beta * (1.0 - beta) * x * x / (denom_squeezed(x, w) * denom_anti(x, w));
}

double squeezed_fraction(double x, double beta, double w)
{
    check_all(x, beta, w);
    return fraction_from_ratio(denom_squeezed(x, w) / denom_anti(x, w));
}

double squeezed_fraction_weak_pump_limit(double w)
{
    check_sideband(w);
    return 0.5;
}

double squeezed_fraction_from_extremes(double s_minus_linear, double s_plus_linear)
{
    if (!(s_minus_linear > 0.0 && s_minus_linear < 1.0) || !(s_plus_linear > 1.0) ||
        !std::isfinite(s_plus_linear)) {
        throw std::invalid_argument("extremes must satisfy 0 < S- < 1 < S+");
    }
    return fraction_from_ratio((s_plus_linear - 1.0) / (1.0 - s_minus_linear));
}

double ideal_bound(double ft)
{
    if (!(ft > 0.0 && ft < 0.5)) {
        throw std::invalid_argument("ideal OPA bound is defined for 0 < F_T < 0.5");
    }
    const double t = std::tan(ft * pi / 2.0);
    return t * t;
}

double ideal_ft(double s_minus_linear)
{
    if (!(s_minus_linear > 0.0 && s_minus_linear < 1.0)) {
        throw std::invalid_argument("ideal OPA inverse needs 0 < S- < 1");
    }
    return fraction_from_ratio(1.0 / s_minus_linear);
}

std::string_view to_string(EffectiveWeight weight)
{
    return weight == EffectiveWeight::SqueezingDepth ? "squeezing-depth" : "uniform";
}

double effective_ft(double x, double beta, double w_max, EffectiveWeight weight,
                    const QuadratureConfig& cfg)
{
    check_pump(x);
    check_efficiency(beta);
    if (!(w_max > 0.0) || !std::isfinite(w_max)) {
        throw std::invalid_argument("integration range must be positive and finite");
    }
    const auto kernel = [&](double w) {
        return weight == EffectiveWeight::SqueezingDepth ? 1.0 - s_minus(x, beta, w) : 1.0;
    };
    const Integral norm = integrate(kernel, 0.0, w_max, cfg, "effective-duration weight");
    if (!(norm.value > 0.0)) {
        throw NoSqueezingInRange("no squeezing anywhere in [0, " + std::to_string(w_max) + "]");
    }
    const Integral weighted = integrate(
        [&](double w) { return kernel(w) * squeezed_fraction(x, beta, w); }, 0.0, w_max, cfg,
        "effective-duration numerator");
    return weighted.value / norm.value;
}

}  // namespace qisq
