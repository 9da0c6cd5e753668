#pragma once

#include <stdexcept>
#include <string_view>

#include "qisq/quadrature.hpp"

namespace qisq {

// Below-threshold degenerate OPA read out by balanced homodyne detection.
struct OpaParams
{
    double x = 0.5;      // pump power / threshold power, in (0, 1)
    double beta = 1.0;   // optical efficiency, in (0, 1]
    double w = 0.0;      // sideband frequency / cavity half-width, >= 0
    double theta = 0.0;  // local-oscillator phase, radians

    void validate() const;
};

// Linear variance ratio <-> decibels. All public reporting goes through these.
double to_db(double linear);
double from_db(double db);

// S(theta, x, omega) relative to vacuum.
double variance(const OpaParams& p);

// Minimum (theta = pi/2) and maximum (theta = 0) of the variance.
double s_minus(double x, double beta, double w);
double s_plus(double x, double beta, double w);

// S- * S+ = 1 + 16 beta (1-beta) x^2 / ([(1+x)^2 + w^2][(1-x)^2 + w^2]).
// Equals 1 only when beta = 1; losses always push the product above 1.
double extremes_product(double x, double beta, double w);

// Fraction of the half-period pi over which S < 1. Computed from the
// beta-independent ratio (S+ - 1)/(1 - S-) = ((1+x)^2 + w^2)/((1-x)^2 + w^2).
double squeezed_fraction(double x, double beta, double w);
// x -> 0+ limit of squeezed_fraction: 1/2 at every w.
double squeezed_fraction_weak_pump_limit(double w);

// Squeezed fraction recovered from linear extremes via the arctangent form.
double squeezed_fraction_from_extremes(double s_minus_linear, double s_plus_linear);

// Lossless OPA: S- = tan^2(F_T pi / 2) for 0 < F_T < 0.5, and its inverse.
double ideal_bound(double ft);
double ideal_ft(double s_minus_linear);

enum class EffectiveWeight { SqueezingDepth, Uniform };
std::string_view to_string(EffectiveWeight weight);

// Raised when the weight integral vanishes over the requested range.
class NoSqueezingInRange : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// Frequency-weighted squeezed fraction over w in [0, w_max]. The default
// kernel weights each sideband by its squeezing depth 1 - S-(x, beta, w).
double effective_ft(double x, double beta, double w_max,
                    EffectiveWeight weight = EffectiveWeight::SqueezingDepth,
                    const QuadratureConfig& cfg = {});

}  // namespace qisq
