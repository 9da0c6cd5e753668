#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qisq/quadrature.hpp"
#include "qisq/sampling_windows.hpp"

namespace qisq {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double speed_of_light = 2.99792458e8;  // m/s
}  // namespace constants

// Bracket values at or below this are reported as unbounded squeezing.
inline constexpr double unbounded_bracket_threshold = 1e-15;

// 10 log10(bracket), or -infinity when the bracket is below the threshold.
double bracket_to_db(double bracket);
bool is_unbounded(double r_db) noexcept;

enum class CurveVariant { PaperWithPi, MareckiNoPi };
enum class CurveEvaluation { ClosedForm, Numeric };
enum class SpectralShape { DeltaLimit, Gaussian };
enum class BracketRoute { Complement, DirectTail };

std::string_view to_string(CurveVariant v);
CurveVariant parse_variant(std::string_view name);

// mu(omega_p - omega0): the detector's frequency response.
struct SpectralFunction
{
    double omega0 = 1.0;
    double delta_omega = 0.0;
    SpectralShape shape = SpectralShape::DeltaLimit;

    static SpectralFunction delta_limit(double omega0);
    static SpectralFunction gaussian(double omega0, double delta_omega);
    void validate() const;
};

// omega0 * t0 (or omega * t0 for a homodyne sideband), in radians.
class PhaseArgument
{
public:
    explicit PhaseArgument(double value);
    double value() const noexcept { return value_; }

private:
    double value_;
};

struct BoundResult
{
    double r_db = 0.0;
    double bracket = 1.0;
    double error_estimate = 0.0;
    bool unbounded() const noexcept { return is_unbounded(r_db); }
};

// Lower bound R on measurable squeezing (dB) for a window and detector response.
//
// DeltaLimit: mu sharply peaked at omega0 cancels between numerator and
// denominator, leaving the bracket 1 - 4 pi int_0^inf |(f^1/2)_FT(w+omega0)|^2 dw.
// The Complement route evaluates the same bracket as 4 pi int_0^omega0 |..|^2 dw,
// using int_{-inf}^{inf} |(f^1/2)_FT|^2 = 1/(2 pi); DirectTail integrates the
// tail itself with an envelope correction beyond a finite cutoff.
// Gaussian: the full ratio with explicit mu^2 omega_p^3 weights over |p|.
BoundResult numeric_bound(const SamplingWindow& w, const SpectralFunction& mu,
                          const QuadratureConfig& cfg = {},
                          BracketRoute route = BracketRoute::Complement);

// Convergence of the directly truncated bracket 1 - 4 pi int_{omega0}^{cutoff} S
// and of the same bracket with the averaged power-law envelope added beyond
// the cutoff (compact windows only; analytic spectra need no correction).
struct TruncationStep
{
    double cutoff;
    double truncated_bracket;
    double corrected_bracket;
};

std::vector<TruncationStep> bracket_truncation_study(const SamplingWindow& w, double omega0,
                                                     std::span<const double> cutoffs,
                                                     const QuadratureConfig& cfg = {});

// 10 log10 erf(sqrt(2) * arg)
double closed_form_gaussian(PhaseArgument arg);
// 10 log10 (1 - exp(-2 arg))
double closed_form_lorentzian_sq(PhaseArgument arg);

// One bound curve R(F_T).
struct QiCurve
{
    WindowKind window = WindowKind::Gaussian;
    double slope_ratio = 0.0;  // trapezoid n
    CurveVariant variant = CurveVariant::PaperWithPi;
    double scale = 1.0;
    CurveEvaluation evaluation = CurveEvaluation::ClosedForm;
    bool unstable_opt_in = false;

    void validate() const;
    // e.g. "gaussian-paper", "trapezoid-n0.2-marecki", "lorentzian2-paper-k0.106103"
    std::string id() const;
    static QiCurve parse(std::string_view id);
    SamplingWindow unit_window() const;
    QiCurve with_scale(double k) const;

    friend bool operator==(const QiCurve&, const QiCurve&) = default;
};

// omega0 * (window width) implied by a squeezed fraction F_T.
double curve_argument(const QiCurve& c, double ft);
double curve_value(const QiCurve& c, double ft, const QuadratureConfig& cfg = {});

struct CurveSample
{
    double ft;
    double r_db;
};

// Evaluates the curve at every ft; results are ordered as the input for any
// thread count.
std::vector<CurveSample> sample_curve(const QiCurve& c, std::span<const double> fts,
                                      const QuadratureConfig& cfg = {}, unsigned threads = 1);

// "ft,r_db,curve_id,window,variant,scale" rows with "-inf" for the sentinel.
std::string curve_csv_header();
std::string curve_csv_rows(const QiCurve& c, std::span<const CurveSample> samples);

// Ford's bound on the Lorentzian-sampled energy density, J/m^3.
double ford_bound(double t0);
// Energy density inside an ideal parallel-plate Casimir cavity, J/m^3.
double casimir_density(double a);
// (3/16 pi^2) / (pi^2/720)
double ford_casimir_factor_ratio();
// Sampling time whose Ford bound matches a cavity of separation a: t0 ~ a/c.
double casimir_equivalence_time(double a);

}  // namespace qisq
