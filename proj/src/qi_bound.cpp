#include "qisq/qi_bound.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

namespace qisq {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double minus_inf = -std::numeric_limits<double>::infinity();

double check_bracket(double bracket, double error)
{
    // Quadrature noise can push a saturated bracket a hair above 1.
    constexpr double slack = 1e-9;
    if (bracket > 1.0 + slack + error) {
        throw std::logic_error("bound bracket exceeds 1 (" + std::to_string(bracket) +
                               "): window is not normalized");
    }
    return std::min(bracket, 1.0);
}

struct BracketValue
{
    double value;
    double error;
};

BracketValue complement_bracket(const SamplingWindow& w, double omega0, const QuadratureConfig& cfg)
{
    if (omega0 == 0.0) return {0.0, 0.0};
    const auto spectrum = [&](double u) { return sqrt_ft_squared(w, u, cfg); };
    const Integral head = integrate(spectrum, 0.0, omega0, cfg, "spectral head integral");
    return {4.0 * pi * head.value, 4.0 * pi * head.error};
}

// int_{lo}^{hi} S with one panel per oscillation period of S.
Integral periodic_spectrum_integral(const SamplingWindow& w, double lo, double hi, double period,
                                    const QuadratureConfig& cfg)
{
    const auto spectrum = [&](double u) { return sqrt_ft_squared(w, u, cfg); };
    const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / period));
    return integrate_panels(spectrum, lo, hi, panels, cfg, "spectral tail integral");
}

struct TailEstimate
{
    double truncated;  // int_{omega0}^{cutoff} S
    double envelope;   // int_{cutoff}^{inf} of the averaged power-law envelope
    double error;
};

TailEstimate compact_tail(const SamplingWindow& w, double omega0, double cutoff,
                          const QuadratureConfig& cfg)
{
    const double period = pi / w.support_half_width();
    const double q = spectrum_decay_exponent(w.kind());
    const Integral body = periodic_spectrum_integral(w, omega0, cutoff, period, cfg);
    // Envelope coefficient: S(omega) omega^q averaged over the last period.
    const Integral last = integrate([&](double u) { return sqrt_ft_squared(w, u, cfg) * std::pow(u, q); },
                                    cutoff - period, cutoff, cfg, "envelope average");
    const double coefficient = last.value / period;
    const double envelope = coefficient * std::pow(cutoff, 1.0 - q) / (q - 1.0);
    return {body.value, envelope, body.error + last.error * std::pow(cutoff, 1.0 - q) / period};
}

BracketValue direct_tail_bracket(const SamplingWindow& w, double omega0, const QuadratureConfig& cfg)
{
    if (w.has_analytic_spectrum()) {
        const auto spectrum = [&](double u) { return sqrt_ft_squared(w, u, cfg); };
        const Integral tail = integrate(spectrum, omega0, std::numeric_limits<double>::infinity(), cfg,
                                        "spectral tail integral");
        return {1.0 - 4.0 * pi * tail.value, 4.0 * pi * tail.error};
    }
    const double period = pi / w.support_half_width();
    double span = 256.0 * period;
    if (w.kind() == WindowKind::Trapezoid) {
        // The omega^-3 regime starts only once omega * (side length) >> 1.
        span = std::max(span, 64.0 / (w.slope_ratio() * w.width()));
    }
    span = period * std::ceil(span / period);
    const TailEstimate coarse = compact_tail(w, omega0, omega0 + span, cfg);
    const TailEstimate fine = compact_tail(w, omega0, omega0 + 2.0 * span, cfg);
    const double coarse_bracket = 1.0 - 4.0 * pi * (coarse.truncated + coarse.envelope);
    const double fine_bracket = 1.0 - 4.0 * pi * (fine.truncated + fine.envelope);
    return {fine_bracket, std::abs(fine_bracket - coarse_bracket) + 4.0 * pi * fine.error};
}

BracketValue delta_limit_bracket(const SamplingWindow& w, double omega0, const QuadratureConfig& cfg,
                                 BracketRoute route)
{
    return route == BracketRoute::Complement ? complement_bracket(w, omega0, cfg)
                                             : direct_tail_bracket(w, omega0, cfg);
}

std::string format_scale(double k)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", k);
    return buf;
}

double parse_double(std::string_view text, const char* what)
{
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument(std::string("bad ") + what + " '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

double bracket_to_db(double bracket)
{
    if (bracket <= unbounded_bracket_threshold) return minus_inf;
    return 10.0 * std::log10(bracket);
}

bool is_unbounded(double r_db) noexcept { return std::isinf(r_db) && r_db < 0.0; }

std::string_view to_string(CurveVariant v)
{
    return v == CurveVariant::PaperWithPi ? "paper" : "marecki";
}

CurveVariant parse_variant(std::string_view name)
{
    if (name == "paper") return CurveVariant::PaperWithPi;
    if (name == "marecki") return CurveVariant::MareckiNoPi;
    throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

SpectralFunction SpectralFunction::delta_limit(double omega0)
{
    SpectralFunction mu{omega0, 0.0, SpectralShape::DeltaLimit};
    mu.validate();
    return mu;
}

SpectralFunction SpectralFunction::gaussian(double omega0, double delta_omega)
{
    SpectralFunction mu{omega0, delta_omega, SpectralShape::Gaussian};
    mu.validate();
    return mu;
}

void SpectralFunction::validate() const
{
    if (!(omega0 >= 0.0) || !std::isfinite(omega0)) {
        throw std::invalid_argument("spectral centre frequency must be finite and non-negative");
    }
    if (shape == SpectralShape::Gaussian) {
        if (!(omega0 > 0.0) || !(delta_omega > 0.0) || !(delta_omega / omega0 < 0.1)) {
            throw std::invalid_argument("gaussian spectral function needs 0 < delta_omega < 0.1 omega0");
        }
    }
}

PhaseArgument::PhaseArgument(double value) : value_(value)
{
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument("phase argument must be finite and non-negative");
    }
}

BoundResult numeric_bound(const SamplingWindow& w, const SpectralFunction& mu,
                          const QuadratureConfig& cfg, BracketRoute route)
{
    mu.validate();
    cfg.validate();
    if (mu.shape == SpectralShape::DeltaLimit) {
        const BracketValue b = delta_limit_bracket(w, mu.omega0, cfg, route);
        const double bracket = check_bracket(b.value, b.error);
        return {bracket_to_db(bracket), bracket, b.error};
    }

    // Full ratio: d^3p = 4 pi omega_p^2 d omega_p, the 4 pi and (2 pi)^-3
    // prefactors cancel, leaving mu^2 omega_p^3 as the weight.
    const double lo = std::max(0.0, mu.omega0 - 10.0 * mu.delta_omega);
    const double hi = mu.omega0 + 10.0 * mu.delta_omega;
    const auto weight = [&](double wp) {
        const double d = (wp - mu.omega0) / mu.delta_omega;
        return std::exp(-d * d) * wp * wp * wp;
    };
    double inner_error = 0.0;
    const Integral numerator = integrate(
        [&](double wp) {
            const BracketValue b = delta_limit_bracket(w, wp, cfg, route);
            inner_error = std::max(inner_error, b.error);
            return weight(wp) * b.value;
        },
        lo, hi, cfg, "spectral-function numerator");
    const Integral denominator = integrate(weight, lo, hi, cfg, "spectral-function denominator");
    const double ratio = numerator.value / denominator.value;
    const double error = inner_error + numerator.error / denominator.value +
                         std::abs(ratio) * denominator.error / denominator.value;
    const double bracket = check_bracket(ratio, error);
    return {bracket_to_db(bracket), bracket, error};
}

std::vector<TruncationStep> bracket_truncation_study(const SamplingWindow& w, double omega0,
                                                     std::span<const double> cutoffs,
                                                     const QuadratureConfig& cfg)
{
    std::vector<TruncationStep> out;
    out.reserve(cutoffs.size());
    for (double cutoff : cutoffs) {
        if (!(cutoff > omega0)) throw std::invalid_argument("cutoff must exceed omega0");
        if (w.has_analytic_spectrum()) {
            const Integral body = integrate([&](double u) { return sqrt_ft_squared(w, u, cfg); },
                                            omega0, cutoff, cfg, "truncated spectral integral");
            const double b = 1.0 - 4.0 * pi * body.value;
            out.push_back({cutoff, b, b});
            continue;
        }
        const TailEstimate t = compact_tail(w, omega0, cutoff, cfg);
        out.push_back({cutoff, 1.0 - 4.0 * pi * t.truncated, 1.0 - 4.0 * pi * (t.truncated + t.envelope)});
    }
    return out;
}

double closed_form_gaussian(PhaseArgument arg)
{
    return bracket_to_db(std::erf(std::numbers::sqrt2 * arg.value()));
}

double closed_form_lorentzian_sq(PhaseArgument arg)
{
    return bracket_to_db(-std::expm1(-2.0 * arg.value()));
}

void QiCurve::validate() const
{
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("curve scale must be positive");
    }
    if (window == WindowKind::Trapezoid && !(slope_ratio > 0.0)) {
        throw std::invalid_argument("trapezoid curve needs n > 0");
    }
    if (window == WindowKind::Square && !unstable_opt_in) {
        throw std::invalid_argument("square window is numerically unstable and needs an explicit opt-in");
    }
}

std::string QiCurve::id() const
{
    std::string out(to_string(window));
    if (window == WindowKind::Trapezoid) out += "-n" + format_scale(slope_ratio);
    out += "-";
    out += to_string(variant);
    if (scale != 1.0) out += "-k" + format_scale(scale);
    if (evaluation == CurveEvaluation::Numeric && window != WindowKind::Trapezoid &&
        window != WindowKind::Square) {
        out += "-numeric";
    }
    return out;
}

QiCurve QiCurve::parse(std::string_view id)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (start <= id.size()) {
        const std::size_t dash = id.find('-', start);
        const std::size_t end = dash == std::string_view::npos ? id.size() : dash;
        parts.push_back(id.substr(start, end - start));
        if (dash == std::string_view::npos) break;
        start = dash + 1;
    }
    if (parts.size() < 2) throw std::invalid_argument("bad curve id '" + std::string(id) + "'");

    QiCurve c;
    c.window = parse_window_kind(parts[0]);
    std::size_t i = 1;
    if (c.window == WindowKind::Trapezoid) {
        if (parts.size() < 3 || !parts[1].starts_with("n")) {
            throw std::invalid_argument("trapezoid curve id needs -n<value>: '" + std::string(id) + "'");
        }
        c.slope_ratio = parse_double(parts[1].substr(1), "slope ratio");
        i = 2;
    }
    c.variant = parse_variant(parts[i++]);
    for (; i < parts.size(); ++i) {
        if (parts[i].starts_with("k")) {
            c.scale = parse_double(parts[i].substr(1), "scale");
        } else if (parts[i] == "numeric") {
            c.evaluation = CurveEvaluation::Numeric;
        } else {
            throw std::invalid_argument("bad curve id suffix '" + std::string(parts[i]) + "'");
        }
    }
    if (c.window == WindowKind::Trapezoid || c.window == WindowKind::Square) {
        c.evaluation = CurveEvaluation::Numeric;
        c.unstable_opt_in = c.window == WindowKind::Square;
    }
    c.validate();
    return c;
}

SamplingWindow QiCurve::unit_window() const
{
    switch (window) {
        case WindowKind::Gaussian: return SamplingWindow::gaussian(1.0);
        case WindowKind::LorentzianSquared: return SamplingWindow::lorentzian_squared(1.0);
        case WindowKind::Square:
            if (!unstable_opt_in) {
                throw std::invalid_argument("square window needs an explicit opt-in");
            }
            return SamplingWindow::square(1.0, allow_unstable_window);
        case WindowKind::Trapezoid: return SamplingWindow::trapezoid(1.0, slope_ratio);
    }
    throw std::logic_error("unreachable window kind");
}

QiCurve QiCurve::with_scale(double k) const
{
    QiCurve c = *this;
    c.scale = k;
    return c;
}

double curve_argument(const QiCurve& c, double ft)
{
    if (c.variant == CurveVariant::PaperWithPi) return pi * ft * c.scale;
    // The no-pi Gaussian form carries erf(2 sqrt(2) F_T).
    if (c.window == WindowKind::Gaussian) return 2.0 * ft * c.scale;
    return ft * c.scale;
}

double curve_value(const QiCurve& c, double ft, const QuadratureConfig& cfg)
{
    c.validate();
    if (!(ft > 0.0 && ft <= 1.0)) {
        throw std::invalid_argument("F_T must lie in (0, 1], got " + std::to_string(ft));
    }
    const double arg = curve_argument(c, ft);
    const bool closed = c.evaluation == CurveEvaluation::ClosedForm;
    if (closed && c.window == WindowKind::Gaussian) return closed_form_gaussian(PhaseArgument(arg));
    if (closed && c.window == WindowKind::LorentzianSquared) {
        return closed_form_lorentzian_sq(PhaseArgument(arg));
    }
    // Unit width: the bound depends on omega0 and the width only through their product.
    return numeric_bound(c.unit_window(), SpectralFunction::delta_limit(arg), cfg).r_db;
}

std::vector<CurveSample> sample_curve(const QiCurve& c, std::span<const double> fts,
                                      const QuadratureConfig& cfg, unsigned threads)
{
    std::vector<CurveSample> out(fts.size());
    const auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < fts.size(); i += stride) {
            out[i] = {fts[i], curve_value(c, fts[i], cfg)};
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(fts.size())));
    if (threads == 1) {
        work(0, 1);
        return out;
    }
    std::vector<std::exception_ptr> failures(threads);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    work(t, threads);
                } catch (...) {
                    failures[t] = std::current_exception();
                }
            });
        }
    }
    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }
    return out;
}

std::string curve_csv_header() { return "ft,r_db,curve_id,window,variant,scale\n"; }

std::string curve_csv_rows(const QiCurve& c, std::span<const CurveSample> samples)
{
    const std::string id = c.id();
    const std::string tail = "," + id + "," + std::string(to_string(c.window)) + "," +
                             std::string(to_string(c.variant)) + "," + format_scale(c.scale) + "\n";
    std::string out;
    char buf[64];
    for (const auto& s : samples) {
        if (is_unbounded(s.r_db)) {
            std::snprintf(buf, sizeof(buf), "%.6g,-inf", s.ft);
        } else {
            std::snprintf(buf, sizeof(buf), "%.6g,%.4f", s.ft, s.r_db == 0.0 ? 0.0 : s.r_db);
        }
        out += buf;
        out += tail;
    }
    return out;
}

double ford_bound(double t0)
{
    if (!(t0 > 0.0)) throw std::invalid_argument("sampling time must be positive");
    const double ct = constants::speed_of_light * t0;
    return -(3.0 / (16.0 * pi * pi)) * constants::hbar * constants::speed_of_light / (ct * ct * ct * ct);
}

double casimir_density(double a)
{
    if (!(a > 0.0)) throw std::invalid_argument("plate separation must be positive");
    return -(pi * pi / 720.0) * constants::hbar * constants::speed_of_light / (a * a * a * a);
}

double ford_casimir_factor_ratio() { return (3.0 / (16.0 * pi * pi)) / (pi * pi / 720.0); }

double casimir_equivalence_time(double a)
{
    if (!(a > 0.0)) throw std::invalid_argument("plate separation must be positive");
    return a / constants::speed_of_light;
}

}  // namespace qisq
