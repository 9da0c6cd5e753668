#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace qisq {

// Tolerances shared by every adaptive integration in the library.
struct QuadratureConfig
{
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    // Upper bound on integrand evaluations per adaptive integral.
    unsigned max_nodes = 1u << 17;

    // Bisection depth allowed by the node budget (31-point rule per leaf).
    unsigned max_depth() const;
    void validate() const;
};

// Raised when an integral does not meet its tolerance within the node budget.
class QuadratureError : public std::runtime_error
{
public:
    QuadratureError(const std::string& what, double achieved_error, double requested)
        : std::runtime_error(what + " (achieved error " + format(achieved_error) + ", requested " +
                             format(requested) + ")"),
          achieved_error_(achieved_error),
          requested_(requested)
    {
    }

    double achieved_error() const noexcept { return achieved_error_; }
    double requested() const noexcept { return requested_; }

private:
    static std::string format(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3g", v);
        return buf;
    }

    double achieved_error_;
    double requested_;
};

struct Integral
{
    double value = 0.0;
    double error = 0.0;
};

namespace detail {

struct RawIntegral
{
    double value;
    double error;
    double l1;
};

inline double roundoff_floor(double l1) { return 1e4 * std::numeric_limits<double>::epsilon() * l1; }

template <class F>
RawIntegral gauss_kronrod(F& f, double a, double b, const QuadratureConfig& cfg, unsigned depth)
{
    using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
    RawIntegral r{0.0, 0.0, 0.0};
    r.value = Rule::integrate(f, a, b, depth, cfg.rel_tol, &r.error, &r.l1);
    return r;
}

template <class F>
RawIntegral gauss_kronrod(F& f, double a, double b, const QuadratureConfig& cfg)
{
    return gauss_kronrod(f, a, b, cfg, cfg.max_depth());
}

inline Integral accept(const RawIntegral& r, const QuadratureConfig& cfg, const char* what,
                       double conditioning = 1.0)
{
    // Integrals that cancel to ~0 are judged against roundoff in the L1 norm.
    const double allowed = std::max(
        {cfg.rel_tol * std::abs(r.value), cfg.abs_tol, conditioning * roundoff_floor(r.l1)});
    if (!std::isfinite(r.value) || r.error > allowed) {
        throw QuadratureError(std::string(what) + " did not converge", r.error, allowed);
    }
    return {r.value, r.error};
}

}  // namespace detail

// Adaptive Gauss-Kronrod on [a, b]; b may be +infinity. Throws QuadratureError
// when the estimated error exceeds max(rel_tol*|value|, abs_tol, roundoff of L1).
template <class F>
Integral integrate(F&& f, double a, double b, const QuadratureConfig& cfg, const char* what = "integral")
{
    return detail::accept(detail::gauss_kronrod(f, a, b, cfg), cfg, what);
}

// Same contract, but [a, b] is split into `pieces` equal panels first. Used for
// oscillatory integrands whose result cancels far below the panel magnitudes.
// `max_phase` is the largest trigonometric argument the integrand evaluates;
// its rounding error scales the roundoff floor.
template <class F>
Integral integrate_panels(F&& f, double a, double b, std::size_t pieces, const QuadratureConfig& cfg,
                          const char* what = "integral", double max_phase = 1.0)
{
    pieces = std::max<std::size_t>(pieces, 1);
    detail::RawIntegral total{0.0, 0.0, 0.0};
    const double h = (b - a) / static_cast<double>(pieces);
    for (std::size_t i = 0; i < pieces; ++i) {
        const double lo = a + h * static_cast<double>(i);
        const double hi = i + 1 == pieces ? b : lo + h;
        // A single rule usually resolves a panel; adapting on a panel whose
        // integral cancels only bisects roundoff down to the depth limit.
        detail::RawIntegral part = detail::gauss_kronrod(f, lo, hi, cfg, 0);
        const double conditioning = std::max(1.0, max_phase);
        if (part.error > std::max(cfg.rel_tol * std::abs(part.value),
                                  conditioning * detail::roundoff_floor(part.l1))) {
            part = detail::gauss_kronrod(f, lo, hi, cfg);
        }
        total.value += part.value;
        total.error += part.error;
        total.l1 += part.l1;
    }
    return detail::accept(total, cfg, what, std::max(1.0, max_phase));
}

}  // namespace qisq
