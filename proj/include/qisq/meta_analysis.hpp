#pragma once

#include <algorithm>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qisq/opa_model.hpp"
#include "qisq/qi_bound.hpp"

namespace qisq {

// One experimental squeezing data point as digitized from a publication.
struct SqueezingRecord
{
    std::string id;
    std::string ref_label;
    std::optional<double> x;
    std::optional<double> omega_over_gamma;
    std::optional<double> beta;
    std::optional<double> s_minus_db;
    std::optional<double> s_plus_db;
    std::optional<double> s_err_db;
    std::optional<double> ft_formula;
    std::optional<double> ft_graphical;
    std::optional<double> ft_err;

    // Throws std::invalid_argument on malformed values (sign, range).
    void validate() const;
    // At least one route to F_T: both extremes, a graphical F_T, or OPA parameters.
    bool has_measurement() const;

    friend bool operator==(const SqueezingRecord&, const SqueezingRecord&) = default;
};

// Malformed dataset file; line() is 1-based.
class DatasetError : public std::runtime_error
{
public:
    DatasetError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

inline constexpr std::string_view dataset_header =
    "id,ref_label,x,omega_over_gamma,beta,s_minus_db,s_plus_db,s_err_db,ft_formula,ft_graphical,ft_err";

std::vector<SqueezingRecord> parse_dataset(std::istream& in);
std::vector<SqueezingRecord> load_dataset(const std::string& path);
std::string dataset_to_csv(const std::vector<SqueezingRecord>& records);

// Error bars assumed when the source quotes none.
inline constexpr double default_s_err_db = 0.5;
inline constexpr double default_ft_err = 0.02;

// F_T from measured extremes in dB.
double ft_from_extremes(double s_minus_db, double s_plus_db);

enum class FtMethod { Formula, Graphical, Average };
std::string_view to_string(FtMethod m);
FtMethod parse_ft_method(std::string_view s);

struct ReconciledFt
{
    double ft;
    FtMethod method;
    std::optional<double> discrepancy;  // |formula - graphical| / mean
};

// Average of the formula and graphical F_T when both exist; nullopt when neither.
std::optional<ReconciledFt> reconcile_ft(const SqueezingRecord& r);

// Fills extremes from the OPA model when only (x, beta, w) are given, and the
// formula F_T from the extremes when it is not quoted.
struct ReducedRecord
{
    SqueezingRecord record;
    bool extremes_from_model = false;
    bool ft_formula_computed = false;
};
ReducedRecord reduce_record(const SqueezingRecord& r);

enum class Verdict { Violates, Consistent, WithinError };
std::string_view to_string(Verdict v);
Verdict parse_verdict(std::string_view s);

struct CurveCheck
{
    double bound_db = 0.0;  // -infinity for unbounded squeezing
    bool violates = false;  // r_db_used strictly below bound_db
    Verdict verdict = Verdict::Consistent;

    friend bool operator==(const CurveCheck&, const CurveCheck&) = default;
};

struct RecordResult
{
    std::string id;
    std::string ref_label;
    double ft_used = 0.0;
    FtMethod ft_method = FtMethod::Formula;
    std::optional<double> ft_discrepancy;
    double r_db_used = 0.0;
    double s_err_db = 0.0;
    double ft_err = 0.0;
    bool errors_default_assumed = false;
    bool extremes_from_model = false;
    std::map<std::string, CurveCheck> curves;
    CurveCheck ideal_opa;
    bool ideal_opa_checked = false;

    bool ideal_opa_exceeded() const { return ideal_opa_checked && ideal_opa.violates; }
    friend bool operator==(const RecordResult&, const RecordResult&) = default;
};

struct SkippedRecord
{
    std::string id;
    std::string reason;
    friend bool operator==(const SkippedRecord&, const SkippedRecord&) = default;
};

struct ScaleFit
{
    double envelope_k = 1.0;
    std::optional<double> least_squares_k;
    friend bool operator==(const ScaleFit&, const ScaleFit&) = default;
};

struct AnalysisReport
{
    std::vector<RecordResult> per_record;  // ordered by id
    std::vector<SkippedRecord> skipped;    // ordered by id
    std::optional<double> method_agreement_rms;
    std::map<std::string, ScaleFit> fitted_scales;
    std::map<std::string, std::string> curve_samples;  // curve id -> CSV block
    std::map<std::string, std::string> metadata;

    std::size_t violation_count(const std::string& curve_id) const;
    friend bool operator==(const AnalysisReport&, const AnalysisReport&) = default;
};

// Ideal-OPA limit as a bound curve: 10 log10 tan^2(pi F_T / 2) below F_T = 1/2
// and 0 dB above (no squeezing survives past half a period).
double ideal_opa_bound_db(double ft);

// Three-state verdict from the error rectangle [ft -/+ ft_err] x [r -/+ r_err]:
// Violates if even the most favourable corner lies below the bound, Consistent
// if the least favourable corner is on or above it, WithinError otherwise.
template <class BoundFn>
Verdict rectangle_verdict(BoundFn&& bound, double ft, double ft_err, double r_db, double r_err);

struct ClassifyOptions
{
    bool include_ideal = true;
    bool fit = false;
    std::vector<double> sample_grid;  // F_T values for embedded curve CSVs; empty = none
    QuadratureConfig quadrature;
};

AnalysisReport classify(const std::vector<SqueezingRecord>& records, const std::vector<QiCurve>& curves,
                        const ClassifyOptions& options = {});

// (F_T, R dB) pairs used for fitting.
struct FitPoint
{
    double ft;
    double r_db;
};

class NoFeasibleScale : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Largest k in (0, 1] such that no point lies strictly below the curve scaled by
// k (bisection to 1e-6), plus an unconstrained least-squares k on dB residuals.
ScaleFit fit_scale(std::vector<FitPoint> points, const QiCurve& base,
                   const QuadratureConfig& cfg = {});

std::vector<FitPoint> fit_points(const AnalysisReport& report);

// JSON with 6 significant digits and "-inf" for unbounded bounds.
std::string report_to_json(const AnalysisReport& report);
AnalysisReport report_from_json(std::string_view json);

// Rounds v to six significant digits, the precision the JSON report carries.
double round_sig6(double v);

template <class BoundFn>
Verdict rectangle_verdict(BoundFn&& bound, double ft, double ft_err, double r_db, double r_err)
{
    const double ft_lo = ft - ft_err;
    const double ft_hi = std::min(ft + ft_err, 1.0);
    const double best_bound = ft_lo > 0.0 ? bound(ft_lo) : -std::numeric_limits<double>::infinity();
    if (r_db + r_err < best_bound) return Verdict::Violates;
    if (r_db - r_err >= bound(ft_hi)) return Verdict::Consistent;
    return Verdict::WithinError;
}

}  // namespace qisq
