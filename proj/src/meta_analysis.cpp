#include "qisq/meta_analysis.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "json.hpp"

namespace qisq {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::optional<double> parse_optional(std::string_view field, std::size_t line, const char* column)
{
    if (field.empty()) return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
        throw DatasetError(line, std::string("column ") + column + ": not a number '" +
                                     std::string(field) + "'");
    }
    return value;
}

std::string format_optional(const std::optional<double>& v)
{
    if (!v) return "";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", *v);
    return buf;
}

void require(bool ok, const std::string& what)
{
    if (!ok) throw std::invalid_argument(what);
}

json number_or_inf(double v)
{
    if (is_unbounded(v)) return "-inf";
    return round_sig6(v);
}

double read_number_or_inf(const json& j)
{
    if (j.is_string()) {
        if (j.get<std::string>() == "-inf") return -std::numeric_limits<double>::infinity();
        throw std::invalid_argument("unexpected string where a number was expected");
    }
    return j.get<double>();
}

json optional_number(const std::optional<double>& v)
{
    if (!v) return nullptr;
    return round_sig6(*v);
}

std::optional<double> read_optional(const json& j)
{
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

json check_to_json(const CurveCheck& c)
{
    return {{"bound_db", number_or_inf(c.bound_db)},
            {"violates", c.violates},
            {"verdict", std::string(to_string(c.verdict))}};
}

CurveCheck check_from_json(const json& j)
{
    return {read_number_or_inf(j.at("bound_db")), j.at("violates").get<bool>(),
            parse_verdict(j.at("verdict").get<std::string>())};
}

}  // namespace

void SqueezingRecord::validate() const
{
    require(!id.empty(), "record id must not be empty");
    if (x) require(*x > 0.0 && *x < 1.0, id + ": x must lie in (0, 1)");
    if (omega_over_gamma) require(*omega_over_gamma >= 0.0, id + ": omega/gamma must be >= 0");
    if (beta) require(*beta > 0.0 && *beta <= 1.0, id + ": beta must lie in (0, 1]");
    if (s_minus_db) require(*s_minus_db < 0.0, id + ": s_minus_db must be negative");
    if (s_plus_db) require(*s_plus_db > 0.0, id + ": s_plus_db must be positive");
    if (s_err_db) require(*s_err_db >= 0.0, id + ": s_err_db must be >= 0");
    if (ft_formula) require(*ft_formula > 0.0 && *ft_formula < 1.0, id + ": ft_formula must lie in (0, 1)");
    if (ft_graphical) {
        require(*ft_graphical > 0.0 && *ft_graphical < 1.0, id + ": ft_graphical must lie in (0, 1)");
    }
    if (ft_err) require(*ft_err >= 0.0, id + ": ft_err must be >= 0");
}

bool SqueezingRecord::has_measurement() const
{
    return (s_minus_db && s_plus_db) || ft_graphical || ft_formula || (x && beta);
}

std::vector<SqueezingRecord> parse_dataset(std::istream& in)
{
    std::vector<SqueezingRecord> out;
    std::string raw;
    std::size_t line = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++line;
        const std::string_view text = trim(raw);
        if (text.empty() || text.front() == '#') continue;
        if (!header_seen) {
            if (text != dataset_header) {
                throw DatasetError(line, "expected header '" + std::string(dataset_header) + "'");
            }
            header_seen = true;
            continue;
        }
        const auto f = split_fields(text);
        if (f.size() != 11) {
            throw DatasetError(line, "expected 11 fields, found " + std::to_string(f.size()));
        }
        SqueezingRecord r;
        r.id = std::string(f[0]);
        r.ref_label = std::string(f[1]);
        r.x = parse_optional(f[2], line, "x");
        r.omega_over_gamma = parse_optional(f[3], line, "omega_over_gamma");
        r.beta = parse_optional(f[4], line, "beta");
        r.s_minus_db = parse_optional(f[5], line, "s_minus_db");
        r.s_plus_db = parse_optional(f[6], line, "s_plus_db");
        r.s_err_db = parse_optional(f[7], line, "s_err_db");
        r.ft_formula = parse_optional(f[8], line, "ft_formula");
        r.ft_graphical = parse_optional(f[9], line, "ft_graphical");
        r.ft_err = parse_optional(f[10], line, "ft_err");
        try {
            r.validate();
        } catch (const std::invalid_argument& e) {
            throw DatasetError(line, e.what());
        }
        out.push_back(std::move(r));
    }
    if (!header_seen && line > 0) throw DatasetError(line, "missing header");
    return out;
}

std::vector<SqueezingRecord> load_dataset(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DatasetError(0, "cannot open '" + path + "'");
    return parse_dataset(in);
}

std::string dataset_to_csv(const std::vector<SqueezingRecord>& records)
{
    std::string out(dataset_header);
    out += '\n';
    for (const auto& r : records) {
        out += r.id + "," + r.ref_label;
        for (const auto* v : {&r.x, &r.omega_over_gamma, &r.beta, &r.s_minus_db, &r.s_plus_db, &r.s_err_db,
                              &r.ft_formula, &r.ft_graphical, &r.ft_err}) {
            out += "," + format_optional(*v);
        }
        out += '\n';
    }
    return out;
}

double ft_from_extremes(double s_minus_db, double s_plus_db)
{
    if (!(s_minus_db < 0.0) || !(s_plus_db > 0.0)) {
        throw std::invalid_argument("extremes must satisfy s_minus_db < 0 < s_plus_db");
    }
    return squeezed_fraction_from_extremes(from_db(s_minus_db), from_db(s_plus_db));
}

std::string_view to_string(FtMethod m)
{
    switch (m) {
        case FtMethod::Formula: return "formula";
        case FtMethod::Graphical: return "graphical";
        case FtMethod::Average: return "average";
    }
    return "formula";
}

FtMethod parse_ft_method(std::string_view s)
{
    if (s == "formula") return FtMethod::Formula;
    if (s == "graphical") return FtMethod::Graphical;
    if (s == "average") return FtMethod::Average;
    throw std::invalid_argument("unknown ft method '" + std::string(s) + "'");
}

std::optional<ReconciledFt> reconcile_ft(const SqueezingRecord& r)
{
    if (r.ft_formula && r.ft_graphical) {
        const double mean = 0.5 * (*r.ft_formula + *r.ft_graphical);
        return ReconciledFt{mean, FtMethod::Average, std::abs(*r.ft_formula - *r.ft_graphical) / mean};
    }
    if (r.ft_formula) return ReconciledFt{*r.ft_formula, FtMethod::Formula, std::nullopt};
    if (r.ft_graphical) return ReconciledFt{*r.ft_graphical, FtMethod::Graphical, std::nullopt};
    return std::nullopt;
}

ReducedRecord reduce_record(const SqueezingRecord& r)
{
    ReducedRecord out{r, false, false};
    SqueezingRecord& rec = out.record;
    if (!(rec.s_minus_db && rec.s_plus_db) && rec.x && rec.beta) {
        const double w = rec.omega_over_gamma.value_or(0.0);
        if (!rec.s_minus_db) rec.s_minus_db = to_db(s_minus(*rec.x, *rec.beta, w));
        if (!rec.s_plus_db) rec.s_plus_db = to_db(s_plus(*rec.x, *rec.beta, w));
        out.extremes_from_model = true;
    }
    if (!rec.ft_formula && rec.s_minus_db && rec.s_plus_db) {
        rec.ft_formula = ft_from_extremes(*rec.s_minus_db, *rec.s_plus_db);
        out.ft_formula_computed = true;
    }
    return out;
}

std::string_view to_string(Verdict v)
{
    switch (v) {
        case Verdict::Violates: return "violates";
        case Verdict::Consistent: return "consistent";
        case Verdict::WithinError: return "within-error";
    }
    return "consistent";
}

Verdict parse_verdict(std::string_view s)
{
    if (s == "violates") return Verdict::Violates;
    if (s == "consistent") return Verdict::Consistent;
    if (s == "within-error") return Verdict::WithinError;
    throw std::invalid_argument("unknown verdict '" + std::string(s) + "'");
}

std::size_t AnalysisReport::violation_count(const std::string& curve_id) const
{
    std::size_t n = 0;
    for (const auto& r : per_record) {
        const auto it = r.curves.find(curve_id);
        if (it != r.curves.end() && it->second.violates) ++n;
    }
    return n;
}

double ideal_opa_bound_db(double ft)
{
    if (!(ft > 0.0)) return -std::numeric_limits<double>::infinity();
    if (ft >= 0.5) return 0.0;
    return to_db(ideal_bound(ft));
}

AnalysisReport classify(const std::vector<SqueezingRecord>& records, const std::vector<QiCurve>& curves,
                        const ClassifyOptions& options)
{
    AnalysisReport report;
    report.metadata = {
        {"effective_ft_kernel", std::string(to_string(EffectiveWeight::SqueezingDepth))},
        {"default_s_err_db", "0.5"},
        {"default_ft_err", "0.02"},
        {"violation_rule", "r_db_used strictly below the bound at ft_used"},
        {"caveat", "phase-noise corrections applied to some published fits are not modelled"},
    };

    std::vector<double> discrepancies;
    for (const auto& raw : records) {
        if (!raw.has_measurement()) {
            report.skipped.push_back({raw.id, "no F_T source (schema stub)"});
            continue;
        }
        const ReducedRecord reduced = reduce_record(raw);
        const SqueezingRecord& rec = reduced.record;
        const auto ft = reconcile_ft(rec);
        if (!ft) {
            report.skipped.push_back({rec.id, "no F_T source"});
            continue;
        }
        if (ft->discrepancy) discrepancies.push_back(*ft->discrepancy);
        if (!rec.s_minus_db) {
            report.skipped.push_back({rec.id, "no squeezing level to classify"});
            continue;
        }

        RecordResult res;
        res.id = rec.id;
        res.ref_label = rec.ref_label;
        res.ft_used = ft->ft;
        res.ft_method = ft->method;
        res.ft_discrepancy = ft->discrepancy;
        res.r_db_used = *rec.s_minus_db;
        res.errors_default_assumed = !rec.s_err_db || !rec.ft_err;
        res.s_err_db = rec.s_err_db.value_or(default_s_err_db);
        res.ft_err = rec.ft_err.value_or(default_ft_err);
        res.extremes_from_model = reduced.extremes_from_model;

        for (const auto& c : curves) {
            const auto bound = [&](double f) { return curve_value(c, f, options.quadrature); };
            CurveCheck check;
            check.bound_db = bound(res.ft_used);
            check.violates = res.r_db_used < check.bound_db;
            check.verdict = rectangle_verdict(bound, res.ft_used, res.ft_err, res.r_db_used, res.s_err_db);
            res.curves[c.id()] = check;
        }
        if (options.include_ideal) {
            CurveCheck check;
            check.bound_db = ideal_opa_bound_db(res.ft_used);
            check.violates = res.r_db_used < check.bound_db;
            check.verdict = rectangle_verdict(ideal_opa_bound_db, res.ft_used, res.ft_err, res.r_db_used,
                                              res.s_err_db);
            res.ideal_opa = check;
            res.ideal_opa_checked = true;
        }
        report.per_record.push_back(std::move(res));
    }

    const auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
    std::sort(report.per_record.begin(), report.per_record.end(), by_id);
    std::sort(report.skipped.begin(), report.skipped.end(), by_id);

    if (!discrepancies.empty()) {
        std::sort(discrepancies.begin(), discrepancies.end());
        double sum = 0.0;
        for (double d : discrepancies) sum += d * d;
        report.method_agreement_rms = std::sqrt(sum / static_cast<double>(discrepancies.size()));
    }

    if (options.fit && !report.per_record.empty()) {
        const auto points = fit_points(report);
        for (const auto& c : curves) {
            report.fitted_scales[c.id()] = fit_scale(points, c.with_scale(1.0), options.quadrature);
        }
    }

    if (!options.sample_grid.empty()) {
        for (const auto& c : curves) {
            const auto samples = sample_curve(c, options.sample_grid, options.quadrature);
            report.curve_samples[c.id()] = curve_csv_header() + curve_csv_rows(c, samples);
        }
    }
    return report;
}

std::vector<FitPoint> fit_points(const AnalysisReport& report)
{
    std::vector<FitPoint> out;
    out.reserve(report.per_record.size());
    for (const auto& r : report.per_record) out.push_back({r.ft_used, r.r_db_used});
    return out;
}

ScaleFit fit_scale(std::vector<FitPoint> points, const QiCurve& base, const QuadratureConfig& cfg)
{
    if (points.empty()) throw std::invalid_argument("fit_scale needs at least one point");
    std::sort(points.begin(), points.end(),
              [](const FitPoint& a, const FitPoint& b) { return a.ft != b.ft ? a.ft < b.ft : a.r_db < b.r_db; });

    const auto feasible = [&](double k) {
        const QiCurve c = base.with_scale(k);
        for (const auto& p : points) {
            if (p.r_db < curve_value(c, p.ft, cfg)) return false;
        }
        return true;
    };

    ScaleFit fit;
    if (feasible(1.0)) {
        fit.envelope_k = 1.0;
    } else {
        // Bound curves fall towards -inf as k -> 0+, so small k is always feasible.
        double lo = 0.0;
        double hi = 1.0;
        while (hi - lo > 1e-6) {
            const double mid = 0.5 * (lo + hi);
            (feasible(mid) ? lo : hi) = mid;
        }
        if (!(lo > 0.0) || !feasible(lo)) {
            throw NoFeasibleScale("no scale k in (0, 1] keeps every point above " + base.id());
        }
        fit.envelope_k = lo;
    }

    const auto sse = [&](double log_k) {
        const QiCurve c = base.with_scale(std::exp(log_k));
        double s = 0.0;
        for (const auto& p : points) {
            const double d = p.r_db - curve_value(c, p.ft, cfg);
            s += d * d;
        }
        return s;
    };
    const auto [log_k, residual] =
        boost::math::tools::brent_find_minima(sse, std::log(1e-4), std::log(1e2), 40);
    if (std::isfinite(residual)) fit.least_squares_k = std::exp(log_k);
    return fit;
}

double round_sig6(double v)
{
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::strtod(buf, nullptr);
}

std::string report_to_json(const AnalysisReport& report)
{
    json j;
    j["metadata"] = report.metadata;
    json records = json::array();
    for (const auto& r : report.per_record) {
        json curves = json::object();
        for (const auto& [id, c] : r.curves) curves[id] = check_to_json(c);
        json rec = {
            {"id", r.id},
            {"ref_label", r.ref_label},
            {"ft_used", round_sig6(r.ft_used)},
            {"ft_method", std::string(to_string(r.ft_method))},
            {"ft_discrepancy", optional_number(r.ft_discrepancy)},
            {"r_db_used", round_sig6(r.r_db_used)},
            {"s_err_db", round_sig6(r.s_err_db)},
            {"ft_err", round_sig6(r.ft_err)},
            {"errors_default_assumed", r.errors_default_assumed},
            {"extremes_from_model", r.extremes_from_model},
            {"violations", curves},
        };
        if (r.ideal_opa_checked) {
            rec["ideal_opa"] = check_to_json(r.ideal_opa);
            rec["ideal_opa_exceeded"] = r.ideal_opa_exceeded();
        }
        records.push_back(std::move(rec));
    }
    j["per_record"] = std::move(records);
    json skipped = json::array();
    for (const auto& s : report.skipped) skipped.push_back({{"id", s.id}, {"reason", s.reason}});
    j["skipped"] = std::move(skipped);
    j["method_agreement_rms"] = optional_number(report.method_agreement_rms);
    json fits = json::object();
    for (const auto& [id, f] : report.fitted_scales) {
        fits[id] = {{"envelope_k", round_sig6(f.envelope_k)},
                    {"least_squares_k", optional_number(f.least_squares_k)}};
    }
    j["fitted_scales"] = std::move(fits);
    j["curve_samples"] = report.curve_samples;
    return j.dump(2) + "\n";
}

AnalysisReport report_from_json(std::string_view text)
{
    const json j = json::parse(text);
    AnalysisReport report;
    report.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
    for (const auto& rec : j.at("per_record")) {
        RecordResult r;
        r.id = rec.at("id").get<std::string>();
        r.ref_label = rec.at("ref_label").get<std::string>();
        r.ft_used = rec.at("ft_used").get<double>();
        r.ft_method = parse_ft_method(rec.at("ft_method").get<std::string>());
        r.ft_discrepancy = read_optional(rec.at("ft_discrepancy"));
        r.r_db_used = rec.at("r_db_used").get<double>();
        r.s_err_db = rec.at("s_err_db").get<double>();
        r.ft_err = rec.at("ft_err").get<double>();
        r.errors_default_assumed = rec.at("errors_default_assumed").get<bool>();
        r.extremes_from_model = rec.at("extremes_from_model").get<bool>();
        for (const auto& [id, c] : rec.at("violations").items()) r.curves[id] = check_from_json(c);
        if (rec.contains("ideal_opa")) {
            r.ideal_opa = check_from_json(rec.at("ideal_opa"));
            r.ideal_opa_checked = true;
        }
        report.per_record.push_back(std::move(r));
    }
    for (const auto& s : j.at("skipped")) {
        report.skipped.push_back({s.at("id").get<std::string>(), s.at("reason").get<std::string>()});
    }
    report.method_agreement_rms = read_optional(j.at("method_agreement_rms"));
    for (const auto& [id, f] : j.at("fitted_scales").items()) {
        report.fitted_scales[id] = {f.at("envelope_k").get<double>(), read_optional(f.at("least_squares_k"))};
    }
    report.curve_samples = j.at("curve_samples").get<std::map<std::string, std::string>>();
    return report;
}

}  // namespace qisq
