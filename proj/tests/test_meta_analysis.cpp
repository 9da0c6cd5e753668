#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "qisq/meta_analysis.hpp"

using namespace qisq;

namespace {

constexpr double pi = std::numbers::pi;
const std::string header(dataset_header);

std::vector<SqueezingRecord> parse_text(const std::string& text)
{
    std::istringstream in(text);
    return parse_dataset(in);
}

std::size_t error_line(const std::string& text)
{
    try {
        parse_text(text);
    } catch (const DatasetError& e) {
        return e.line();
    }
    return 0;
}

SqueezingRecord point(const std::string& id, double ft, double r_db, std::optional<double> s_err = 0.3,
                      std::optional<double> ft_err = 0.01)
{
    SqueezingRecord r;
    r.id = id;
    r.ref_label = "synthetic";
    r.ft_graphical = ft;
    r.s_minus_db = r_db;
    r.s_err_db = s_err;
    r.ft_err = ft_err;
    return r;
}

std::vector<QiCurve> gaussian_pair()
{
    QiCurve p;
    QiCurve m;
    m.variant = CurveVariant::MareckiNoPi;
    return {p, m};
}

std::size_t violations(const std::vector<FitPoint>& pts, const QiCurve& c)
{
    std::size_t n = 0;
    for (const auto& p : pts) n += p.r_db < curve_value(c, p.ft) ? 1 : 0;
    return n;
}

}  // namespace

TEST_CASE("dataset parsing")
{
    const std::string text = "# comment\n\n" + header + "\r\n" +
                             "a,ref, 0.5 ,0,0.9,,,,,,\r\n"
                             "# another\n"
                             "b,ref,,,,-3,4,0.2,0.3,0.31,0.01\n";
    const auto recs = parse_text(text);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].id == "a");
    CHECK(recs[0].x == 0.5);
    CHECK(recs[0].omega_over_gamma == 0.0);
    CHECK_FALSE(recs[0].s_minus_db.has_value());
    CHECK(recs[1].s_plus_db == 4.0);
    CHECK(recs[1].ft_err == 0.01);
    CHECK(parse_text(dataset_to_csv(recs)) == recs);
    CHECK(parse_text("").empty());
    CHECK(parse_text(header + "\n").empty());
}

TEST_CASE("dataset errors carry the line number")
{
    CHECK(error_line("id,x\n") == 1);
    CHECK(error_line("# c\n" + header + "\na,ref,0.5\n") == 3);
    CHECK(error_line(header + "\na,ref,zero,,,,,,,,\n") == 2);
    CHECK(error_line(header + "\n\na,ref,0.5,,,,,,,,\nb,ref,,,,3,4,,,,\n") == 4);
    CHECK(error_line(header + "\na,ref,1.5,,,,,,,,\n") == 2);
    CHECK(error_line(header + "\na,ref,,,,,,,,1.2,\n") == 2);
    CHECK(error_line(header + "\n,ref,,,,,,,,0.2,\n") == 2);
    CHECK(error_line(header + "\na,ref,,,,,,-1,,,\n") == 2);
}

TEST_CASE("shipped dataset")
{
    const auto recs = load_dataset(QISQ_DATA_DIR "/squeezing_records.csv");
    CHECK(recs.size() == 15);
    const auto it = std::find_if(recs.begin(), recs.end(), [](const auto& r) { return r.id == "vah-x0.8"; });
    REQUIRE(it != recs.end());
    CHECK(it->x == 0.8);
    CHECK(it->beta == 0.975);
    CHECK_THROWS_AS(load_dataset("/nonexistent/file.csv"), DatasetError);
}

TEST_CASE("F_T from extremes")
{
    CHECK(ft_from_extremes(-14.31, 18.98) == doctest::Approx(0.0705).epsilon(2e-3));
    for (double x : {0.5, 3.0, 10.0}) {
        CHECK(ft_from_extremes(-x, x) == doctest::Approx(ideal_ft(from_db(-x))).epsilon(1e-12));
    }
    const double near_half = ft_from_extremes(-0.01, 0.01);
    CHECK(near_half < 0.5);
    CHECK(near_half == doctest::Approx(0.5).epsilon(1e-3));
    CHECK_THROWS_AS(ft_from_extremes(0.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(ft_from_extremes(-3.0, 0.0), std::invalid_argument);
}

TEST_CASE("module boundary round trip")
{
    for (double x : {0.05, 0.3, 0.6, 0.95}) {
        for (double beta : {0.3, 0.975, 1.0}) {
            for (double w : {0.0, 0.8}) {
                CHECK(ft_from_extremes(to_db(s_minus(x, beta, w)), to_db(s_plus(x, beta, w))) ==
                      doctest::Approx(squeezed_fraction(x, beta, w)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("reconciling the two F_T routes")
{
    SqueezingRecord r;
    r.id = "r";
    r.ft_formula = 0.070;
    r.ft_graphical = 0.080;
    auto f = reconcile_ft(r);
    REQUIRE(f);
    CHECK(f->ft == doctest::Approx(0.075));
    CHECK(f->method == FtMethod::Average);
    CHECK(*f->discrepancy == doctest::Approx(0.01 / 0.075));
    r.ft_formula.reset();
    r.ft_graphical = 0.14;
    f = reconcile_ft(r);
    CHECK(f->ft == 0.14);
    CHECK(f->method == FtMethod::Graphical);
    CHECK_FALSE(f->discrepancy);
    r.ft_graphical.reset();
    CHECK_FALSE(reconcile_ft(r));
    CHECK(parse_ft_method(to_string(FtMethod::Average)) == FtMethod::Average);
}

TEST_CASE("records reduced through the OPA model")
{
    SqueezingRecord r;
    r.id = "v";
    r.x = 0.8;
    r.beta = 0.975;
    const auto red = reduce_record(r);
    CHECK(red.extremes_from_model);
    CHECK(red.ft_formula_computed);
    CHECK(*red.record.s_minus_db == doctest::Approx(to_db(1.0 - 3.12 / 3.24)).epsilon(1e-13));
    CHECK(*red.record.s_plus_db == doctest::Approx(to_db(79.0)).epsilon(1e-13));
    CHECK(*red.record.ft_formula == doctest::Approx(1.0 - 2.0 / pi * std::atan(9.0)).epsilon(1e-12));

    SqueezingRecord quoted = point("q", 0.2, -3.0);
    quoted.ft_formula = 0.21;
    const auto kept = reduce_record(quoted);
    CHECK_FALSE(kept.extremes_from_model);
    CHECK(kept.record.ft_formula == 0.21);
}

TEST_CASE("rectangle verdicts")
{
    const auto flat = [](double) { return -5.0; };
    CHECK(rectangle_verdict(flat, 0.3, 0.01, -6.0, 0.5) == Verdict::Violates);
    CHECK(rectangle_verdict(flat, 0.3, 0.01, -4.0, 0.5) == Verdict::Consistent);
    CHECK(rectangle_verdict(flat, 0.3, 0.01, -5.0, 0.5) == Verdict::WithinError);
    CHECK(rectangle_verdict(flat, 0.3, 0.01, -5.0, 0.0) == Verdict::Consistent);
    // Rising bound: the low-F_T corner is the most favourable one.
    const auto rising = [](double ft) { return -10.0 + 10.0 * ft; };
    CHECK(rectangle_verdict(rising, 0.5, 0.1, -5.95, 0.1) == Verdict::WithinError);
    CHECK(rectangle_verdict(rising, 0.5, 0.1, -6.5, 0.1) == Verdict::Violates);
    for (auto v : {Verdict::Violates, Verdict::Consistent, Verdict::WithinError}) {
        CHECK(parse_verdict(to_string(v)) == v);
    }
}

TEST_CASE("the strongest pump setting")
{
    SqueezingRecord r;
    r.id = "vah-x0.8";
    r.ref_label = "vah";
    r.x = 0.8;
    r.omega_over_gamma = 0.0;
    r.beta = 0.975;
    const auto report = classify({r}, gaussian_pair());
    REQUIRE(report.per_record.size() == 1);
    const auto& res = report.per_record[0];
    CHECK(res.r_db_used == doctest::Approx(-14.31).epsilon(1e-3));
    CHECK(res.ft_used == doctest::Approx(0.0705).epsilon(1e-3));
    CHECK(res.ft_method == FtMethod::Formula);
    CHECK(res.extremes_from_model);
    CHECK(res.errors_default_assumed);
    CHECK(res.s_err_db == default_s_err_db);
    CHECK(res.ft_err == default_ft_err);

    const auto& gp = res.curves.at("gaussian-paper");
    const double bound = oracle::db(static_cast<double>(oracle::erf_series(std::sqrt(2.0L) * pi * res.ft_used)));
    CHECK(gp.bound_db == doctest::Approx(bound).epsilon(1e-12));
    CHECK(gp.violates);
    CHECK(gp.verdict == Verdict::Violates);
    CHECK(res.curves.at("gaussian-marecki").violates);

    CHECK(res.ideal_opa.bound_db == doctest::Approx(-19.08).epsilon(1e-3));
    CHECK_FALSE(res.ideal_opa_exceeded());
    CHECK(report.violation_count("gaussian-paper") == 1);
}

TEST_CASE("classification edge cases")
{
    SUBCASE("empty input")
    {
        const auto report = classify({}, gaussian_pair());
        CHECK(report.per_record.empty());
        CHECK(report.skipped.empty());
        CHECK_FALSE(report.method_agreement_rms);
    }
    SUBCASE("point exactly on a curve")
    {
        QiCurve g;
        const double ft = 0.2;
        const auto report = classify({point("on", ft, curve_value(g, ft))}, {g});
        const auto& c = report.per_record.at(0).curves.at("gaussian-paper");
        CHECK_FALSE(c.violates);
        CHECK(c.verdict == Verdict::WithinError);
    }
    SUBCASE("skips and defaults")
    {
        SqueezingRecord stub;
        stub.id = "stub";
        SqueezingRecord graphical_only = point("g", 0.14, 0.0);
        graphical_only.s_minus_db.reset();
        const auto report = classify({stub, graphical_only, point("p", 0.3, -2.0, std::nullopt, 0.02)}, gaussian_pair());
        CHECK(report.per_record.size() == 1);
        REQUIRE(report.skipped.size() == 2);
        CHECK(report.skipped[0].id == "g");
        CHECK(report.skipped[1].id == "stub");
        CHECK(report.per_record[0].errors_default_assumed);
        CHECK(report.per_record[0].s_err_db == default_s_err_db);
    }
    SUBCASE("agreement rms over records with both routes")
    {
        auto a = point("a", 0.2, -3.0);
        a.ft_formula = 0.22;
        auto b = point("b", 0.3, -3.0);
        b.ft_formula = 0.3;
        const auto report = classify({a, b}, gaussian_pair());
        const double d = 0.02 / 0.21;
        CHECK(*report.method_agreement_rms == doctest::Approx(std::sqrt(d * d / 2.0)));
    }
}

TEST_CASE("classification ignores record order")
{
    std::vector<SqueezingRecord> recs;
    for (int i = 0; i < 8; ++i) recs.push_back(point("p" + std::to_string(i), 0.05 + 0.05 * i, -1.0 - i));
    ClassifyOptions opt;
    opt.fit = true;
    const auto ref = classify(recs, gaussian_pair(), opt);
    std::mt19937 rng(7);
    for (int k = 0; k < 3; ++k) {
        std::shuffle(recs.begin(), recs.end(), rng);
        CHECK(classify(recs, gaussian_pair(), opt) == ref);
    }
}

TEST_CASE("envelope fit of a single point")
{
    // erf(sqrt(2) pi F_T k) = 10^(R/10), solved by bisection against the series.
    const double ft = squeezed_fraction(0.8, 0.975, 0.0);
    const double r = to_db(s_minus(0.8, 0.975, 0.0));
    const double target = from_db(r);
    const double k_ref = oracle::bisect(
        [&](double k) {
            return static_cast<double>(oracle::erf_series(std::sqrt(2.0L) * pi * ft * k)) - target;
        },
        1e-6, 1.0);
    QiCurve g;
    const auto fit = fit_scale({{ft, r}}, g);
    CHECK(fit.envelope_k == doctest::Approx(k_ref).epsilon(2e-6));
    CHECK(fit.envelope_k <= k_ref);
    CHECK(k_ref == doctest::Approx(0.104908).epsilon(1e-5));
    REQUIRE(fit.least_squares_k);
    CHECK(*fit.least_squares_k == doctest::Approx(k_ref).epsilon(1e-4));
}

TEST_CASE("envelope fit property")
{
    const std::vector<FitPoint> pts{{0.0705, -14.3}, {0.3144, -5.12}, {0.4365, -1.69}, {0.2, -8.0}, {0.1, -3.0}};
    QiCurve gp;
    QiCurve lp;
    lp.window = WindowKind::LorentzianSquared;
    QiCurve tm;
    tm.window = WindowKind::Trapezoid;
    tm.slope_ratio = 0.5;
    tm.variant = CurveVariant::MareckiNoPi;
    tm.evaluation = CurveEvaluation::Numeric;
    for (const auto& base : {gp, lp, tm}) {
        CAPTURE(base.id());
        const auto fit = fit_scale(pts, base);
        CHECK(violations(pts, base.with_scale(fit.envelope_k)) == 0);
        if (fit.envelope_k * 1.01 <= 1.0) CHECK(violations(pts, base.with_scale(1.01 * fit.envelope_k)) >= 1);
    }
    CHECK(fit_scale({{0.3, 0.0}}, gp).envelope_k == 1.0);
    CHECK_THROWS_AS(fit_scale({}, gp), std::invalid_argument);
}

TEST_CASE("shipped dataset analysis")
{
    const auto recs = load_dataset(QISQ_DATA_DIR "/squeezing_records.csv");
    QiCurve gp;
    QiCurve gm;
    gm.variant = CurveVariant::MareckiNoPi;
    QiCurve lp;
    lp.window = WindowKind::LorentzianSquared;
    QiCurve lm = lp;
    lm.variant = CurveVariant::MareckiNoPi;
    ClassifyOptions opt;
    opt.fit = true;
    const auto report = classify(recs, {gp, gm, lp, lm}, opt);
    CHECK(report.per_record.size() == 3);
    CHECK(report.skipped.size() == 12);
    CHECK(report.violation_count("gaussian-paper") == 3);
    CHECK(report.violation_count("gaussian-marecki") == 3);
    CHECK(report.violation_count("lorentzian2-marecki") == 2);
    for (const auto& r : report.per_record) CHECK_FALSE(r.ideal_opa_exceeded());

    const auto pts = fit_points(report);
    for (const auto& c : {gp, gm, lp, lm}) {
        const double k = report.fitted_scales.at(c.id()).envelope_k;
        CHECK(violations(pts, c.with_scale(k)) == 0);
        CHECK(violations(pts, c.with_scale(1.01 * k)) >= 1);
    }
    // regression values
    CHECK(report.fitted_scales.at("gaussian-paper").envelope_k == doctest::Approx(0.104908).epsilon(2e-5));
    CHECK(report.fitted_scales.at("gaussian-marecki").envelope_k == doctest::Approx(0.16479).epsilon(2e-5));
    CHECK(report.fitted_scales.at("lorentzian2-paper").envelope_k == doctest::Approx(0.0852633).epsilon(2e-5));
    CHECK(report.fitted_scales.at("lorentzian2-marecki").envelope_k == doctest::Approx(0.267864).epsilon(2e-5));
}

TEST_CASE("report json")
{
    SUBCASE("exact round trip of six-digit values")
    {
        AnalysisReport r;
        RecordResult a;
        a.id = "a";
        a.ref_label = "x";
        a.ft_used = 0.0704509;
        a.ft_method = FtMethod::Average;
        a.ft_discrepancy = 0.133333;
        a.r_db_used = -14.3136;
        a.s_err_db = 0.5;
        a.ft_err = 0.02;
        a.errors_default_assumed = true;
        a.curves["gaussian-paper"] = {-4.65679, true, Verdict::Violates};
        a.curves["square-paper"] = {-std::numeric_limits<double>::infinity(), false, Verdict::Consistent};
        a.ideal_opa = {-19.0849, false, Verdict::WithinError};
        a.ideal_opa_checked = true;
        r.per_record.push_back(a);
        r.skipped.push_back({"s", "no F_T source"});
        r.method_agreement_rms = 0.08;
        r.fitted_scales["gaussian-paper"] = {0.104908, 0.186186};
        r.curve_samples["gaussian-paper"] = "ft,r_db\n0.5,-0.0073\n";
        r.metadata["k"] = "v";
        const std::string text = report_to_json(r);
        CHECK(text.find("\"-inf\"") != std::string::npos);
        CHECK(report_from_json(text) == r);
    }
    SUBCASE("serialization is a fixed point for computed reports")
    {
        const auto recs = load_dataset(QISQ_DATA_DIR "/squeezing_records.csv");
        ClassifyOptions opt;
        opt.sample_grid = {0.1, 0.5, 1.0};
        const auto report = classify(recs, gaussian_pair(), opt);
        const std::string once = report_to_json(report);
        CHECK(report_to_json(report_from_json(once)) == once);
        CHECK(report_from_json(once).curve_samples == report.curve_samples);
    }
    CHECK(round_sig6(0.123456789) == 0.123457);
    CHECK(round_sig6(-14.313637) == -14.3136);
    CHECK(std::isinf(round_sig6(-std::numeric_limits<double>::infinity())));
    CHECK_THROWS(report_from_json("{}"));
}
