#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qisq/figures.hpp"
#include "qisq/meta_analysis.hpp"
#include "qisq/opa_model.hpp"
#include "qisq/plot.hpp"
#include "qisq/qi_bound.hpp"

namespace {

using namespace qisq;

enum exit_code { ok = 0, usage = 2, numeric = 3, data = 4 };

struct UsageError : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

struct Settings
{
    QuadratureConfig quad;
    double db_floor = -25.0;
};

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_number(const std::string& text, const std::string& what)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw UsageError("bad number for " + what + ": '" + text + "'");
    return v;
}

Settings load_config(const std::string& path)
{
    Settings s;
    if (path.empty()) return s;
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config '" + path + "'");
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(n) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "quad.rel_tol") {
            s.quad.rel_tol = to_number(value, key);
        } else if (key == "quad.max_nodes") {
            const double v = to_number(value, key);
            if (!(v >= 1.0) || v != std::floor(v)) throw UsageError("quad.max_nodes must be a positive integer");
            s.quad.max_nodes = static_cast<std::size_t>(v);
        } else if (key == "plot.db_floor") {
            s.db_floor = to_number(value, key);
        } else {
            throw UsageError(path + ":" + std::to_string(n) + ": unknown key '" + key + "'");
        }
    }
    try {
        s.quad.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    if (!(s.db_floor < 0.0)) throw UsageError("plot.db_floor must be negative");
    return s;
}

// lo:hi:step -> lo + i*step for every i with the point not past hi.
std::vector<double> parse_grid(const std::string& spec)
{
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("grid must be lo:hi:step, got '" + spec + "'");
    const double lo = to_number(parts[0], "grid lo");
    const double hi = to_number(parts[1], "grid hi");
    const double step = to_number(parts[2], "grid step");
    if (!(step > 0.0) || !(hi >= lo)) throw UsageError("grid needs step > 0 and hi >= lo");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (count > 1000000) throw UsageError("grid has too many points");
    std::vector<double> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

void write_output(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << text;
    if (!out) throw UsageError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError(0, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

AnalysisReport load_report(const std::string& path)
{
    try {
        return report_from_json(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw DatasetError(0, "report '" + path + "': " + e.what());
    }
}

std::vector<QiCurve> parse_curve_list(const std::string& list)
{
    std::vector<QiCurve> out;
    std::stringstream ss(list);
    for (std::string id; std::getline(ss, id, ',');) {
        id = trim(id);
        if (id.empty()) continue;
        try {
            out.push_back(QiCurve::parse(id));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    return out;
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string linear_and_db(const char* name, double v)
{
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s = %.4f (%.4f dB)\n", name, v, to_db(v));
    return buf;
}

std::string plain(const char* name, double v)
{
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s = %.4f\n", name, v);
    return buf;
}

struct BoundArgs
{
    std::string window;
    double n = 0.0;
    std::string variant = "paper";
    double scale = 1.0;
    std::string ft;
    double omega_t0 = -1.0;
    bool numeric = false;
    bool allow_unstable = false;
    std::string route = "complement";
    std::string out;
    unsigned threads = 0;
};

int run_bound(const BoundArgs& a, const Settings& s)
{
    QiCurve c;
    try {
        c.window = parse_window_kind(a.window);
        c.variant = parse_variant(a.variant);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    c.slope_ratio = c.window == WindowKind::Trapezoid ? a.n : 0.0;
    c.scale = a.scale;
    const bool compact = c.window == WindowKind::Trapezoid || c.window == WindowKind::Square;
    c.evaluation = (a.numeric || compact) ? CurveEvaluation::Numeric : CurveEvaluation::ClosedForm;
    c.unstable_opt_in = a.allow_unstable;
    if (c.window == WindowKind::Square && !a.allow_unstable) {
        throw UsageError("the square window is numerically unstable; pass --allow-unstable to use it");
    }
    if (c.window == WindowKind::Trapezoid && !(a.n > 0.0)) throw UsageError("--n must be > 0 for trapezoid");
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (a.ft.empty() == (a.omega_t0 < 0.0)) throw UsageError("give exactly one of --ft or --omega-t0");

    if (!a.ft.empty()) {
        const auto grid = parse_grid(a.ft);
        for (double ft : grid) {
            if (!(ft > 0.0 && ft <= 1.0 + 1e-12)) throw UsageError("--ft grid must lie in (0, 1]");
        }
        std::vector<double> clamped(grid);
        for (double& ft : clamped) ft = std::min(ft, 1.0);
        const auto samples = sample_curve(c, clamped, s.quad, a.threads ? a.threads : default_threads());
        write_output(a.out, curve_csv_header() + curve_csv_rows(c, samples));
        return ok;
    }

    BracketRoute route = BracketRoute::Complement;
    if (a.route == "direct") {
        route = BracketRoute::DirectTail;
    } else if (a.route != "complement") {
        throw UsageError("--route must be complement or direct");
    }
    BoundResult r;
    if (c.evaluation == CurveEvaluation::ClosedForm && route == BracketRoute::Complement) {
        const PhaseArgument arg(a.omega_t0);
        r.r_db = c.window == WindowKind::Gaussian ? closed_form_gaussian(arg) : closed_form_lorentzian_sq(arg);
        r.bracket = std::isinf(r.r_db) ? 0.0 : std::pow(10.0, r.r_db / 10.0);
    } else {
        r = numeric_bound(c.unit_window(), SpectralFunction::delta_limit(a.omega_t0), s.quad, route);
    }
    char buf[256];
    std::string text = "window,omega_t0,r_db,bracket,error_estimate\n";
    if (r.unbounded()) {
        std::snprintf(buf, sizeof(buf), "%s,%.6g,-inf,%.6g,%.3g\n", a.window.c_str(), a.omega_t0, r.bracket,
                      r.error_estimate);
    } else {
        std::snprintf(buf, sizeof(buf), "%s,%.6g,%.4f,%.10g,%.3g\n", a.window.c_str(), a.omega_t0, r.r_db,
                      r.bracket, r.error_estimate);
    }
    write_output(a.out, text + buf);
    return ok;
}

struct OpaArgs
{
    double x = -1.0;
    double beta = 1.0;
    double w = 0.0;
    double theta = std::nan("");
    bool extremes = false;
    bool ft = false;
    double ideal_bound_ft = -1.0;
    double effective_w_max = -1.0;
};

int run_opa(const OpaArgs& a)
{
    std::string text;
    const bool have_x = a.x >= 0.0;
    if (!have_x && a.ideal_bound_ft < 0.0) throw UsageError("give --x (with --beta, --w) or --ideal-bound");
    try {
        if (have_x) {
            const bool any = a.extremes || a.ft || !std::isnan(a.theta) || a.effective_w_max >= 0.0;
            if (!std::isnan(a.theta)) text += linear_and_db("variance", variance({a.x, a.beta, a.w, a.theta}));
            if (a.extremes || !any) {
                text += linear_and_db("s_minus", s_minus(a.x, a.beta, a.w));
                text += linear_and_db("s_plus", s_plus(a.x, a.beta, a.w));
                text += linear_and_db("product", extremes_product(a.x, a.beta, a.w));
            }
            if (a.ft || !any) text += plain("ft", squeezed_fraction(a.x, a.beta, a.w));
            if (a.effective_w_max >= 0.0) text += plain("ft_effective", effective_ft(a.x, a.beta, a.effective_w_max));
        }
        if (a.ideal_bound_ft >= 0.0) {
            if (!(a.ideal_bound_ft > 0.0 && a.ideal_bound_ft <= 1.0)) {
                throw std::invalid_argument("--ideal-bound needs 0 < F_T <= 1");
            }
            const double db = ideal_opa_bound_db(a.ideal_bound_ft);
            char buf[128];
            std::snprintf(buf, sizeof(buf), "ideal_bound = %.4f (%.4f dB)\n", std::pow(10.0, db / 10.0), db);
            text += buf;
        }
    } catch (const NoSqueezingInRange& e) {
        throw UsageError(e.what());
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::cout << text;
    return ok;
}

struct AnalyzeArgs
{
    std::string data;
    std::string curves = "gaussian-paper,gaussian-marecki,lorentzian2-paper,lorentzian2-marecki";
    bool fit = false;
    bool no_ideal = false;
    std::string samples = "0.05:1:0.05";
    std::string report;
};

int run_analyze(const AnalyzeArgs& a, const Settings& s)
{
    const auto curves = parse_curve_list(a.curves);
    ClassifyOptions opt;
    opt.include_ideal = !a.no_ideal;
    opt.fit = a.fit;
    opt.quadrature = s.quad;
    if (!a.samples.empty() && a.samples != "none") opt.sample_grid = parse_grid(a.samples);
    const auto records = load_dataset(a.data);
    const AnalysisReport report = classify(records, curves, opt);

    if (records.empty()) std::cerr << "warning: dataset '" << a.data << "' has no records\n";
    for (const auto& sk : report.skipped) std::cerr << "warning: skipped " << sk.id << ": " << sk.reason << "\n";

    std::printf("records: %zu classified, %zu skipped\n", report.per_record.size(), report.skipped.size());
    if (report.method_agreement_rms) std::printf("F_T method agreement (rms): %.4f\n", *report.method_agreement_rms);
    for (const auto& c : curves) {
        std::printf("%-32s violations: %zu", c.id().c_str(), report.violation_count(c.id()));
        const auto it = report.fitted_scales.find(c.id());
        if (it != report.fitted_scales.end()) std::printf("  fitted k: %.6g", it->second.envelope_k);
        std::printf("\n");
    }
    if (opt.include_ideal) {
        std::size_t n = 0;
        for (const auto& r : report.per_record) n += r.ideal_opa_exceeded() ? 1 : 0;
        std::printf("%-32s exceeded: %zu\n", "ideal-opa", n);
    }
    if (!a.report.empty()) write_output(a.report, report_to_json(report));
    return ok;
}

struct PlotArgs
{
    int fig = 0;
    std::string report;
    std::string curves;
    std::string out;
    unsigned threads = 0;
};

int run_plot(const PlotArgs& a, const Settings& s)
{
    FigureOptions opt;
    opt.db_floor = s.db_floor;
    opt.quadrature = s.quad;
    opt.threads = a.threads ? a.threads : default_threads();
    if (!a.report.empty()) opt.report = load_report(a.report);

    PlotSpec spec;
    if (a.fig != 0) {
        if (!a.curves.empty()) throw UsageError("--fig and --curves are exclusive");
        try {
            spec = figure_preset(a.fig, opt);
        } catch (const UnknownFigure& e) {
            throw UsageError(e.what());
        }
    } else {
        if (a.curves.empty() && !opt.report) throw UsageError("give --fig, --curves or --report");
        spec.title = "R versus F_T";
        spec.x_label = "F_T";
        spec.y_label = "R (dB)";
        spec.db_floor = s.db_floor;
        const auto grid = figure_ft_grid();
        for (const auto& c : parse_curve_list(a.curves)) {
            PlotCurve pc{c.id(), c.id(), {}, {}, StrokeStyle::Solid, 1.5};
            if (c.variant == CurveVariant::MareckiNoPi) pc.style = StrokeStyle::Dashed;
            for (const auto& p : sample_curve(c, grid, s.quad, opt.threads)) {
                pc.xs.push_back(p.ft);
                pc.ys.push_back(p.r_db);
            }
            spec.curves.push_back(std::move(pc));
        }
        if (opt.report) {
            for (const auto& r : opt.report->per_record) {
                spec.points.push_back({r.id, r.ft_used, r.r_db_used, r.ft_err, r.s_err_db});
            }
        }
    }
    if (a.out.empty()) throw UsageError("--out is required");
    write_output(a.out, render_svg(spec));
    return ok;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Squeezed-light quantum-inequality bounds, OPA model and data classification"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "key=value file: quad.rel_tol, quad.max_nodes, plot.db_floor");

    BoundArgs bound;
    auto* b = app.add_subcommand("bound", "sample a bound curve R(F_T) or evaluate R at one omega0*t0");
    b->add_option("--window", bound.window, "gaussian | lorentzian2 | square | trapezoid")->required();
    b->add_option("--n", bound.n, "trapezoid slope ratio n");
    b->add_option("--variant", bound.variant, "paper | marecki");
    b->add_option("--scale", bound.scale, "argument scale factor k");
    b->add_option("--ft", bound.ft, "F_T grid lo:hi:step");
    b->add_option("--omega-t0", bound.omega_t0, "single phase argument omega0 * width");
    b->add_flag("--numeric", bound.numeric, "evaluate by quadrature instead of closed forms");
    b->add_option("--route", bound.route, "complement | direct (with --omega-t0)");
    b->add_flag("--allow-unstable", bound.allow_unstable, "permit the square window");
    b->add_option("--threads", bound.threads, "worker threads for grid evaluation");
    b->add_option("--out", bound.out, "output CSV (default stdout)");

    OpaArgs opa;
    auto* o = app.add_subcommand("opa", "evaluate the OPA squeezing model");
    o->add_option("--x", opa.x, "pump power / threshold");
    o->add_option("--beta", opa.beta, "optical efficiency");
    o->add_option("--w", opa.w, "sideband frequency / cavity half-width");
    o->add_option("--theta", opa.theta, "local-oscillator phase (rad)");
    o->add_flag("--extremes", opa.extremes, "print S-, S+ and their product");
    o->add_flag("--ft", opa.ft, "print the squeezed fraction F_T");
    o->add_option("--effective-ft", opa.effective_w_max, "print the weighted F_T over w in [0, W]");
    o->add_option("--ideal-bound", opa.ideal_bound_ft, "ideal-OPA bound at this F_T");

    AnalyzeArgs an;
    auto* z = app.add_subcommand("analyze", "classify a squeezing dataset against bound curves");
    z->add_option("--data", an.data, "dataset CSV")->required();
    z->add_option("--curves", an.curves, "comma-separated curve ids");
    z->add_flag("--fit", an.fit, "fit the envelope scale factor per curve");
    z->add_flag("--no-ideal", an.no_ideal, "skip the ideal-OPA comparison");
    z->add_option("--samples", an.samples, "F_T grid lo:hi:step for embedded curve CSVs, or none");
    z->add_option("--report", an.report, "JSON report path");

    PlotArgs pl;
    auto* p = app.add_subcommand("plot", "render an SVG figure");
    p->add_option("--fig", pl.fig, "preset 4..8");
    p->add_option("--report", pl.report, "analysis report JSON supplying data points and fits");
    p->add_option("--curves", pl.curves, "comma-separated curve ids (without --fig)");
    p->add_option("--threads", pl.threads, "worker threads for curve sampling");
    p->add_option("--out", pl.out, "output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }

    try {
        const Settings settings = load_config(config_path);
        if (b->parsed()) return run_bound(bound, settings);
        if (o->parsed()) return run_opa(opa);
        if (z->parsed()) return run_analyze(an, settings);
        if (p->parsed()) return run_plot(pl, settings);
    } catch (const QuadratureError& e) {
        std::cerr << "error: numeric: " << e.what() << "\n";
        return numeric;
    } catch (const DatasetError& e) {
        std::cerr << "error: data: " << e.what() << "\n";
        return data;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return numeric;
    }
    return usage;
}
