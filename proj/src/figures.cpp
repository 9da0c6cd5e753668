#include "qisq/figures.hpp"

#include <cstdio>
#include <string>

#include "qisq/opa_model.hpp"

namespace qisq {

namespace {

PlotSpec ft_axes(const std::string& title, const FigureOptions& o)
{
    PlotSpec s;
    s.title = title;
    s.x_label = "F_T";
    s.y_label = "R (dB)";
    s.x_min = 0.0;
    s.x_max = 1.0;
    s.x_tick = 0.1;
    s.y_max = 0.0;
    s.db_floor = o.db_floor;
    s.y_tick = 5.0;
    return s;
}

PlotCurve qi_curve(const QiCurve& c, const std::string& label, StrokeStyle style, double stroke,
                   const FigureOptions& o)
{
    PlotCurve out{c.id(), label, {}, {}, style, stroke};
    for (const auto& p : sample_curve(c, figure_ft_grid(), o.quadrature, o.threads)) {
        out.xs.push_back(p.ft);
        out.ys.push_back(p.r_db);
    }
    return out;
}

PlotCurve ideal_curve(StrokeStyle style, double stroke)
{
    PlotCurve out{"ideal-opa", "ideal OPA", {}, {}, style, stroke};
    for (double ft : figure_ft_grid()) {
        out.xs.push_back(ft);
        out.ys.push_back(ideal_opa_bound_db(ft));
    }
    return out;
}

void add_points(PlotSpec& s, const FigureOptions& o)
{
    if (!o.report) return;
    for (const auto& r : o.report->per_record) {
        s.points.push_back({r.id, r.ft_used, r.r_db_used, r.ft_err, r.s_err_db});
    }
}

double fitted_or(const FigureOptions& o, const std::string& id, double fallback)
{
    if (!o.report) return fallback;
    const auto it = o.report->fitted_scales.find(id);
    return it == o.report->fitted_scales.end() ? fallback : it->second.envelope_k;
}

QiCurve closed(WindowKind w, CurveVariant v, double k = 1.0)
{
    QiCurve c;
    c.window = w;
    c.variant = v;
    c.scale = k;
    return c;
}

std::string k_label(const char* name, double k)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s, k = %.4g", name, k);
    return buf;
}

}  // namespace

std::vector<double> figure_ft_grid()
{
    std::vector<double> g;
    for (int i = 1; i <= 200; ++i) g.push_back(i * 0.005);
    return g;
}

PlotSpec figure_preset(int fig, const FigureOptions& o)
{
    switch (fig) {
        case 4: {
            PlotSpec s;
            s.title = "Lossless OPA squeezing at zero sideband frequency";
            s.x_label = "x = P / P_th";
            s.y_label = "S- (dB)";
            s.db_floor = o.db_floor;
            s.y_tick = 5.0;
            PlotCurve c{"opa-s-minus", "S-(x, 0), beta = 1", {}, {}, StrokeStyle::Solid, 1.5};
            for (int i = 1; i < 200; ++i) {
                const double x = i * 0.005;
                c.xs.push_back(x);
                c.ys.push_back(to_db(s_minus(x, 1.0, 0.0)));
            }
            s.curves.push_back(std::move(c));
            return s;
        }
        case 5: {
            PlotSpec s = ft_axes("Gaussian sampling window", o);
            s.curves.push_back(qi_curve(closed(WindowKind::Gaussian, CurveVariant::PaperWithPi), "with pi",
                                        StrokeStyle::Dotted, 1.5, o));
            s.curves.push_back(qi_curve(closed(WindowKind::Gaussian, CurveVariant::MareckiNoPi),
                                        "without pi", StrokeStyle::Dotted, 1.0, o));
            s.curves.push_back(ideal_curve(StrokeStyle::Solid, 1.5));
            add_points(s, o);
            return s;
        }
        case 6: {
            PlotSpec s = ft_axes("Lorentzian-squared sampling window", o);
            s.curves.push_back(qi_curve(closed(WindowKind::LorentzianSquared, CurveVariant::PaperWithPi),
                                        "with pi", StrokeStyle::Solid, 1.5, o));
            s.curves.push_back(qi_curve(closed(WindowKind::LorentzianSquared, CurveVariant::MareckiNoPi),
                                        "without pi", StrokeStyle::Dashed, 1.0, o));
            s.curves.push_back(ideal_curve(StrokeStyle::Dashed, 3.0));
            add_points(s, o);
            return s;
        }
        case 7: {
            PlotSpec s = ft_axes("Best-fit argument scaling", o);
            const double kl = fitted_or(o, "lorentzian2-paper", default_lorentzian_fit_scale);
            const double kg = fitted_or(o, "gaussian-paper", default_gaussian_fit_scale);
            s.curves.push_back(qi_curve(closed(WindowKind::LorentzianSquared, CurveVariant::PaperWithPi, kl),
                                        k_label("Lorentzian squared", kl), StrokeStyle::Solid, 1.5, o));
            s.curves.push_back(qi_curve(closed(WindowKind::Gaussian, CurveVariant::PaperWithPi, kg),
                                        k_label("Gaussian", kg), StrokeStyle::Dashed, 1.5, o));
            s.curves.push_back(ideal_curve(StrokeStyle::Dotted, 1.0));
            add_points(s, o);
            return s;
        }
        case 8: {
            PlotSpec s = ft_axes("Trapezoidal sampling window", o);
            for (double n : {0.001, 0.2, 0.5, 1.0, 3.0, 5.0}) {
                for (auto v : {CurveVariant::PaperWithPi, CurveVariant::MareckiNoPi}) {
                    QiCurve c;
                    c.window = WindowKind::Trapezoid;
                    c.slope_ratio = n;
                    c.variant = v;
                    c.evaluation = CurveEvaluation::Numeric;
                    char label[48];
                    std::snprintf(label, sizeof(label), "n = %g%s", n,
                                  v == CurveVariant::PaperWithPi ? "" : ", without pi");
                    s.curves.push_back(qi_curve(c, label,
                                                v == CurveVariant::PaperWithPi ? StrokeStyle::Dashed
                                                                               : StrokeStyle::Solid,
                                                1.0, o));
                }
            }
            s.curves.push_back(ideal_curve(StrokeStyle::Solid, 2.5));
            add_points(s, o);
            return s;
        }
        default:
            throw UnknownFigure("no preset for figure " + std::to_string(fig) + " (expected 4..8)");
    }
}

}  // namespace qisq
