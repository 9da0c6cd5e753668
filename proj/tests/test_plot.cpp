#include "doctest.h"

#include <cmath>
#include <limits>
#include <string>

#include "qisq/figures.hpp"
#include "qisq/plot.hpp"

using namespace qisq;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::size_t count(const std::string& hay, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
    return n;
}

PlotSpec small_spec()
{
    PlotSpec s;
    s.title = "t & <u>";
    s.x_label = "F_T";
    s.y_label = "R (dB)";
    s.curves.push_back({"c1", "first", {0.1, 0.5, 0.9}, {-30.0, -10.0, -1.0}, StrokeStyle::Dashed, 1.5});
    s.points.push_back({"p", 0.3, -12.0, 0.02, 0.5});
    return s;
}

}  // namespace

TEST_CASE("clipping at the floor")
{
    SUBCASE("entirely above")
    {
        const auto runs = clip_to_floor({0, 1, 2}, {-1, -2, -3}, -25);
        REQUIRE(runs.size() == 1);
        CHECK(runs[0].xs.size() == 3);
        CHECK_FALSE(runs[0].open_start);
        CHECK_FALSE(runs[0].open_end);
    }
    SUBCASE("rising out of the floor")
    {
        const auto runs = clip_to_floor({0, 1, 2}, {-35, -15, -5}, -25);
        REQUIRE(runs.size() == 1);
        CHECK(runs[0].open_start);
        CHECK(runs[0].xs.front() == doctest::Approx(0.5));
        CHECK(runs[0].ys.front() == -25);
        CHECK(runs[0].xs.size() == 3);
    }
    SUBCASE("infinite start pins the crossing to the first finite sample")
    {
        const auto runs = clip_to_floor({0, 1, 2}, {-inf, -10, -5}, -25);
        REQUIRE(runs.size() == 1);
        CHECK(runs[0].xs.front() == 0.0);
        CHECK(runs[0].open_start);
    }
    SUBCASE("dip below splits the curve")
    {
        const auto runs = clip_to_floor({0, 1, 2, 3, 4}, {-5, -20, -30, -20, -5}, -25);
        REQUIRE(runs.size() == 2);
        CHECK(runs[0].open_end);
        CHECK(runs[0].xs.back() == doctest::Approx(1.5));
        CHECK(runs[1].open_start);
        CHECK(runs[1].xs.front() == doctest::Approx(2.5));
    }
    SUBCASE("entirely below")
    {
        CHECK(clip_to_floor({0, 1}, {-40, -inf}, -25).empty());
    }
}

TEST_CASE("spec validation")
{
    PlotSpec s = small_spec();
    CHECK_NOTHROW(s.validate());
    s.db_floor = 1.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = small_spec();
    s.x_max = s.x_min;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = small_spec();
    s.curves.push_back(s.curves[0]);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = small_spec();
    s.curves[0].ys.pop_back();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = small_spec();
    s.curves[0].ys[0] = std::nan("");
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = small_spec();
    s.points[0].x_err = -1.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = small_spec();
    s.y_tick = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("svg output")
{
    const auto s = small_spec();
    const std::string svg = render_svg(s);
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("</svg>\n") == svg.size() - 7);
    CHECK(svg.find("t &amp; &lt;u&gt;") != std::string::npos);
    CHECK(svg.find("stroke-dasharray=\"8 4\"") != std::string::npos);
    CHECK(count(svg, "<polyline") == 1);
    // one open marker where the curve leaves the floor
    CHECK(count(svg, "fill=\"white\" stroke-dasharray=\"none\"") == 1);
    CHECK(count(svg, "<rect x=") >= 2);
    CHECK(svg.find(">-25<") != std::string::npos);
    CHECK(svg == render_svg(s));
}

TEST_CASE("figure presets")
{
    FigureOptions opt;
    SUBCASE("4")
    {
        const auto s = figure_preset(4, opt);
        REQUIRE(s.curves.size() == 1);
        CHECK(s.x_label.find('x') != std::string::npos);
        CHECK(s.curves[0].xs.front() > 0.0);
        CHECK(s.curves[0].xs.back() < 1.0);
    }
    SUBCASE("5 keeps the curve order")
    {
        const auto s = figure_preset(5, opt);
        REQUIRE(s.curves.size() == 3);
        CHECK(s.curves[0].id == "gaussian-paper");
        CHECK(s.curves[1].id == "gaussian-marecki");
        CHECK(s.curves[2].id == "ideal-opa");
        for (std::size_t i = 0; i < s.curves[0].xs.size(); ++i) {
            const double ft = s.curves[0].xs[i];
            CHECK(s.curves[0].ys[i] >= s.curves[1].ys[i]);
            if (ft >= 0.1 && ft <= 0.45) CHECK(s.curves[1].ys[i] > s.curves[2].ys[i]);
        }
        CHECK(s.curves[0].style == StrokeStyle::Dotted);
        CHECK(s.curves[2].style == StrokeStyle::Solid);
    }
    SUBCASE("7 uses the report fit when present")
    {
        AnalysisReport r;
        r.fitted_scales["gaussian-paper"] = {0.1, std::nullopt};
        opt.report = r;
        const auto s = figure_preset(7, opt);
        CHECK(s.curves[0].id == QiCurve::parse("lorentzian2-paper").with_scale(default_lorentzian_fit_scale).id());
        CHECK(s.curves[1].id == "gaussian-paper-k0.1");
    }
    SUBCASE("8")
    {
        opt.threads = 4;
        const auto s = figure_preset(8, opt);
        CHECK(s.curves.size() == 13);
        CHECK(s.curves[0].id == "trapezoid-n0.001-paper");
        CHECK(s.curves[0].style == StrokeStyle::Dashed);
        CHECK(s.curves[1].style == StrokeStyle::Solid);
    }
    CHECK_THROWS_AS(figure_preset(3, opt), UnknownFigure);
    CHECK_THROWS_AS(figure_preset(9, opt), UnknownFigure);
    CHECK(figure_ft_grid().size() == 200);
}

TEST_CASE("figure 5 renders identically twice")
{
    CHECK(render_svg(figure_preset(5)) == render_svg(figure_preset(5)));
}
