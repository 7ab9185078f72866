#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "screening/errors.hpp"
#include "screening/experiments.hpp"
#include "screening/svg_plot.hpp"

using namespace screening;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("screen_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string key_of(const std::string& text) {
    try {
        const Config c = Config::parse(text);
        c.require_known(known_config_keys());
        (void)attitude_problem_from(c);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return {};
}

}  // namespace

TEST_CASE("config grammar") {
    const Config c = Config::parse("# comment\nmode = attitude  # trailing\n\nclaim.mean=2.5\naudit.types = 7\n"
                                   "output.emit_svg = false\n");
    CHECK(c.get_string("mode") == "attitude");
    CHECK(c.get_double("claim.mean") == 2.5);
    CHECK(c.get_int("audit.types", 0) == 7);
    CHECK_FALSE(c.get_bool("output.emit_svg", true));
    CHECK(c.get_double("market.lambda", 1.0) == 1.0);
    CHECK(c.keys().size() == 4);
}

TEST_CASE("config errors name the offending key") {
    CHECK(key_of("mode = attitude\nclaim.family\n") == "claim.family");
    CHECK(key_of("mode = attitude\nclaim.mean =\n") == "claim.mean");
    CHECK(key_of("prior.low = 1\nprior.low = 2\n") == "prior.low");
    CHECK(key_of("claim.family = exponential_fixed\nclaim.mean = one\nprior.family = point_mass\nprior.atom = 5\n") ==
          "claim.mean");
    CHECK(key_of("claim.family = exponential_fixed\nclaim.mean = 1\nprior.family = point_mass\nprior.atom = 5\n"
                 "prior.colour = red\n") == "prior.colour");
    CHECK(key_of("claim.family = exponential_fixed\nclaim.mean = 1\nprior.family = point_mass\n") == "prior.atom");
    CHECK(key_of("claim.family = gamma_dist\nprior.family = point_mass\nprior.atom = 5\n") == "claim.family");
}

TEST_CASE("csv round trip") {
    CsvTable t;
    t.comments = {"a comment", "lambda=1 T=1"};
    t.header = {"x", "y"};
    t.add_row({0.1, 1.0 / 3.0});
    t.add_row({1e-300, -2.5e17});
    const CsvTable back = parse_csv(t.to_string());
    CHECK(back.comments == t.comments);
    CHECK(back.header == t.header);
    CHECK(back.column("y")[0] == 1.0 / 3.0);
    CHECK(back.column("x")[1] == 1e-300);
    CHECK(back.to_string() == t.to_string());
    CHECK(format_double(INFINITY) == "inf");
    CHECK(std::isinf(parse_double("inf")));
    CHECK_THROWS_AS((void)parse_double("1.0x"), ParameterError);
}

TEST_CASE("svg rendering") {
    PlotSpec spec;
    spec.title = "t & <u>";
    spec.x_label = "theta";
    spec.y_label = "loading";
    spec.series.push_back({"curve", {1.0, 2.0, 3.0}, {3.0, 2.0, 1.0}});
    spec.series.push_back({"point", {2.0}, {2.5}});
    const std::string svg = render_svg(spec);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("t &amp; &lt;u&gt;") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("<circle") != std::string::npos);
    CHECK(render_svg(spec) == svg);
}

TEST_CASE("figure 1 round trip and determinism") {
    const fs::path dir = scratch("fig1");
    const RunResult r = reproduce_figure(1, dir);
    CHECK(fs::exists(dir / "fig1_summary.csv"));
    CHECK(fs::exists(dir / "fig1_loading.svg"));
    for (const auto& [name, svg] : figure_svgs_from_csv(1, dir)) CHECK(slurp(dir / name) == svg);
    const std::string before = slurp(dir / "fig1_u1_9.csv");
    (void)reproduce_figure(1, dir);
    CHECK(slurp(dir / "fig1_u1_9.csv") == before);
    const CsvTable t = read_csv(dir / "fig1_u1_9.csv");
    const auto loading = t.column("loading");
    for (double v : loading) CHECK(v == loading.front());
    CHECK(t.comments.back().find("lambda=1 T=1 gamma_I=1 x_C=0 x_I=0") != std::string::npos);
    const auto& s = r.summary["series"];
    CHECK(s["u1_9"]["loading"].get<double>() > s["u2_8"]["loading"].get<double>());
    CHECK(s["u2_8"]["loading"].get<double>() > s["fixed5"]["loading"].get<double>());
}

TEST_CASE("figure 3 curves decrease and the narrow support loads more") {
    const fs::path dir = scratch("fig3");
    (void)reproduce_figure(3, dir, SolverConfig{}, false);
    CHECK_FALSE(fs::exists(dir / "fig3_loading.svg"));
    const CsvTable wide = read_csv(dir / "fig3_u1_9.csv");
    const CsvTable narrow = read_csv(dir / "fig3_u2_8.csv");
    for (const auto* t : {&wide, &narrow}) {
        const auto xi = t->column("loading");
        for (std::size_t i = 1; i < xi.size(); ++i) CHECK(xi[i] < xi[i - 1]);
    }
    const auto wt = wide.column("theta");
    const auto wx = wide.column("loading");
    const auto nt = narrow.column("theta");
    const auto nx = narrow.column("loading");
    for (std::size_t i = 0; i < nt.size(); i += 25) {
        const auto it = std::lower_bound(wt.begin(), wt.end(), nt[i]);
        const std::size_t j = static_cast<std::size_t>(it - wt.begin());
        CHECK(nx[i] > wx[std::min(j, wx.size() - 1)]);
    }
}

TEST_CASE("run_solve writes menu, curve and report") {
    const fs::path dir = scratch("solve");
    Config c = Config::parse("mode = type\nclaim.family = exponential_mean\nprior.family = uniform\nprior.low = 2\n"
                             "prior.high = 8\ngamma.coefficient = 5\nsolver.grid_points = 101\naudit.types = 20\n");
    const RunResult r = run_config(c, dir);
    CHECK(fs::exists(dir / "menu.csv"));
    CHECK(fs::exists(dir / "curve.csv"));
    CHECK(fs::exists(dir / "report.csv"));
    CHECK(r.summary["truth_telling_passed"].get<bool>());
    const CsvTable menu = read_csv(dir / "menu.csv");
    CHECK(menu.header == std::vector<std::string>{"theta", "loading", "deductible", "premium_rate", "gamma_of_theta"});
    CHECK(menu.rows.size() == 101);
}

TEST_CASE("run_check reports the no-contract case") {
    const Config c = Config::parse("mode = type\nclaim.family = exponential_mean\nprior.family = uniform\n"
                                   "prior.low = 0.01\nprior.high = 9\ngamma.coefficient = 5\n");
    CHECK_THROWS_AS((void)run_check(c), InfeasibleError);
    try {
        (void)run_check(c);
    } catch (const InfeasibleError& e) {
        CHECK(std::string(e.what()).find("no admissible C exists") != std::string::npos);
    }
}

TEST_CASE("run_simulate") {
    const fs::path dir = scratch("sim");
    const Config c = Config::parse("mode = simulate\nclaim.family = uniform_on_zero_theta\nclaim.theta = 2\n"
                                   "simulate.gamma = 2\nsimulate.n_paths = 20000\ncontract.loading = 1\n");
    const RunResult r = run_config(c, dir);
    CHECK(r.summary["deductible"].get<double>() == doctest::Approx(0.5));
    CHECK(r.summary["passed"].get<bool>());
    CHECK(fs::exists(dir / "report.csv"));
}

TEST_CASE("unknown figure and mode") {
    CHECK_THROWS_AS((void)figure_spec(6), UsageError);
    CHECK_THROWS_AS((void)run_config(Config::parse("mode = dance\n"), scratch("mode")), ConfigError);
    CHECK_THROWS_AS((void)run_config(Config::parse("mode = reproduce_figure\nfigure = 9\n"), scratch("fig9")),
                    ConfigError);
}
