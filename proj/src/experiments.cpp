#include "screening/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "screening/errors.hpp"
#include "screening/svg_plot.hpp"

namespace screening {

namespace fs = std::filesystem;

namespace {

std::string market_comment(const MarketParams& m) {
    std::ostringstream os;
    os << "lambda=" << format_double(m.lambda) << " T=" << format_double(m.horizon)
       << " gamma_I=" << format_double(m.gamma_insurer) << " x_C=" << format_double(m.x_customer)
       << " x_I=" << format_double(m.x_insurer);
    return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path.string() + "'");
    out << text;
}

CsvTable report_table(const nlohmann::json& summary) {
    CsvTable t;
    t.header = {"metric", "value"};
    for (const auto& [k, v] : summary.items()) {
        if (v.is_structured()) continue;
        std::string s;
        if (v.is_string()) {
            s = v.get<std::string>();
        } else if (v.is_boolean()) {
            s = v.get<bool>() ? "1" : "0";
        } else {
            s = format_double(v.get<double>());
        }
        std::replace(s.begin(), s.end(), ',', ';');
        t.rows.push_back({k, s});
    }
    return t;
}

std::string mode_of(const Config& cfg) { return cfg.get_string("mode", "type"); }

struct SeriesOutcome {
    ContractMenu menu;
    nlohmann::json summary;
    LoadingCurve curve;
};

SeriesOutcome solve_attitude_series(const AttitudeProblem& p, const SolverConfig& cfg) {
    const AttitudeSolution sol = solve_loading_attitude(p, cfg);
    SeriesOutcome out;
    out.menu = build_menu_attitude(p, sol.loading, cfg.grid_points);
    out.summary = {{"loading", sol.loading},
                   {"objective", sol.objective},
                   {"insurer_value", sol.insurer_value},
                   {"degenerate_market", sol.degenerate_market},
                   {"boundary_optimum", false}};
    return out;
}

SeriesOutcome solve_type_series(const TypeProblem& p, const SolverConfig& cfg, CurveMethod method) {
    const TypeSolution sol = solve_optimal_constant(p, cfg, method);
    SeriesOutcome out;
    out.menu = build_menu_type(p, sol.curve);
    out.curve = sol.curve;
    out.summary = {{"c_scale", sol.c_star.scale == ConstantScale::Anchor ? "anchor" : "closed_form"},
                   {"c_star", sol.c_star.value},
                   {"anchor", sol.curve.anchor},
                   {"interval_lo", sol.interval.lo},
                   {"interval_search_hi", sol.interval.search_hi},
                   {"objective", sol.objective},
                   {"insurer_value", sol.insurer_value},
                   {"boundary_optimum", sol.boundary_optimum},
                   {"method", std::string(to_string(sol.curve.method))},
                   {"ode_residual", ode_residual(p, sol.curve)},
                   {"loading_low", sol.curve.xi.front()},
                   {"loading_high", sol.curve.xi.back()}};
    if (!p.warnings.empty()) out.summary["warnings"] = p.warnings;
    return out;
}

}  // namespace

const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys = {
        "mode", "figure", "claim.family", "claim.theta", "claim.mean", "claim.shape", "claim.scale",
        "prior.family", "prior.low", "prior.high", "prior.loc", "prior.scale", "prior.atom", "gamma.form",
        "gamma.coefficient", "market.lambda", "market.horizon", "market.gamma_insurer", "market.x_customer",
        "market.x_insurer", "solver.quad_tol", "solver.ode_step_init", "solver.ode_tol", "solver.opt_tol",
        "solver.fp_damping", "solver.fp_max_iter", "solver.grid_points", "solver.max_loading",
        "solver.coverage_margin", "solver.insurer_value_factor", "solver.method", "output.directory",
        "output.emit_svg", "output.grid_points", "audit.types", "simulate.n_paths", "simulate.seed",
        "simulate.gamma", "contract.deductible", "contract.loading", "check.xi0",
    };
    return keys;
}

SolverConfig solver_config_from(const Config& cfg) {
    SolverConfig s;
    s.quad_tol = cfg.get_double("solver.quad_tol", s.quad_tol);
    s.ode_step_init = cfg.get_double("solver.ode_step_init", s.ode_step_init);
    s.ode_tol = cfg.get_double("solver.ode_tol", s.ode_tol);
    s.opt_tol = cfg.get_double("solver.opt_tol", s.opt_tol);
    s.fp_damping = cfg.get_double("solver.fp_damping", s.fp_damping);
    s.fp_max_iter = static_cast<int>(cfg.get_int("solver.fp_max_iter", s.fp_max_iter));
    s.grid_points = static_cast<int>(cfg.get_int("solver.grid_points", cfg.get_int("output.grid_points", s.grid_points)));
    s.max_loading = cfg.get_double("solver.max_loading", s.max_loading);
    s.coverage_margin = cfg.get_double("solver.coverage_margin", s.coverage_margin);
    s.insurer_value_factor = cfg.get_double("solver.insurer_value_factor", s.insurer_value_factor);
    try {
        s.validate();
    } catch (const ParameterError& e) {
        throw ConfigError("solver", e.what());
    }
    return s;
}

MarketParams market_from(const Config& cfg) {
    MarketParams m;
    m.lambda = cfg.get_double("market.lambda", m.lambda);
    m.horizon = cfg.get_double("market.horizon", m.horizon);
    m.gamma_insurer = cfg.get_double("market.gamma_insurer", m.gamma_insurer);
    m.x_customer = cfg.get_double("market.x_customer", m.x_customer);
    m.x_insurer = cfg.get_double("market.x_insurer", m.x_insurer);
    try {
        m.validate();
    } catch (const ParameterError& e) {
        throw ConfigError("market", e.what());
    }
    return m;
}

TypeDistribution prior_from(const Config& cfg) {
    const std::string fam = cfg.get_string("prior.family");
    PriorFamily f{};
    try {
        f = parse_prior_family(fam);
    } catch (const Error& e) {
        throw ConfigError("prior.family", e.what());
    }
    switch (f) {
        case PriorFamily::Uniform:
            return TypeDistribution::uniform(cfg.get_double("prior.low"), cfg.get_double("prior.high"));
        case PriorFamily::TruncatedNormal:
            return TypeDistribution::truncated_normal(cfg.get_double("prior.loc"), cfg.get_double("prior.scale"),
                                                      cfg.get_double("prior.low"), cfg.get_double("prior.high"));
        case PriorFamily::PointMass:
            return TypeDistribution::point_mass(cfg.get_double("prior.atom"));
    }
    throw ConfigError("prior.family", "unhandled prior family");
}

ClaimDistribution claim_from(const Config& cfg, double fallback_theta) {
    const std::string fam = cfg.get_string("claim.family");
    ClaimFamily f{};
    try {
        f = parse_claim_family(fam);
    } catch (const Error& e) {
        throw ConfigError("claim.family", e.what());
    }
    const double theta = cfg.get_double("claim.theta", fallback_theta);
    switch (f) {
        case ClaimFamily::ExponentialMean: return ClaimDistribution::exponential_mean(theta);
        case ClaimFamily::ParetoShapeInvTheta:
            return ClaimDistribution::pareto_shape_inv_theta(theta, cfg.get_double("claim.scale"));
        case ClaimFamily::UniformOnZeroTheta: return ClaimDistribution::uniform_on_zero_theta(theta);
        case ClaimFamily::ExponentialFixed: return ClaimDistribution::exponential_fixed(cfg.get_double("claim.mean"));
        case ClaimFamily::ParetoFixed:
            return ClaimDistribution::pareto_fixed(cfg.get_double("claim.shape"), cfg.get_double("claim.scale"));
    }
    throw ConfigError("claim.family", "unhandled claim family");
}

AttitudeProblem attitude_problem_from(const Config& cfg) {
    AttitudeProblem p{claim_from(cfg, 1.0), prior_from(cfg), market_from(cfg)};
    p.validate();
    return p;
}

TypeProblem type_problem_from(const Config& cfg) {
    const TypeDistribution prior = prior_from(cfg);
    RiskAversionSpec g;
    try {
        g.form = parse_risk_aversion_form(cfg.get_string("gamma.form", "constant"));
    } catch (const Error& e) {
        throw ConfigError("gamma.form", e.what());
    }
    g.coefficient = cfg.get_double("gamma.coefficient");
    const double proto = std::min(prior.low(), kParetoThetaCap);
    return make_type_problem(claim_from(cfg, proto), prior, g, market_from(cfg));
}

CsvTable menu_table(const ContractMenu& menu) {
    CsvTable t;
    const bool theta = menu.index == MenuIndex::Theta;
    t.header = {theta ? "theta" : "gamma", "loading", "deductible", "premium_rate"};
    if (theta) t.header.emplace_back("gamma_of_theta");
    for (std::size_t i = 0; i < menu.grid.size(); ++i) {
        const Contract& c = menu.contracts[i];
        std::vector<double> row = {menu.grid[i], c.loading, c.deductible, c.premium_rate};
        if (theta) row.push_back(menu.gamma_of_theta[i]);
        t.add_row(row);
    }
    return t;
}

RunResult run_solve(const Config& cfg, const fs::path& out_dir) {
    const std::string mode = mode_of(cfg);
    if (mode != "attitude" && mode != "type") throw ConfigError("mode", "solve needs mode attitude or type");
    const SolverConfig scfg = solver_config_from(cfg);
    const int audit_n = static_cast<int>(cfg.get_int("audit.types", 50));
    const bool emit_svg = cfg.get_bool("output.emit_svg", true);
    fs::create_directories(out_dir);

    RunResult res;
    SeriesOutcome out;
    std::vector<std::string> comments;
    TruthTellingReport audit;
    if (mode == "attitude") {
        const AttitudeProblem p = attitude_problem_from(cfg);
        out = solve_attitude_series(p, scfg);
        comments = {"claim: " + p.claim.describe(), "prior on gamma: " + p.prior_gamma.describe(),
                    market_comment(p.market)};
        if (audit_n >= 3) audit = verify_truth_telling_attitude(p, out.summary["loading"].get<double>(), audit_n);
    } else {
        const CurveMethod method = parse_curve_method(cfg.get_string("solver.method", "auto"));
        const TypeProblem p = type_problem_from(cfg);
        out = solve_type_series(p, scfg, method);
        comments = {"claim: " + p.claim.describe(), "prior on theta: " + p.prior_theta.describe(),
                    "gamma(theta): " + p.gamma.describe(), market_comment(p.market)};
        if (audit_n >= 3) audit = verify_truth_telling_type(p, out.curve, audit_n, scfg);
    }
    res.summary = out.summary;
    res.summary["mode"] = mode;
    if (audit_n >= 3) {
        res.summary["truth_telling_passed"] = audit.passed;
        res.summary["truth_telling_max_deviation"] = audit.max_deviation;
        res.summary["truth_telling_cell"] = audit.fine_cell;
    }

    CsvTable menu = menu_table(out.menu);
    menu.comments = comments;
    CsvTable curve;
    curve.comments = comments;
    curve.header = {menu.header[0], "loading"};
    for (const auto& row : menu.rows) curve.rows.push_back({row[0], row[1]});
    CsvTable report = report_table(res.summary);
    report.comments = comments;

    for (const auto& [name, table] : {std::pair{"menu.csv", &menu}, {"curve.csv", &curve}, {"report.csv", &report}}) {
        write_csv(out_dir / name, *table);
        res.artifacts.push_back(out_dir / name);
    }
    if (emit_svg) {
        const std::string idx = menu.header[0];
        for (const std::string col : {"loading", "deductible"}) {
            PlotSpec spec;
            spec.title = col + " by " + idx;
            spec.x_label = idx;
            spec.y_label = col;
            spec.series.push_back({mode, menu.column(idx), menu.column(col)});
            const fs::path path = out_dir / (col + ".svg");
            write_text(path, render_svg(spec));
            res.artifacts.push_back(path);
        }
    }
    return res;
}

RunResult run_simulate(const Config& cfg, const fs::path& out_dir) {
    const MarketParams m = market_from(cfg);
    const ClaimDistribution claim = claim_from(cfg, 1.0);
    SimConfig sc;
    sc.n_paths = static_cast<std::size_t>(cfg.get_int("simulate.n_paths", static_cast<long long>(sc.n_paths)));
    sc.seed = static_cast<std::uint64_t>(cfg.get_int("simulate.seed", static_cast<long long>(sc.seed)));
    sc.horizon = m.horizon;
    sc.lambda = m.lambda;
    const double gamma = cfg.get_double("simulate.gamma");
    if (!(gamma > 0.0)) throw ConfigError("simulate.gamma", "must be > 0");

    Contract c;
    c.loading = cfg.get_double("contract.loading");
    c.deductible = cfg.get_double("contract.deductible", c.loading / gamma);
    if (!(c.loading >= 0.0)) throw ConfigError("contract.loading", "must be >= 0");
    if (!(c.deductible >= 0.0)) throw ConfigError("contract.deductible", "must be >= 0");
    c.premium_rate = (1.0 + c.loading) * m.lambda * claim.stop_loss(c.deductible);

    const ValidationReport v =
        validate_analytic(c, claim, gamma, m.gamma_insurer, sc, m.x_customer, m.x_insurer);
    RunResult res;
    res.summary = {{"mode", "simulate"},
                   {"deductible", c.deductible},
                   {"loading", c.loading},
                   {"premium_rate", c.premium_rate},
                   {"n_paths", static_cast<double>(sc.n_paths)},
                   {"analytic_customer", v.analytic.customer},
                   {"analytic_insurer", v.analytic.insurer},
                   {"simulated_customer", v.simulated_customer},
                   {"simulated_insurer", v.simulated_insurer},
                   {"se_customer", v.se_customer},
                   {"se_insurer", v.se_insurer},
                   {"z_customer", v.z_customer},
                   {"z_insurer", v.z_insurer},
                   {"max_conservation_error", v.max_conservation_error},
                   {"passed", v.passed}};
    fs::create_directories(out_dir);
    CsvTable report = report_table(res.summary);
    report.comments = {"claim: " + claim.describe(), market_comment(m)};
    write_csv(out_dir / "report.csv", report);
    res.artifacts.push_back(out_dir / "report.csv");
    return res;
}

RunResult run_check(const Config& cfg) {
    const std::string mode = mode_of(cfg);
    const SolverConfig scfg = solver_config_from(cfg);
    RunResult res;
    res.summary["mode"] = mode;
    if (mode == "attitude") {
        const AttitudeProblem p = attitude_problem_from(cfg);
        res.summary["claim"] = p.claim.describe();
        res.summary["prior"] = p.prior_gamma.describe();
        res.summary["claim_second_moment"] = p.claim.second_moment();
        return res;
    }
    if (mode != "type") throw ConfigError("mode", "check needs mode attitude or type");
    const TypeProblem p = type_problem_from(cfg);
    const FeasibleInterval iv = feasible_C_interval(p, scfg);
    const double xi0 = cfg.get_double("check.xi0", 1.0);
    const AssumptionBounds b = check_assumptions(p, xi0, scfg);
    res.summary["claim"] = p.claim.describe();
    res.summary["prior"] = p.prior_theta.describe();
    res.summary["gamma"] = p.gamma.describe();
    res.summary["c_scale"] = iv.scale == ConstantScale::Anchor ? "anchor" : "closed_form";
    res.summary["interval_lo"] = iv.lo;
    res.summary["interval_hi"] = std::isfinite(iv.hi) ? nlohmann::json(iv.hi) : nlohmann::json("inf");
    res.summary["interval_search_hi"] = iv.search_hi;
    res.summary["xi0"] = xi0;
    res.summary["K"] = b.K;
    res.summary["M"] = b.M;
    res.summary["contraction_ok"] = b.contraction_ok;
    res.summary["positivity_ok"] = b.positivity_ok;
    if (!p.warnings.empty()) res.summary["warnings"] = p.warnings;
    return res;
}

RunResult run_config(const Config& cfg, const fs::path& out_dir) {
    cfg.require_known(known_config_keys());
    const std::string mode = mode_of(cfg);
    if (mode == "attitude" || mode == "type") return run_solve(cfg, out_dir);
    if (mode == "simulate") return run_simulate(cfg, out_dir);
    if (mode == "reproduce_figure") {
        const long long id = cfg.get_int("figure", 0);
        if (id < 1 || id > 5) throw ConfigError("figure", "figure id must be in 1..5");
        return reproduce_figure(static_cast<int>(id), out_dir, solver_config_from(cfg),
                                cfg.get_bool("output.emit_svg", true));
    }
    throw ConfigError("mode", "unknown mode '" + mode + "'");
}

FigureSpec figure_spec(int id) {
    const MarketParams m;
    FigureSpec f;
    f.id = id;
    auto attitude = [&](std::string name, std::string label, ClaimDistribution claim, TypeDistribution prior) {
        f.series.push_back({std::move(name), std::move(label), AttitudeProblem{claim, prior, m}});
    };
    auto type = [&](std::string name, std::string label, ClaimDistribution claim, TypeDistribution prior,
                    RiskAversionSpec g) {
        f.series.push_back({std::move(name), std::move(label), make_type_problem(claim, prior, g, m)});
    };
    const RiskAversionSpec five{RiskAversionForm::Constant, 5.0};
    switch (id) {
        case 1: {
            f.title = "Risk loading under risk-attitude uncertainty: Exp(1) claims";
            f.index_label = "gamma";
            const auto claim = ClaimDistribution::exponential_fixed(1.0);
            attitude("u1_9", "gamma ~ U[1; 9]", claim, TypeDistribution::uniform(1.0, 9.0));
            attitude("u2_8", "gamma ~ U[2; 8]", claim, TypeDistribution::uniform(2.0, 8.0));
            attitude("fixed5", "gamma = 5", claim, TypeDistribution::point_mass(5.0));
            break;
        }
        case 2: {
            f.title = "Risk loading under risk-attitude uncertainty: Pareto(3; 3) claims";
            f.index_label = "gamma";
            const auto claim = ClaimDistribution::pareto_fixed(3.0, 3.0);
            attitude("tn2_1", "gamma ~ TruncN(2; 1) on [1; 9]", claim,
                     TypeDistribution::truncated_normal(2.0, 1.0, 1.0, 9.0));
            attitude("tn2_2", "gamma ~ TruncN(2; 2) on [1; 9]", claim,
                     TypeDistribution::truncated_normal(2.0, 2.0, 1.0, 9.0));
            attitude("fixed2", "gamma = 2", claim, TypeDistribution::point_mass(2.0));
            break;
        }
        case 3: {
            f.title = "Risk loading under risk-type uncertainty: Exp(mean theta) claims";
            f.index_label = "theta";
            f.loading_clip = 10.0;
            const auto claim = ClaimDistribution::exponential_mean(1.0);
            type("u1_9", "theta ~ U[1; 9]", claim, TypeDistribution::uniform(1.0, 9.0), five);
            type("u2_8", "theta ~ U[2; 8]", claim, TypeDistribution::uniform(2.0, 8.0), five);
            type("fixed5", "theta = 5", claim, TypeDistribution::point_mass(5.0), five);
            break;
        }
        case 4: {
            f.title = "Risk loading under risk-type uncertainty: Pareto(1/theta; 3) claims";
            f.index_label = "theta";
            const auto claim = ClaimDistribution::pareto_shape_inv_theta(0.15, 3.0);
            type("tn015_01", "theta ~ TruncN(0.15; 0.1)", claim,
                 TypeDistribution::truncated_normal(0.15, 0.1, 0.1, 0.5), five);
            type("tn015_02", "theta ~ TruncN(0.15; 0.2)", claim,
                 TypeDistribution::truncated_normal(0.15, 0.2, 0.1, 0.5), five);
            type("fixed015", "theta = 0.15", claim, TypeDistribution::point_mass(0.15), five);
            break;
        }
        case 5: {
            f.title = "Risk loading with type-dependent risk aversion";
            f.index_label = "theta";
            f.loading_clip = 40.0;
            const auto claim = ClaimDistribution::pareto_shape_inv_theta(0.15, 3.0);
            const auto prior = TypeDistribution::truncated_normal(0.15, 0.1, 0.1, 0.5);
            type("increasing", "gamma = 50 theta", claim, prior, {RiskAversionForm::LinearInTheta, 50.0});
            type("constant", "gamma = 5", claim, prior, five);
            type("decreasing", "gamma = 0.5/theta", claim, prior, {RiskAversionForm::InverseInTheta, 0.5});
            break;
        }
        default: throw UsageError("figure id must be in 1..5, got " + std::to_string(id));
    }
    return f;
}

std::vector<std::pair<std::string, std::string>> figure_svgs_from_csv(int id, const fs::path& dir) {
    const FigureSpec f = figure_spec(id);
    const std::string stem = "fig" + std::to_string(id);
    const CsvTable summary = read_csv(dir / (stem + "_summary.csv"));
    const std::size_t name_col = summary.column_index("series");
    const std::size_t label_col = summary.column_index("label");

    std::vector<std::pair<std::string, std::string>> out;
    for (const std::string col : {"loading", "deductible"}) {
        PlotSpec spec;
        spec.title = f.title;
        spec.x_label = f.index_label;
        spec.y_label = col;
        if (col == "loading") spec.y_max = f.loading_clip;
        for (const auto& row : summary.rows) {
            const CsvTable t = read_csv(dir / (stem + "_" + row.at(name_col) + ".csv"));
            spec.series.push_back({row.at(label_col), t.column(f.index_label), t.column(col)});
        }
        out.emplace_back(stem + "_" + col + ".svg", render_svg(spec));
    }
    return out;
}

RunResult reproduce_figure(int id, const fs::path& out_dir, const SolverConfig& cfg, bool emit_svg) {
    const FigureSpec f = figure_spec(id);
    fs::create_directories(out_dir);
    const std::string stem = "fig" + std::to_string(id);

    RunResult res;
    res.summary["figure"] = id;
    CsvTable summary;
    summary.comments = {f.title, market_comment(MarketParams{})};
    summary.header = {"series",     "label",    "c_star",          "objective", "insurer_value",
                      "boundary_optimum", "loading_low", "loading_high"};
    for (const FigureSeries& s : f.series) {
        SeriesOutcome out;
        std::vector<std::string> comments = {f.title, "series: " + s.label};
        if (const auto* ap = std::get_if<AttitudeProblem>(&s.problem)) {
            out = solve_attitude_series(*ap, cfg);
            comments.push_back("claim: " + ap->claim.describe());
            comments.push_back("prior on gamma: " + ap->prior_gamma.describe());
            comments.push_back(market_comment(ap->market));
            out.summary["c_star"] = out.summary["loading"];
        } else {
            const auto& tp = std::get<TypeProblem>(s.problem);
            out = solve_type_series(tp, cfg, CurveMethod::Auto);
            comments.push_back("claim: " + tp.claim.describe());
            comments.push_back("prior on theta: " + tp.prior_theta.describe());
            comments.push_back("gamma(theta): " + tp.gamma.describe());
            comments.push_back(market_comment(tp.market));
            for (const auto& w : tp.warnings) comments.push_back("warning: " + w);
        }
        const bool boundary = out.summary["boundary_optimum"].get<bool>();
        if (boundary) comments.push_back("boundary optimum: loading cap reached at the lowest type");
        CsvTable t = menu_table(out.menu);
        t.comments = comments;
        const fs::path path = out_dir / (stem + "_" + s.name + ".csv");
        write_csv(path, t);
        res.artifacts.push_back(path);

        const double lo = out.menu.contracts.front().loading;
        const double hi = out.menu.contracts.back().loading;
        summary.rows.push_back({s.name, s.label, format_double(out.summary["c_star"].get<double>()),
                                format_double(out.summary["objective"].get<double>()),
                                format_double(out.summary["insurer_value"].get<double>()), boundary ? "1" : "0",
                                format_double(lo), format_double(hi)});
        out.summary["label"] = s.label;
        res.summary["series"][s.name] = out.summary;
    }
    const fs::path spath = out_dir / (stem + "_summary.csv");
    write_csv(spath, summary);
    res.artifacts.push_back(spath);

    if (emit_svg) {
        for (const auto& [name, svg] : figure_svgs_from_csv(id, out_dir)) {
            write_text(out_dir / name, svg);
            res.artifacts.push_back(out_dir / name);
        }
    }
    return res;
}

}  // namespace screening
