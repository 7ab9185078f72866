#include "screening/type_screening.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "screening/attitude.hpp"
#include "screening/errors.hpp"

namespace screening {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kClosedFormRefinement = 16;
constexpr int kMaxPicardRefinement = 1024;

double feasibility_slack(const SolverConfig& cfg) { return std::max(1e-9, 10.0 * cfg.ode_tol); }

}  // namespace

bool TypeProblem::has_closed_form() const noexcept {
    return claim.family() == ClaimFamily::ExponentialMean && gamma.form == RiskAversionForm::Constant;
}

std::vector<double> TypeProblem::theta_grid(int n) const {
    if (prior_theta.degenerate()) return {prior_theta.low()};
    return uniform_grid(prior_theta.low(), prior_theta.high(), n);
}

void TypeProblem::validate() const {
    market.validate();
    if (!claim.theta_indexed()) {
        throw ParameterError("type problem: claim law must be theta-indexed, got " + claim.describe());
    }
    if (!(theta_low() > 0.0)) throw ParameterError("type problem: theta support must be > 0");
    if (!(gamma.coefficient > 0.0) || !std::isfinite(gamma.coefficient)) {
        throw ParameterError("type problem: risk-aversion coefficient must be > 0");
    }
    if (claim.family() == ClaimFamily::ParetoShapeInvTheta && !(theta_high() < 0.5)) {
        throw ParameterError("type problem: Pareto shape 1/theta needs theta < 1/2 for a finite variance");
    }
    // First-order dominance: dF/dtheta <= 0 on a grid of (y, theta).
    for (double th : theta_grid(20)) {
        const ClaimDistribution f = claim_at(th);
        const double top = std::isinf(f.support_upper()) ? f.quantile(0.999) : f.support_upper();
        for (double y : uniform_grid(0.0, top, 20)) {
            if (f.dtheta_cdf(y) > 1e-15) {
                throw ParameterError("type problem: dF/dtheta > 0 violates first-order dominance");
            }
        }
    }
}

TypeProblem make_type_problem(ClaimDistribution claim, TypeDistribution prior, RiskAversionSpec gamma,
                              MarketParams market) {
    TypeProblem p{claim, prior, gamma, market, {}};
    if (claim.family() == ClaimFamily::ParetoShapeInvTheta && prior.high() > kParetoThetaCap) {
        if (prior.low() > kParetoThetaCap) {
            throw ParameterError("type problem: Pareto type support lies above the finite-variance range");
        }
        p.prior_theta = prior.clamped(prior.low(), kParetoThetaCap);
        std::ostringstream msg;
        msg << "type support clamped to theta <= " << kParetoThetaCap << " (finite claim variance)";
        p.warnings.push_back(msg.str());
    }
    p.validate();
    return p;
}

std::string_view to_string(CurveMethod m) {
    switch (m) {
        case CurveMethod::Ode: return "ode";
        case CurveMethod::FixedPoint: return "fixed_point";
        case CurveMethod::ClosedForm: return "closed_form";
        case CurveMethod::Auto: return "auto";
    }
    return "unknown";
}

CurveMethod parse_curve_method(std::string_view name) {
    std::string n;
    for (char c : name) {
        if (c != '_' && c != '-') n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (n == "ode") return CurveMethod::Ode;
    if (n == "fixedpoint" || n == "picard") return CurveMethod::FixedPoint;
    if (n == "closedform") return CurveMethod::ClosedForm;
    if (n == "auto") return CurveMethod::Auto;
    throw ParameterError("unknown curve method '" + std::string(name) + "'");
}

double closed_form_loading(double gamma, double theta, double k) {
    const double den = 1.0 + gamma * theta - k * theta * std::exp(1.0 / (gamma * theta));
    if (!(den > 0.0)) {
        std::ostringstream msg;
        msg << "closed-form loading: denominator " << den << " <= 0 at theta = " << theta << " (C = " << k << ")";
        throw InfeasibleError(msg.str());
    }
    return 1.0 / den - 1.0;
}

double anchor_from_closed_form(double gamma, double theta_low, double k) {
    return 1.0 + closed_form_loading(gamma, theta_low, k);
}

double closed_form_from_anchor(double gamma, double theta_low, double anchor) {
    return (1.0 + gamma * theta_low - 1.0 / anchor) * std::exp(-1.0 / (gamma * theta_low)) / theta_low;
}

double anchor_value(const TypeProblem& p, const LoadingConstant& c) {
    if (c.scale == ConstantScale::Anchor) return c.value;
    if (!p.has_closed_form()) {
        throw UsageError("closed-form constant requires the exponential family with constant risk aversion");
    }
    return anchor_from_closed_form(p.gamma.coefficient, p.theta_low(), c.value);
}

double LoadingCurve::at(double t) const {
    const std::vector<double>& xs = fine_theta.empty() ? theta : fine_theta;
    const std::vector<double>& ys = fine_theta.empty() ? xi : fine_xi;
    const std::size_t n = xs.size();
    if (n == 0) throw UsageError("LoadingCurve::at: empty curve");
    if (n == 1) return ys[0];
    t = std::clamp(t, xs.front(), xs.back());
    const double h = (xs.back() - xs.front()) / static_cast<double>(n - 1);
    auto i = static_cast<std::ptrdiff_t>(std::floor((t - xs.front()) / h));
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 2);
    if (n < 4) {
        const double w = (t - xs[i]) / (xs[i + 1] - xs[i]);
        return (1.0 - w) * ys[i] + w * ys[i + 1];
    }
    const std::ptrdiff_t s = std::clamp<std::ptrdiff_t>(i - 1, 0, static_cast<std::ptrdiff_t>(n) - 4);
    double v = 0.0;
    for (std::ptrdiff_t a = s; a < s + 4; ++a) {
        double w = 1.0;
        for (std::ptrdiff_t b = s; b < s + 4; ++b) {
            if (b != a) w *= (t - xs[b]) / (xs[a] - xs[b]);
        }
        v += w * ys[a];
    }
    return v;
}

double psi(const TypeProblem& p, double theta, double xi) {
    return p.claim_at(theta).stop_loss(xi / p.gamma_at(theta));
}

double psi_theta(const TypeProblem& p, double theta, double xi) {
    return p.claim_at(theta).stop_loss_dtheta(xi / p.gamma_at(theta));
}

double phi(const TypeProblem& p, double theta, double xi) {
    return p.claim_at(theta).stop_loss_log_sensitivity(xi / p.gamma_at(theta));
}

namespace {

std::vector<double> refined_grid(const std::vector<double>& base, int m) {
    if (base.size() < 2) return base;
    return uniform_grid(base.front(), base.back(), static_cast<int>((base.size() - 1) * m + 1));
}

/// Picard iteration of T xi = C exp(-int phi) - 1 on successively refined grids.
void solve_fixed_point(const TypeProblem& p, double anchor, const SolverConfig& cfg, LoadingCurve& curve) {
    const std::vector<double>& base = curve.theta;
    std::vector<double> prev_base;
    std::vector<double> init(base.size(), anchor - 1.0);
    int total_iterations = 0;
    for (int m = 1; m <= kMaxPicardRefinement; m *= 2) {
        const std::vector<double> grid = refined_grid(base, m);
        const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
        const CurveMap T = [&](const std::vector<double>& xi) {
            std::vector<double> g(xi.size());
            for (std::size_t i = 0; i < xi.size(); ++i) g[i] = phi(p, grid[i], xi[i]);
            std::vector<double> out = cumulative_simpson(g, h);
            for (double& v : out) v = anchor * std::exp(-v) - 1.0;
            return out;
        };
        FixedPointResult fp = fixed_point(T, init, cfg.fp_damping, cfg.fp_max_iter, cfg.ode_tol);
        total_iterations += fp.iterations;
        std::vector<double> on_base(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) on_base[i] = fp.x[i * static_cast<std::size_t>(m)];

        double diff = kInf;
        if (!prev_base.empty()) {
            diff = 0.0;
            for (std::size_t i = 0; i < base.size(); ++i) diff = std::max(diff, std::abs(on_base[i] - prev_base[i]));
        }
        if (diff < cfg.ode_tol) {
            curve.xi = std::move(on_base);
            curve.fine_theta = grid;
            curve.fine_xi = std::move(fp.x);
            curve.diagnostics.iterations = total_iterations;
            curve.diagnostics.residual = fp.residual;
            curve.diagnostics.contraction_estimate = fp.contraction_estimate;
            curve.diagnostics.refinement = m;
            return;
        }
        prev_base = std::move(on_base);
        // Warm start on the next grid: keep the nodes, average into the midpoints.
        init.assign((grid.size() - 1) * 2 + 1, 0.0);
        for (std::size_t i = 0; i < grid.size(); ++i) init[2 * i] = fp.x[i];
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) init[2 * i + 1] = 0.5 * (fp.x[i] + fp.x[i + 1]);
    }
    throw ConvergenceError("fixed-point curve: grid refinement did not converge", {});
}

void solve_ode(const TypeProblem& p, double anchor, const SolverConfig& cfg, LoadingCurve& curve) {
    const OdeRhs rhs = [&p](double theta, double xi) { return -(1.0 + xi) * phi(p, theta, xi); };
    IvpSolution sol = solve_ivp(rhs, anchor - 1.0, curve.theta, cfg);
    curve.xi = std::move(sol.values);
    curve.fine_theta = std::move(sol.fine_x);
    curve.fine_xi = std::move(sol.fine_y);
    curve.diagnostics.refinement = static_cast<int>((curve.fine_theta.size() - 1) / std::max<std::size_t>(1, curve.theta.size() - 1));
    curve.diagnostics.iterations = sol.substeps;
}

void solve_closed_form(const TypeProblem& p, const LoadingConstant& c, double anchor, LoadingCurve& curve) {
    if (!p.has_closed_form()) {
        throw UnsupportedOperation("closed-form curve requires the exponential family with constant risk aversion");
    }
    const double gamma = p.gamma.coefficient;
    const double k = c.scale == ConstantScale::ExponentialClosedForm
                         ? c.value
                         : closed_form_from_anchor(gamma, p.theta_low(), anchor);
    curve.xi.clear();
    for (double t : curve.theta) curve.xi.push_back(closed_form_loading(gamma, t, k));
    curve.fine_theta = refined_grid(curve.theta, kClosedFormRefinement);
    curve.fine_xi.clear();
    for (double t : curve.fine_theta) curve.fine_xi.push_back(closed_form_loading(gamma, t, k));
    curve.diagnostics.refinement = curve.theta.size() > 1 ? kClosedFormRefinement : 1;
}

}  // namespace

LoadingCurve solve_loading_curve(const TypeProblem& p, const LoadingConstant& c, CurveMethod method,
                                 const SolverConfig& cfg) {
    cfg.validate();
    if (method == CurveMethod::Auto) method = p.has_closed_form() ? CurveMethod::ClosedForm : CurveMethod::Ode;
    const double anchor = anchor_value(p, c);
    if (!(anchor >= 1.0 - 1e-12) || !std::isfinite(anchor)) {
        std::ostringstream msg;
        msg << "loading curve: constant must give xi(theta_L) >= 0 (1 + xi(theta_L) = " << anchor << ")";
        throw ParameterError(msg.str());
    }
    LoadingCurve curve;
    curve.constant = c;
    curve.anchor = anchor;
    curve.method = method;
    curve.theta = p.theta_grid(cfg.grid_points);

    if (curve.theta.size() == 1 && method != CurveMethod::ClosedForm) {
        curve.xi = {anchor - 1.0};
        curve.fine_theta = curve.theta;
        curve.fine_xi = curve.xi;
    } else {
        switch (method) {
            case CurveMethod::Ode: solve_ode(p, anchor, cfg, curve); break;
            case CurveMethod::FixedPoint: solve_fixed_point(p, anchor, cfg, curve); break;
            case CurveMethod::ClosedForm: solve_closed_form(p, c, anchor, curve); break;
            case CurveMethod::Auto: break;
        }
    }
    const double slack = feasibility_slack(cfg);
    const double lowest = *std::min_element(curve.xi.begin(), curve.xi.end());
    curve.feasible = lowest >= -slack;
    for (double& v : curve.xi) v = std::max(v, 0.0);
    for (double& v : curve.fine_xi) v = std::max(v, 0.0);
    return curve;
}

namespace {

/// True iff the closed-form curve with constant k is defined and nonnegative on the grid.
bool closed_form_valid(double gamma, const std::vector<double>& grid, double k) {
    for (double t : grid) {
        const double den = 1.0 + gamma * t - k * t * std::exp(1.0 / (gamma * t));
        if (!(den > 0.0)) return false;
        if (1.0 / den - 1.0 < -1e-12) return false;
    }
    return true;
}

/// Lowest loading on the grid of the unclipped ODE solution with the given anchor.
double ode_min_loading(const TypeProblem& p, double anchor, const SolverConfig& cfg) {
    LoadingCurve probe;
    probe.theta = p.theta_grid(cfg.grid_points);
    solve_ode(p, anchor, cfg, probe);
    return *std::min_element(probe.xi.begin(), probe.xi.end());
}

}  // namespace

FeasibleInterval feasible_C_interval(const TypeProblem& p, const SolverConfig& cfg) {
    p.validate();
    cfg.validate();
    FeasibleInterval out;
    double cap_anchor = 1.0 + cfg.max_loading;

    if (p.has_closed_form()) {
        const double g = p.gamma.coefficient;
        const double tl = p.theta_low();
        const double th = p.theta_high();
        out.scale = ConstantScale::ExponentialClosedForm;
        const double lo = g * std::exp(-1.0 / (g * th));
        const double hi = (1.0 + g * tl) / tl * std::exp(-1.0 / (g * tl));
        if (!(lo < hi)) {
            std::ostringstream msg;
            msg << "no admissible C exists: lower bound " << lo << " >= upper bound " << hi
                << " for theta in [" << tl << ", " << th << "]";
            throw InfeasibleError(msg.str());
        }
        const std::vector<double> grid = p.theta_grid(cfg.grid_points);
        double vlo = lo;
        double vhi = hi - 1e-12 * (hi - lo);
        const bool lo_ok = closed_form_valid(g, grid, vlo);
        const bool hi_ok = closed_form_valid(g, grid, vhi);
        if (!lo_ok && !hi_ok) throw InfeasibleError("no admissible C exists: closed-form bounds fail validation");
        if (!lo_ok) {
            double bad = vlo;
            double good = vhi;
            for (int i = 0; i < 200 && good - bad > cfg.opt_tol * good; ++i) {
                const double mid = 0.5 * (bad + good);
                (closed_form_valid(g, grid, mid) ? good : bad) = mid;
            }
            vlo = good;
        }
        if (!hi_ok) {
            double good = vlo;
            double bad = vhi;
            for (int i = 0; i < 200 && bad - good > cfg.opt_tol * good; ++i) {
                const double mid = 0.5 * (bad + good);
                (closed_form_valid(g, grid, mid) ? good : bad) = mid;
            }
            vhi = good;
        }
        out.lo = vlo;
        out.hi = hi_ok ? hi : vhi;
        out.hi_open = hi_ok;
        const double cap = closed_form_from_anchor(g, tl, cap_anchor);
        out.search_hi = std::clamp(cap, out.lo, vhi);
        return out;
    }

    out.scale = ConstantScale::Anchor;
    out.hi = kInf;
    out.hi_open = true;
    const double tl = p.theta_low();
    const double top = p.claim_at(tl).support_upper();
    if (std::isfinite(top)) {
        out.hi = 1.0 + p.gamma_at(tl) * top;
        cap_anchor = std::min(cap_anchor, 1.0 + p.gamma_at(tl) * top * (1.0 - cfg.coverage_margin));
    }
    if (p.prior_theta.degenerate()) {
        out.lo = 1.0;
        out.search_hi = cap_anchor;
        return out;
    }
    auto feasible = [&](double anchor) { return ode_min_loading(p, anchor, cfg) >= 0.0; };
    if (feasible(1.0)) {
        out.lo = 1.0;
        out.search_hi = cap_anchor;
        return out;
    }
    double bad = 1.0;
    double good = 0.0;
    const double xi_cap = cap_anchor - 1.0;
    for (double xi0 = std::min(1.0, xi_cap);; xi0 *= 2.0) {
        const double a = 1.0 + std::min(xi0, xi_cap);
        if (feasible(a)) {
            good = a;
            break;
        }
        bad = a;
        if (xi0 >= xi_cap) {
            std::ostringstream msg;
            msg << "no admissible C exists with xi(theta_L) <= " << xi_cap;
            throw InfeasibleError(msg.str());
        }
    }
    for (int i = 0; i < 200 && good - bad > cfg.opt_tol * good; ++i) {
        const double mid = 0.5 * (bad + good);
        (feasible(mid) ? good : bad) = mid;
    }
    out.lo = good;
    out.search_hi = std::max(cap_anchor, good);
    return out;
}

double insurer_objective_type(const TypeProblem& p, const LoadingCurve& curve) {
    if (!curve.feasible) throw InfeasibleError("insurer objective: loading curve is infeasible");
    const double half_gi = 0.5 * p.market.gamma_insurer;
    auto integrand = [&](double theta, double xi) {
        const ClaimDistribution f = p.claim_at(theta);
        const double d = xi / p.gamma_at(theta);
        return xi * f.stop_loss(d) - half_gi * f.stop_loss_sq(d);
    };
    if (p.prior_theta.degenerate() || curve.theta.size() == 1) return integrand(curve.theta[0], curve.xi[0]);
    const std::size_t n = curve.theta.size();
    const double h = (curve.theta.back() - curve.theta.front()) / static_cast<double>(n - 1);
    const std::vector<double> w = simpson_weights(n, h);
    double num = 0.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wd = w[i] * p.prior_theta.density(curve.theta[i]);
        num += wd * integrand(curve.theta[i], curve.xi[i]);
        mass += wd;
    }
    return num / mass;
}

double insurer_objective_type(const TypeProblem& p, const LoadingConstant& c, const SolverConfig& cfg,
                              CurveMethod method) {
    return insurer_objective_type(p, solve_loading_curve(p, c, method, cfg));
}

TypeSolution solve_optimal_constant(const TypeProblem& p, const SolverConfig& cfg, CurveMethod method) {
    TypeSolution sol;
    sol.interval = feasible_C_interval(p, cfg);
    const ConstantScale scale = sol.interval.scale;
    const ScalarFn h = [&](double v) { return insurer_objective_type(p, LoadingConstant{scale, v}, cfg, method); };
    const double lo = sol.interval.lo;
    const double hi = sol.interval.search_hi;
    const MaximizeResult best = maximize_scalar(h, lo, hi, cfg.opt_tol * std::max(1.0, std::abs(hi)));
    sol.c_star = LoadingConstant{scale, best.x};
    sol.curve = solve_loading_curve(p, sol.c_star, method, cfg);
    sol.objective = insurer_objective_type(p, sol.curve);
    sol.insurer_value = cfg.insurer_value_factor * p.market.lambda * p.market.horizon * sol.objective;
    const double edge = 1e-6 * std::max(hi - lo, 1e-300);
    sol.boundary_optimum = hi > lo && (best.x - lo <= edge || hi - best.x <= edge);
    return sol;
}

ContractMenu build_menu_type(const TypeProblem& p, const LoadingCurve& curve) {
    ContractMenu menu;
    menu.index = MenuIndex::Theta;
    menu.grid = curve.theta;
    for (std::size_t i = 0; i < curve.theta.size(); ++i) {
        const double t = curve.theta[i];
        const double g = p.gamma_at(t);
        Contract c;
        c.loading = curve.xi[i];
        c.deductible = c.loading / g;
        c.premium_rate = (1.0 + c.loading) * p.market.lambda * p.claim_at(t).stop_loss(c.deductible);
        menu.contracts.push_back(c);
        menu.gamma_of_theta.push_back(g);
    }
    return menu;
}

double misreport_deductible(const TypeProblem& p, const LoadingCurve& curve, double theta, double theta_tilde,
                            const SolverConfig& cfg) {
    const double g = p.gamma_at(theta);
    if (theta_tilde == theta) return std::max(curve.at(theta), 0.0) / g;
    const double xt = std::max(curve.at(theta_tilde), 0.0);
    const ClaimDistribution f = p.claim_at(theta);
    const ClaimDistribution ft = p.claim_at(theta_tilde);
    const ScalarFn r = [&](double d) {
        const double s = f.survival(d);
        const double st = ft.survival(d);
        double rhs = 0.0;
        if (s <= 0.0) {
            rhs = st > 0.0 ? 1e300 : 0.0;
        } else {
            rhs = std::max(((1.0 + xt) * st / s - 1.0) / g, 0.0);
        }
        return d - std::min(rhs, 1e300);
    };
    if (r(0.0) >= 0.0) return 0.0;
    constexpr int kScan = 200;
    double span = 4.0 * (1.0 + xt) / g;
    for (int attempt = 0; attempt < 40; ++attempt, span *= 2.0) {
        double prev_d = 0.0;
        for (int k = 1; k <= kScan; ++k) {
            const double d = span * k / kScan;
            if (r(d) > 0.0) return bisect(r, prev_d, d, cfg.opt_tol);
            prev_d = d;
        }
    }
    std::ostringstream msg;
    msg << "misreport deductible: no root for theta = " << theta << ", report " << theta_tilde << "; residual trace:";
    for (double d : {0.0, 1.0, 10.0, 100.0}) msg << " r(" << d << ")=" << r(d);
    throw NumericError(msg.str());
}

namespace {

double value_at_deductible(const TypeProblem& p, double theta, double theta_tilde, double xi_tilde, double d) {
    const ClaimDistribution f = p.claim_at(theta);
    const ClaimDistribution ft = p.claim_at(theta_tilde);
    const double g = p.gamma_at(theta);
    const double lt = p.market.lambda * p.market.horizon;
    return p.market.x_customer -
           lt * ((1.0 + xi_tilde) * ft.stop_loss(d) + f.limited_mean(d) + 0.5 * g * f.capped_sq_moment(d));
}

}  // namespace

double customer_value_type(const TypeProblem& p, const LoadingCurve& curve, double theta, double theta_tilde,
                           const SolverConfig& cfg) {
    const double d = misreport_deductible(p, curve, theta, theta_tilde, cfg);
    return value_at_deductible(p, theta, theta_tilde, std::max(curve.at(theta_tilde), 0.0), d);
}

double truthful_value_type(const TypeProblem& p, const LoadingCurve& curve, double theta) {
    const double xi = std::max(curve.at(theta), 0.0);
    return value_at_deductible(p, theta, theta, xi, xi / p.gamma_at(theta));
}

double no_insurance_value_type(const TypeProblem& p, double theta) {
    const ClaimDistribution f = p.claim_at(theta);
    const double lt = p.market.lambda * p.market.horizon;
    return p.market.x_customer - lt * (f.mean() + 0.5 * p.gamma_at(theta) * f.second_moment());
}

TruthTellingReport verify_truth_telling_type(const TypeProblem& p, const LoadingCurve& curve, int n,
                                             const SolverConfig& cfg) {
    if (n < 3) throw ParameterError("verify_truth_telling_type: n must be >= 3");
    if (p.prior_theta.degenerate()) {
        TruthTellingReport trivial;
        trivial.n_types = 1;
        return trivial;
    }
    const auto types = uniform_grid(p.theta_low(), p.theta_high(), n);
    const auto reports = uniform_grid(p.theta_low(), p.theta_high(), 5 * n);
    return audit_reports(types, reports, [&](double theta, double theta_tilde) {
        try {
            return customer_value_type(p, curve, theta, theta_tilde, cfg);
        } catch (const NumericError&) {
            // No interior optimum: the customer's best response is to buy nothing.
            return no_insurance_value_type(p, theta);
        }
    }, cfg.ode_tol);
}

AssumptionBounds check_assumptions(const TypeProblem& p, double xi0, const SolverConfig& cfg) {
    if (!(xi0 >= 0.0)) throw ParameterError("check_assumptions: xi0 must be >= 0");
    AssumptionBounds b;
    const std::vector<double> thetas = p.theta_grid(cfg.grid_points);
    const std::vector<double> xis = xi0 > 0.0 ? uniform_grid(0.0, xi0, 101) : std::vector<double>{0.0};
    const double step = 1e-5 * std::max(1.0, xi0);
    for (double t : thetas) {
        for (std::size_t j = 0; j < xis.size(); ++j) {
            const double x = xis[j];
            b.K = std::max(b.K, phi(p, t, x));
            double dphi = 0.0;
            if (xis.size() == 1) {
                dphi = (phi(p, t, x + step) - phi(p, t, x)) / step;
            } else if (j == 0) {
                dphi = (phi(p, t, x + step) - phi(p, t, x)) / step;
            } else if (j + 1 == xis.size()) {
                dphi = (phi(p, t, x) - phi(p, t, x - step)) / step;
            } else {
                dphi = (phi(p, t, x + step) - phi(p, t, x - step)) / (2.0 * step);
            }
            b.M = std::max(b.M, std::abs(dphi));
        }
    }
    const double width = p.theta_high() - p.theta_low();
    b.contraction_ok = (1.0 + xi0) * b.M * width < 1.0;
    b.positivity_ok = (1.0 + xi0) * std::exp(-b.K * width) >= 1.0;
    return b;
}

double general_coverage(const TypeProblem& p, double y, double theta, double theta_tilde, double xi_tilde) {
    const double f = p.claim_at(theta).pdf(y);
    if (!(f > 0.0)) {
        std::ostringstream msg;
        msg << "general coverage undefined: zero density at y = " << y << " for theta = " << theta;
        throw NumericError(msg.str());
    }
    const double ft = p.claim_at(theta_tilde).pdf(y);
    const double g = p.gamma_at(theta);
    const double l = y + 1.0 / g - ft * (1.0 + xi_tilde) / (g * f);
    return std::clamp(l, 0.0, y);
}

double ode_residual(const TypeProblem& p, const LoadingCurve& curve) {
    const std::vector<double>& xs = curve.fine_theta.size() >= 5 ? curve.fine_theta : curve.theta;
    const std::vector<double>& ys = curve.fine_theta.size() >= 5 ? curve.fine_xi : curve.xi;
    const std::size_t n = xs.size();
    if (n < 5) return 0.0;
    const double h = (xs.back() - xs.front()) / static_cast<double>(n - 1);
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dy = 0.0;
        if (i >= 2 && i + 2 < n) {
            dy = (-ys[i + 2] + 8.0 * ys[i + 1] - 8.0 * ys[i - 1] + ys[i - 2]) / (12.0 * h);
        } else if (i == 0) {
            dy = (-25.0 * ys[0] + 48.0 * ys[1] - 36.0 * ys[2] + 16.0 * ys[3] - 3.0 * ys[4]) / (12.0 * h);
        } else if (i == 1) {
            dy = (-3.0 * ys[0] - 10.0 * ys[1] + 18.0 * ys[2] - 6.0 * ys[3] + ys[4]) / (12.0 * h);
        } else if (i == n - 1) {
            dy = (25.0 * ys[n - 1] - 48.0 * ys[n - 2] + 36.0 * ys[n - 3] - 16.0 * ys[n - 4] + 3.0 * ys[n - 5]) /
                 (12.0 * h);
        } else {
            dy = (3.0 * ys[n - 1] + 10.0 * ys[n - 2] - 18.0 * ys[n - 3] + 6.0 * ys[n - 4] - ys[n - 5]) / (12.0 * h);
        }
        const double r = dy * psi(p, xs[i], ys[i]) + (1.0 + ys[i]) * psi_theta(p, xs[i], ys[i]);
        sup = std::max(sup, std::abs(r));
    }
    return sup;
}

}  // namespace screening
