#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "screening/errors.hpp"
#include "screening/type_screening.hpp"
#include "quadrature_oracle.hpp"

using namespace screening;
using screening::testing::tail_integral;

namespace {

const RiskAversionSpec kFive{RiskAversionForm::Constant, 5.0};

TypeProblem exp_problem(double lo, double hi, RiskAversionSpec g = kFive) {
    const auto prior = lo == hi ? TypeDistribution::point_mass(lo) : TypeDistribution::uniform(lo, hi);
    return make_type_problem(ClaimDistribution::exponential_mean(1.0), prior, g, MarketParams{});
}

TypeProblem pareto_problem(RiskAversionSpec g = kFive) {
    return make_type_problem(ClaimDistribution::pareto_shape_inv_theta(0.15, 3.0),
                             TypeDistribution::truncated_normal(0.15, 0.1, 0.1, 0.5), g, MarketParams{});
}

TypeProblem uniform_problem() {
    return make_type_problem(ClaimDistribution::uniform_on_zero_theta(1.0), TypeDistribution::uniform(1.0, 2.0), kFive,
                             MarketParams{});
}

double sup_gap(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("Psi, Psi_theta and phi point values") {
    const auto p = exp_problem(1.0, 9.0);
    CHECK(psi(p, 1.0, 0.0) == doctest::Approx(1.0));
    CHECK(psi(p, 1.0, 5.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(psi_theta(p, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(phi(p, 1.0, 5.0) == doctest::Approx(2.0).epsilon(1e-13));
    for (double t : {1.0, 3.0, 8.0}) {
        for (double x : {0.0, 1.0, 7.0}) {
            CHECK(phi(p, t, x) == doctest::Approx((1.0 + x / (5.0 * t)) / t).epsilon(1e-12));
        }
    }
    const auto u = make_type_problem(ClaimDistribution::uniform_on_zero_theta(1.0), TypeDistribution::uniform(1.0, 3.0),
                                     {RiskAversionForm::Constant, 1.0}, MarketParams{});
    CHECK(psi_theta(u, 2.0, 1.0) == doctest::Approx(3.0 / 8.0).epsilon(1e-10));
    CHECK(phi(u, 2.0, 5.0) == 0.0);
}

TEST_CASE("Psi_theta agrees with quadrature of -dF/dtheta") {
    for (const auto& p : {exp_problem(1.0, 9.0), pareto_problem(), uniform_problem()}) {
        for (double t : p.theta_grid(7)) {
            const auto f = p.claim_at(t);
            for (double x : {0.0, 0.5, 2.0}) {
                const double d = x / p.gamma_at(t);
                const double q = tail_integral([&](double y) { return -f.dtheta_cdf(y); }, d, f.support_upper());
                CHECK(std::abs(psi_theta(p, t, x) - q) <= 1e-6 * std::max(1.0, std::abs(q)));
            }
        }
    }
}

TEST_CASE("closed-form loading values") {
    CHECK(closed_form_loading(5.0, 9.0, 4.9) == doctest::Approx(0.1001).epsilon(1e-3));
    CHECK(closed_form_loading(5.0, 5.0, 4.9) == doctest::Approx(0.999456).epsilon(1e-5));
    CHECK_THROWS_AS((void)closed_form_loading(5.0, 1.0, 10.0), InfeasibleError);
    const double k = closed_form_from_anchor(5.0, 1.0, 7.0);
    CHECK(anchor_from_closed_form(5.0, 1.0, k) == doctest::Approx(7.0).epsilon(1e-13));
    CHECK(closed_form_loading(5.0, 1.0, k) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("ODE, Picard and closed form agree on the exponential family") {
    const auto p = exp_problem(1.0, 9.0);
    const auto iv = feasible_C_interval(p);
    for (double k : uniform_grid(iv.lo, iv.search_hi, 3)) {
        const auto c = LoadingConstant::closed_form(k);
        const auto cf = solve_loading_curve(p, c, CurveMethod::ClosedForm);
        const auto ode = solve_loading_curve(p, c, CurveMethod::Ode);
        const auto fp = solve_loading_curve(p, c, CurveMethod::FixedPoint);
        CHECK(sup_gap(cf.xi, ode.xi) <= 1e-6);
        CHECK(sup_gap(cf.xi, fp.xi) <= 1e-6);
        CHECK(ode_residual(p, ode) <= 1e-4);
        CHECK(ode_residual(p, fp) <= 1e-4);
    }
}

TEST_CASE("ODE and Picard agree where no closed form exists") {
    for (const auto& p : {pareto_problem(), pareto_problem({RiskAversionForm::InverseInTheta, 0.5}), uniform_problem()}) {
        const auto iv = feasible_C_interval(p);
        const auto c = LoadingConstant::anchor(iv.lo + 0.25 * (iv.search_hi - iv.lo));
        const auto ode = solve_loading_curve(p, c, CurveMethod::Ode);
        const auto fp = solve_loading_curve(p, c, CurveMethod::FixedPoint);
        CHECK(sup_gap(ode.xi, fp.xi) <= 1e-6);
        CHECK(ode_residual(p, ode) <= 1e-4);
        for (std::size_t i = 1; i < ode.xi.size(); ++i) CHECK(ode.xi[i] <= ode.xi[i - 1]);
    }
}

TEST_CASE("feasible interval") {
    const auto iv = feasible_C_interval(exp_problem(1.0, 9.0));
    CHECK(iv.scale == ConstantScale::ExponentialClosedForm);
    CHECK(iv.lo >= 5.0 * std::exp(-1.0 / 45.0) - 1e-12);
    CHECK(iv.hi <= 6.0 * std::exp(-0.2) + 1e-12);
    CHECK(iv.lo < iv.hi);
    CHECK_THROWS_AS((void)feasible_C_interval(exp_problem(0.01, 9.0)), InfeasibleError);
    const auto pt = feasible_C_interval(exp_problem(5.0, 5.0));
    CHECK(pt.lo == doctest::Approx(5.0 * std::exp(-1.0 / 25.0)));
    CHECK(pt.hi == doctest::Approx(26.0 / 5.0 * std::exp(-1.0 / 25.0)));
}

TEST_CASE("bounded claims keep the lowest type covered") {
    const auto p = uniform_problem();
    for (double t : {1.0, 1.5, 2.0}) {
        for (double x : {-1.0, 0.0, 2.0, 4.5}) {
            const double d = x / 5.0;
            const auto f = p.claim_at(t);
            const double q = tail_integral([&](double y) { return -f.dtheta_cdf(y); }, std::max(d, 0.0), t);
            CHECK(phi(p, t, x) == doctest::Approx(q / f.stop_loss(d)).epsilon(1e-9));
        }
    }
    const auto iv = feasible_C_interval(p);
    CHECK(iv.hi == doctest::Approx(6.0));
    CHECK(iv.hi_open);
    CHECK(iv.search_hi == doctest::Approx(5.5));
    SolverConfig narrow;
    narrow.coverage_margin = 0.05;
    CHECK(feasible_C_interval(p, narrow).search_hi == doctest::Approx(5.75));
    const auto sol = solve_optimal_constant(p);
    CHECK(sol.boundary_optimum);
    CHECK(sol.c_star.value == doctest::Approx(5.5));
    CHECK(ode_residual(p, sol.curve) <= 1e-4);
    const auto weak = make_type_problem(ClaimDistribution::uniform_on_zero_theta(1.0), TypeDistribution::uniform(1.0, 2.0),
                                        {RiskAversionForm::Constant, 1.0}, MarketParams{});
    CHECK_THROWS_AS((void)feasible_C_interval(weak), InfeasibleError);
}

TEST_CASE("lower end of the interval needs no clipping") {
    const auto p = pareto_problem();
    const auto iv = feasible_C_interval(p);
    const auto c = solve_loading_curve(p, LoadingConstant::anchor(iv.lo), CurveMethod::Ode);
    CHECK(c.xi.back() < 1e-6);
    CHECK(ode_residual(p, c) <= 1e-4);
}

TEST_CASE("insurer objective") {
    const auto p = exp_problem(5.0, 5.0);
    const double k = closed_form_from_anchor(5.0, 5.0, 7.0);
    const double h = insurer_objective_type(p, LoadingConstant::closed_form(k));
    CHECK(h == doctest::Approx(5.0 * std::exp(-0.24)).epsilon(1e-10));
    auto q = exp_problem(1.0, 9.0);
    const auto iv = feasible_C_interval(q);
    for (double c : uniform_grid(iv.lo, iv.search_hi, 3)) {
        const double a = insurer_objective_type(q, LoadingConstant::closed_form(c));
        const double b = insurer_objective_type(q, LoadingConstant::closed_form(std::min(c + 1e-8, iv.search_hi)));
        CHECK(std::abs(a - b) < 1e-3);
    }
    q.market.gamma_insurer = 0.0;
    LoadingCurve zero;
    zero.theta = q.theta_grid(11);
    zero.xi.assign(zero.theta.size(), 0.0);
    CHECK(insurer_objective_type(q, zero) == 0.0);
}

TEST_CASE("optimal constant for the exponential family") {
    const auto p = exp_problem(1.0, 9.0);
    const auto sol = solve_optimal_constant(p);
    CHECK(sol.c_star.value > 5.0 * std::exp(-1.0 / 45.0));
    CHECK(sol.c_star.value < 6.0 * std::exp(-0.2));
    for (std::size_t i = 1; i < sol.curve.xi.size(); ++i) CHECK(sol.curve.xi[i] < sol.curve.xi[i - 1]);
    // The objective keeps rising toward the loading cap: boundary optimum.
    CHECK(sol.boundary_optimum);
    CHECK(sol.curve.xi.front() == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("point-mass type reduces to the matched attitude benchmark") {
    const auto sol = solve_optimal_constant(exp_problem(5.0, 5.0));
    // Exp(mean 5), gamma = 5, gamma_I = 1: xi maximizes xi*5*e^{-xi/25} - 25*e^{-xi/25}, so xi = 30.
    CHECK(sol.curve.xi.size() == 1);
    CHECK(std::abs(sol.curve.xi[0] - 30.0) < 1e-3);
}

TEST_CASE("menu monotonicity") {
    for (const auto& p : {exp_problem(2.0, 8.0), pareto_problem(), pareto_problem({RiskAversionForm::LinearInTheta, 50.0})}) {
        const auto sol = solve_optimal_constant(p);
        const auto menu = build_menu_type(p, sol.curve);
        for (std::size_t i = 1; i < menu.contracts.size(); ++i) {
            CHECK(menu.contracts[i].loading <= menu.contracts[i - 1].loading);
            CHECK(menu.contracts[i].deductible <= menu.contracts[i - 1].deductible + 1e-12);
            CHECK(menu.contracts[i].premium_rate >= menu.contracts[i - 1].premium_rate - 1e-12);
        }
    }
    const auto p = exp_problem(1.0, 9.0);
    LoadingCurve zero;
    zero.theta = p.theta_grid(5);
    zero.xi.assign(5, 0.0);
    const auto menu = build_menu_type(p, zero);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(menu.contracts[i].deductible == 0.0);
        CHECK(menu.contracts[i].premium_rate == doctest::Approx(zero.theta[i]));
    }
}

TEST_CASE("stop-loss is nondecreasing in theta") {
    for (const auto& p : {exp_problem(1.0, 9.0), pareto_problem(), uniform_problem()}) {
        for (double d : {0.0, 0.5, 3.0, 10.0}) {
            double prev = -1.0;
            for (double t : p.theta_grid(40)) {
                const double s = p.claim_at(t).stop_loss(d);
                CHECK(s >= prev);
                prev = s;
            }
        }
    }
}

TEST_CASE("misreport deductible") {
    const auto p = exp_problem(1.0, 9.0);
    const auto sol = solve_optimal_constant(p);
    for (double t : {2.0, 5.0}) {
        CHECK(misreport_deductible(p, sol.curve, t, t) == sol.curve.at(t) / 5.0);
    }
    // Brute force: the first root of the misreport equation on a fine scan.
    const double t = 3.0;
    const double tt = 6.0;
    const double xt = sol.curve.at(tt);
    const auto f = p.claim_at(t);
    const auto ft = p.claim_at(tt);
    auto g = [&](double d) { return d - std::max((1.0 + xt) / 5.0 * ft.survival(d) / f.survival(d) - 0.2, 0.0); };
    double root = -1.0;
    double prev = g(0.0);
    for (double d : uniform_grid(0.0, 50.0, 500001)) {
        const double v = g(d);
        if (prev <= 0.0 && v >= 0.0 && d > 0.0) {
            root = d;
            break;
        }
        prev = v;
    }
    REQUIRE(root > 0.0);
    CHECK(misreport_deductible(p, sol.curve, t, tt) == doctest::Approx(root).epsilon(1e-4));
    LoadingCurve zero;
    zero.theta = p.theta_grid(11);
    zero.xi.assign(11, 0.0);
    zero.fine_theta = zero.theta;
    zero.fine_xi = zero.xi;
    CHECK(misreport_deductible(p, zero, 2.0, 7.0) == 0.0);
}

TEST_CASE("customer values") {
    const auto p = exp_problem(1.0, 9.0);
    const auto sol = solve_optimal_constant(p);
    for (double t : {1.5, 4.0, 8.0}) {
        CHECK(customer_value_type(p, sol.curve, t, t) == doctest::Approx(truthful_value_type(p, sol.curve, t)).epsilon(1e-10));
    }
    LoadingCurve up = sol.curve;
    for (double& v : up.xi) v += 0.1;
    for (double& v : up.fine_xi) v += 0.1;
    CHECK(truthful_value_type(p, up, 4.0) < truthful_value_type(p, sol.curve, 4.0));
}

TEST_CASE("truth-telling audit") {
    const auto p = exp_problem(1.0, 9.0);
    const auto sol = solve_optimal_constant(p);
    const auto ok = verify_truth_telling_type(p, sol.curve, 50);
    CHECK(ok.passed);
    LoadingCurve flat = sol.curve;
    std::fill(flat.xi.begin(), flat.xi.end(), sol.curve.xi.front());
    std::fill(flat.fine_xi.begin(), flat.fine_xi.end(), sol.curve.xi.front());
    CHECK_FALSE(verify_truth_telling_type(p, flat, 50).passed);
    CHECK(verify_truth_telling_type(exp_problem(5.0, 5.0), solve_optimal_constant(exp_problem(5.0, 5.0)).curve, 50).passed);
}

TEST_CASE("truth-telling audit below the Pareto scale") {
    const auto p = pareto_problem();
    const auto sol = solve_optimal_constant(p);
    CHECK(sol.curve.xi.front() / p.gamma_at(p.theta_low()) < 3.0);
    CHECK(verify_truth_telling_type(p, sol.curve, 50).passed);
    LoadingCurve flat = sol.curve;
    std::fill(flat.xi.begin(), flat.xi.end(), sol.curve.xi.front());
    std::fill(flat.fine_xi.begin(), flat.fine_xi.end(), sol.curve.xi.front());
    CHECK_FALSE(verify_truth_telling_type(p, flat, 50).passed);
}

TEST_CASE("assumption diagnostics") {
    const auto b = check_assumptions(exp_problem(1.0, 9.0), 1.0);
    CHECK(b.K == doctest::Approx(1.2).epsilon(1e-9));
    CHECK_FALSE(b.contraction_ok);
    const auto pt = check_assumptions(exp_problem(5.0, 5.0), 1.0);
    CHECK(pt.contraction_ok);
    CHECK(pt.positivity_ok);
}

TEST_CASE("general coverage") {
    const auto p = exp_problem(1.0, 9.0);
    CHECK(general_coverage(p, 3.0, 2.0, 2.0, 5.0) == doctest::Approx(2.0));
    CHECK(general_coverage(p, 0.5, 2.0, 2.0, 5.0) == 0.0);
    CHECK(general_coverage(p, 3.0, 2.0, 2.0, 0.0) == doctest::Approx(3.0));
}

TEST_CASE("problem validation") {
    auto p = make_type_problem(ClaimDistribution::pareto_shape_inv_theta(0.15, 3.0),
                               TypeDistribution::uniform(0.1, 0.5), kFive, MarketParams{});
    CHECK(p.theta_high() == doctest::Approx(kParetoThetaCap));
    CHECK(p.warnings.size() == 1);
    CHECK_THROWS_AS((void)make_type_problem(ClaimDistribution::exponential_fixed(1.0),
                                            TypeDistribution::uniform(1.0, 2.0), kFive, MarketParams{}),
                    ParameterError);
    CHECK(parse_curve_method("fixed_point") == CurveMethod::FixedPoint);
}
