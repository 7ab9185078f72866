#include "screening/attitude.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "screening/errors.hpp"

namespace screening {

void AttitudeProblem::validate() const {
    market.validate();
    if (claim.theta_indexed()) {
        throw ParameterError("attitude problem: claim law must be a fixed family, got " + claim.describe());
    }
    if (!(prior_gamma.low() > 0.0)) throw ParameterError("attitude problem: risk aversion support must be > 0");
    (void)claim.second_moment();
}

double insurer_objective_attitude(const AttitudeProblem& p, double xi) {
    if (!(xi >= 0.0)) throw ParameterError("insurer_objective_attitude: xi must be >= 0");
    const double half_gi = 0.5 * p.market.gamma_insurer;
    return prior_expectation(p.prior_gamma, [&](double gamma) {
        const double d = xi / gamma;
        return xi * p.claim.stop_loss(d) - half_gi * p.claim.stop_loss_sq(d);
    });
}

AttitudeSolution solve_loading_attitude(const AttitudeProblem& p, const SolverConfig& cfg) {
    p.validate();
    cfg.validate();
    const ScalarFn h = [&p](double xi) { return insurer_objective_attitude(p, xi); };
    double hi = 10.0 * p.prior_gamma.high() * p.claim.mean();
    for (int i = 0; i < 60 && h(hi) > h(0.99 * hi); ++i) hi *= 2.0;

    const MaximizeResult best = maximize_scalar(h, 0.0, hi, cfg.opt_tol);
    AttitudeSolution sol;
    sol.loading = best.x;
    sol.objective = best.value;
    sol.insurer_value = p.market.lambda * p.market.horizon * best.value;
    // Zero coverage (loading -> infinity) leaves the insurer with objective 0.
    sol.degenerate_market = best.value <= 1e-14;
    sol.search_upper = hi;
    return sol;
}

ContractMenu build_menu_attitude(const AttitudeProblem& p, double xi_hat, int n) {
    if (!(xi_hat >= 0.0)) throw ParameterError("build_menu_attitude: xi_hat must be >= 0");
    ContractMenu menu;
    menu.index = MenuIndex::Gamma;
    menu.grid = p.prior_gamma.degenerate() ? std::vector<double>{p.prior_gamma.low()}
                                           : uniform_grid(p.prior_gamma.low(), p.prior_gamma.high(), n);
    menu.contracts.reserve(menu.grid.size());
    for (double gamma : menu.grid) {
        Contract c;
        c.loading = xi_hat;
        c.deductible = xi_hat / gamma;
        c.premium_rate = (1.0 + xi_hat) * p.market.lambda * p.claim.stop_loss(c.deductible);
        menu.contracts.push_back(c);
    }
    return menu;
}

double customer_value_attitude(const AttitudeProblem& p, double gamma, double gamma_tilde,
                               const LoadingSchedule& loading) {
    const double xi = loading(gamma_tilde);
    const double d = xi / gamma_tilde;
    const double lt = p.market.lambda * p.market.horizon;
    return p.market.x_customer - lt * p.claim.mean() - lt * xi * p.claim.stop_loss(d) -
           0.5 * gamma * lt * p.claim.capped_sq_moment(d);
}

double customer_value_attitude(const AttitudeProblem& p, double gamma, double gamma_tilde, double xi_hat) {
    return customer_value_attitude(p, gamma, gamma_tilde, [xi_hat](double) { return xi_hat; });
}

double no_insurance_value_attitude(const AttitudeProblem& p, double gamma) {
    const double lt = p.market.lambda * p.market.horizon;
    return p.market.x_customer - lt * (p.claim.mean() + 0.5 * gamma * p.claim.second_moment());
}

TruthTellingReport audit_reports(const std::vector<double>& true_types, const std::vector<double>& reports,
                                 const std::function<double(double, double)>& value, double rel_tie) {
    TruthTellingReport report;
    report.n_types = static_cast<int>(true_types.size());
    report.fine_cell = reports.size() > 1 ? (reports.back() - reports.front()) / (reports.size() - 1) : 0.0;
    std::vector<double> vals(reports.size());
    for (double t : true_types) {
        double vmax = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < reports.size(); ++j) {
            vals[j] = value(t, reports[j]);
            vmax = std::max(vmax, vals[j]);
        }
        const double tie = rel_tie * (1.0 + std::abs(vmax));
        double pick = reports.front();
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < reports.size(); ++j) {
            if (vals[j] >= vmax - tie && std::abs(reports[j] - t) < best_dist) {
                best_dist = std::abs(reports[j] - t);
                pick = reports[j];
            }
        }
        report.max_deviation = std::max(report.max_deviation, best_dist);
        if (best_dist > report.fine_cell * (1.0 + 1e-9)) {
            report.passed = false;
            report.violations.emplace_back(t, pick);
        }
    }
    return report;
}

TruthTellingReport verify_truth_telling_attitude(const AttitudeProblem& p, const LoadingSchedule& loading, int n) {
    if (n < 3) throw ParameterError("verify_truth_telling_attitude: n must be >= 3");
    if (p.prior_gamma.degenerate()) {
        TruthTellingReport trivial;
        trivial.n_types = 1;
        return trivial;
    }
    const auto types = uniform_grid(p.prior_gamma.low(), p.prior_gamma.high(), n);
    const auto reports = uniform_grid(p.prior_gamma.low(), p.prior_gamma.high(), 5 * n);
    return audit_reports(types, reports, [&](double gamma, double gamma_tilde) {
        return customer_value_attitude(p, gamma, gamma_tilde, loading);
    });
}

TruthTellingReport verify_truth_telling_attitude(const AttitudeProblem& p, double xi_hat, int n) {
    return verify_truth_telling_attitude(p, [xi_hat](double) { return xi_hat; }, n);
}

Contract no_uncertainty_contract(const AttitudeProblem& p, const SolverConfig& cfg) {
    if (!p.prior_gamma.degenerate()) throw UsageError("no_uncertainty_contract: prior must be a point mass");
    const AttitudeSolution sol = solve_loading_attitude(p, cfg);
    return build_menu_attitude(p, sol.loading, 1).contracts.front();
}

}  // namespace screening
