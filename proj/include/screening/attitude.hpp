#pragma once

#include <functional>

#include "screening/contract.hpp"
#include "screening/distributions.hpp"
#include "screening/numerics.hpp"

namespace screening {

/// Hidden risk aversion gamma ~ prior_gamma; the claim law is common knowledge.
struct AttitudeProblem {
    ClaimDistribution claim = ClaimDistribution::exponential_fixed(1.0);
    TypeDistribution prior_gamma = TypeDistribution::point_mass(1.0);
    MarketParams market;

    void validate() const;
};

struct AttitudeSolution {
    double loading = 0.0;
    double objective = 0.0;       ///< insurer objective at the optimal loading
    double insurer_value = 0.0;   ///< lambda * T * objective
    bool degenerate_market = false;
    double search_upper = 0.0;    ///< right end of the final search interval
};

/// Loading schedule as a function of the reported gamma.
using LoadingSchedule = std::function<double(double)>;

/// E_G[ xi * SL(xi/gamma) - (gamma_I/2) * SL2(xi/gamma) ].
[[nodiscard]] double insurer_objective_attitude(const AttitudeProblem& p, double xi);

[[nodiscard]] AttitudeSolution solve_loading_attitude(const AttitudeProblem& p, const SolverConfig& cfg = {});

[[nodiscard]] ContractMenu build_menu_attitude(const AttitudeProblem& p, double xi_hat, int n);

/// Mean–variance value of a customer with aversion gamma who reports gamma_tilde.
[[nodiscard]] double customer_value_attitude(const AttitudeProblem& p, double gamma, double gamma_tilde,
                                             double xi_hat);
[[nodiscard]] double customer_value_attitude(const AttitudeProblem& p, double gamma, double gamma_tilde,
                                             const LoadingSchedule& loading);

/// x_C - lambda*T*(E[Y] + gamma/2 * E[Y^2]).
[[nodiscard]] double no_insurance_value_attitude(const AttitudeProblem& p, double gamma);

[[nodiscard]] TruthTellingReport verify_truth_telling_attitude(const AttitudeProblem& p, double xi_hat, int n);
[[nodiscard]] TruthTellingReport verify_truth_telling_attitude(const AttitudeProblem& p,
                                                               const LoadingSchedule& loading, int n);

/// Single contract for a point-mass prior; throws UsageError otherwise.
[[nodiscard]] Contract no_uncertainty_contract(const AttitudeProblem& p, const SolverConfig& cfg = {});

/// Shared by both audits: argmax over reports with ties broken toward the truth.
/// Values within rel_tie * (1 + |max|) of the maximum count as ties.
[[nodiscard]] TruthTellingReport audit_reports(const std::vector<double>& true_types,
                                               const std::vector<double>& reports,
                                               const std::function<double(double, double)>& value,
                                               double rel_tie = 1e-12);

}  // namespace screening
