#pragma once

#include <string>
#include <vector>

#include "screening/contract.hpp"
#include "screening/distributions.hpp"
#include "screening/numerics.hpp"

namespace screening {

/// Hidden risk type theta ~ prior_theta indexing the claim law F(y; theta).
struct TypeProblem {
    ClaimDistribution claim = ClaimDistribution::exponential_mean(1.0);  ///< theta-indexed prototype
    TypeDistribution prior_theta = TypeDistribution::point_mass(1.0);
    RiskAversionSpec gamma;
    MarketParams market;
    std::vector<std::string> warnings;

    [[nodiscard]] ClaimDistribution claim_at(double theta) const { return claim.with_theta(theta); }
    [[nodiscard]] double gamma_at(double theta) const { return gamma(theta); }
    [[nodiscard]] double theta_low() const noexcept { return prior_theta.low(); }
    [[nodiscard]] double theta_high() const noexcept { return prior_theta.high(); }
    /// Exponential family with constant gamma: closed-form loading curves exist.
    [[nodiscard]] bool has_closed_form() const noexcept;
    [[nodiscard]] std::vector<double> theta_grid(int n) const;

    void validate() const;
};

/// Validates the problem and clamps a Pareto type support to theta <= 0.499
/// (finite variance), recording a warning.
[[nodiscard]] TypeProblem make_type_problem(ClaimDistribution claim, TypeDistribution prior, RiskAversionSpec gamma,
                                            MarketParams market);

constexpr double kParetoThetaCap = 0.499;

enum class CurveMethod { Ode, FixedPoint, ClosedForm, Auto };

[[nodiscard]] std::string_view to_string(CurveMethod m);
[[nodiscard]] CurveMethod parse_curve_method(std::string_view name);

/// Two parameterizations of the integration constant of the screening ODE:
/// Anchor is 1 + xi(theta_L); ExponentialClosedForm is the K of
/// xi = 1/(1 + gamma*theta - K*theta*exp(1/(gamma*theta))) - 1.
enum class ConstantScale { Anchor, ExponentialClosedForm };

struct LoadingConstant {
    ConstantScale scale = ConstantScale::Anchor;
    double value = 1.0;

    [[nodiscard]] static LoadingConstant anchor(double v) { return {ConstantScale::Anchor, v}; }
    [[nodiscard]] static LoadingConstant closed_form(double v) { return {ConstantScale::ExponentialClosedForm, v}; }
};

/// Anchor value 1 + xi(theta_L) of a constant on either scale.
[[nodiscard]] double anchor_value(const TypeProblem& p, const LoadingConstant& c);
/// Closed-form K equivalent to the anchor value (exponential, constant gamma).
[[nodiscard]] double closed_form_from_anchor(double gamma, double theta_low, double anchor);
[[nodiscard]] double anchor_from_closed_form(double gamma, double theta_low, double k);
/// xi = 1/(1 + gamma*theta - K*theta*exp(1/(gamma*theta))) - 1; throws InfeasibleError if the
/// denominator is not positive.
[[nodiscard]] double closed_form_loading(double gamma, double theta, double k);

struct CurveDiagnostics {
    int iterations = 0;
    double residual = 0.0;
    double contraction_estimate = 0.0;
    int refinement = 1;  ///< fine-grid points per base interval
};

struct LoadingCurve {
    std::vector<double> theta;
    std::vector<double> xi;
    LoadingConstant constant;
    double anchor = 1.0;  ///< 1 + xi(theta_L)
    CurveMethod method = CurveMethod::Ode;
    bool feasible = true;
    CurveDiagnostics diagnostics;
    std::vector<double> fine_theta;  ///< solver's dense sub-grid, contains theta
    std::vector<double> fine_xi;

    /// Cubic interpolation on the dense sub-grid.
    [[nodiscard]] double at(double t) const;
};

[[nodiscard]] double psi(const TypeProblem& p, double theta, double xi);
[[nodiscard]] double psi_theta(const TypeProblem& p, double theta, double xi);
[[nodiscard]] double phi(const TypeProblem& p, double theta, double xi);

[[nodiscard]] LoadingCurve solve_loading_curve(const TypeProblem& p, const LoadingConstant& c, CurveMethod method,
                                               const SolverConfig& cfg = {});

struct FeasibleInterval {
    ConstantScale scale = ConstantScale::Anchor;
    double lo = 1.0;
    double hi = 1.0;            ///< validated upper end (+inf when unbounded)
    bool hi_open = false;       ///< hi itself is not admissible
    double search_hi = 1.0;     ///< upper end used by the search (capped by max_loading)
};

/// Throws InfeasibleError ("no contract") when no admissible constant exists.
[[nodiscard]] FeasibleInterval feasible_C_interval(const TypeProblem& p, const SolverConfig& cfg = {});

/// E_G[ xi*SL(d) - (gamma_I/2)*SL2(d) ], d = xi/gamma(theta), by Simpson on the theta grid.
[[nodiscard]] double insurer_objective_type(const TypeProblem& p, const LoadingCurve& curve);
[[nodiscard]] double insurer_objective_type(const TypeProblem& p, const LoadingConstant& c,
                                            const SolverConfig& cfg = {}, CurveMethod method = CurveMethod::Auto);

struct TypeSolution {
    LoadingConstant c_star;
    LoadingCurve curve;
    double objective = 0.0;
    double insurer_value = 0.0;
    FeasibleInterval interval;
    bool boundary_optimum = false;
};

[[nodiscard]] TypeSolution solve_optimal_constant(const TypeProblem& p, const SolverConfig& cfg = {},
                                                  CurveMethod method = CurveMethod::Auto);

[[nodiscard]] ContractMenu build_menu_type(const TypeProblem& p, const LoadingCurve& curve);

/// Smallest root of d = ((1+xi(theta~))/gamma * S(d;theta~)/S(d;theta) - 1/gamma)_+.
[[nodiscard]] double misreport_deductible(const TypeProblem& p, const LoadingCurve& curve, double theta,
                                          double theta_tilde, const SolverConfig& cfg = {});
[[nodiscard]] double customer_value_type(const TypeProblem& p, const LoadingCurve& curve, double theta,
                                         double theta_tilde, const SolverConfig& cfg = {});
/// Truthful value evaluated directly at d = xi(theta)/gamma(theta).
[[nodiscard]] double truthful_value_type(const TypeProblem& p, const LoadingCurve& curve, double theta);
[[nodiscard]] double no_insurance_value_type(const TypeProblem& p, double theta);

[[nodiscard]] TruthTellingReport verify_truth_telling_type(const TypeProblem& p, const LoadingCurve& curve, int n,
                                                           const SolverConfig& cfg = {});

struct AssumptionBounds {
    double K = 0.0;
    double M = 0.0;
    bool contraction_ok = false;
    bool positivity_ok = false;
};

[[nodiscard]] AssumptionBounds check_assumptions(const TypeProblem& p, double xi0, const SolverConfig& cfg = {});

/// Unrestricted pointwise optimal coverage (diagnostic).
[[nodiscard]] double general_coverage(const TypeProblem& p, double y, double theta, double theta_tilde,
                                      double xi_tilde);

/// sup |xi' Psi + (1 + xi) Psi_theta| on the curve's dense sub-grid.
[[nodiscard]] double ode_residual(const TypeProblem& p, const LoadingCurve& curve);

}  // namespace screening
