#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "screening/contract.hpp"
#include "screening/distributions.hpp"

namespace screening {

struct SimConfig {
    std::size_t n_paths = 100000;
    std::uint64_t seed = 42;
    double horizon = 1.0;
    double lambda = 1.0;

    void validate() const;
};

/// Sample moments of one terminal surplus with delta-method standard errors.
struct MomentSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  ///< second central moment
    double m3 = 0.0;        ///< third central moment
    double m4 = 0.0;        ///< fourth central moment

    [[nodiscard]] double se_mean() const;
    [[nodiscard]] double se_variance() const;
    /// mean - (gamma/2) * variance
    [[nodiscard]] double mv_value(double gamma) const;
    [[nodiscard]] double mv_standard_error(double gamma) const;
};

[[nodiscard]] MomentSummary summarize(const std::vector<double>& xs);

struct PathOutcome {
    double customer = 0.0;      ///< X_C(T)
    double insurer = 0.0;       ///< X_I(T)
    double total_claims = 0.0;  ///< sum of Y_i
};

struct SimResult {
    MomentSummary customer;
    MomentSummary insurer;
    double max_conservation_error = 0.0;  ///< max |X_C + X_I - (x_C + x_I - sum Y)|
};

/// Terminal surpluses per path; path i draws from its own substream of cfg.seed.
[[nodiscard]] std::vector<PathOutcome> simulate_paths(const Contract& contract, const ClaimDistribution& claim,
                                                      const SimConfig& cfg, double x_customer, double x_insurer);

[[nodiscard]] SimResult simulate(const Contract& contract, const ClaimDistribution& claim, const SimConfig& cfg,
                                 double x_customer, double x_insurer);

struct AnalyticValues {
    double customer = 0.0;
    double insurer = 0.0;
};

/// Closed-form mean–variance values of both parties under a contract.
[[nodiscard]] AnalyticValues analytic_values(const Contract& contract, const ClaimDistribution& claim, double gamma,
                                             double gamma_insurer, double lambda, double horizon, double x_customer,
                                             double x_insurer);

struct ValidationReport {
    AnalyticValues analytic;
    double simulated_customer = 0.0;
    double simulated_insurer = 0.0;
    double se_customer = 0.0;
    double se_insurer = 0.0;
    double z_customer = 0.0;
    double z_insurer = 0.0;
    double max_conservation_error = 0.0;
    bool passed = false;
};

[[nodiscard]] ValidationReport validate_analytic(const Contract& contract, const ClaimDistribution& claim, double gamma,
                                                 double gamma_insurer, const SimConfig& cfg, double x_customer,
                                                 double x_insurer, double z_limit = 4.0);

}  // namespace screening
