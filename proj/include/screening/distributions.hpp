#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <initializer_list>
#include <vector>

namespace screening {

using Rng = std::mt19937_64;

enum class ClaimFamily {
    ExponentialMean,      ///< Exp with mean theta
    ParetoShapeInvTheta,  ///< Pareto with shape 1/theta and scale y_m
    UniformOnZeroTheta,   ///< Uniform(0, theta)
    ExponentialFixed,     ///< Exp with a fixed mean
    ParetoFixed,          ///< Pareto with fixed shape and scale
};

[[nodiscard]] std::string_view to_string(ClaimFamily f);
[[nodiscard]] ClaimFamily parse_claim_family(std::string_view name);

/// Single-claim law F(y; theta) with its stop-loss transforms.
/// Immutable; construct through the named factories.
class ClaimDistribution {
public:
    [[nodiscard]] static ClaimDistribution exponential_mean(double theta);
    [[nodiscard]] static ClaimDistribution pareto_shape_inv_theta(double theta, double scale);
    [[nodiscard]] static ClaimDistribution uniform_on_zero_theta(double theta);
    [[nodiscard]] static ClaimDistribution exponential_fixed(double mean);
    [[nodiscard]] static ClaimDistribution pareto_fixed(double shape, double scale);

    /// Same theta-indexed family at another theta.
    [[nodiscard]] ClaimDistribution with_theta(double theta) const;

    [[nodiscard]] ClaimFamily family() const noexcept { return family_; }
    [[nodiscard]] std::span<const double> params() const noexcept { return {params_.data(), n_params_}; }
    [[nodiscard]] std::optional<double> theta() const noexcept { return theta_; }
    [[nodiscard]] bool theta_indexed() const noexcept;

    [[nodiscard]] double cdf(double y) const;
    [[nodiscard]] double survival(double y) const;
    [[nodiscard]] double pdf(double y) const;
    [[nodiscard]] double quantile(double u) const;
    [[nodiscard]] double sample(Rng& rng) const;

    /// d/dtheta F(y; theta); throws UnsupportedOperation for fixed families.
    [[nodiscard]] double dtheta_cdf(double y) const;

    [[nodiscard]] double support_lower() const noexcept;
    [[nodiscard]] double support_upper() const noexcept;

    [[nodiscard]] double mean() const;
    [[nodiscard]] double second_moment() const;

    /// E[(Y - d)_+]. Negative d is accepted and gives E[Y] - d.
    [[nodiscard]] double stop_loss(double d) const;
    /// E[(Y - d)_+^2] for d >= 0.
    [[nodiscard]] double stop_loss_sq(double d) const;
    /// E[(Y ^ d)^2].
    [[nodiscard]] double capped_sq_moment(double d) const;
    /// E[Y ^ d] = E[Y] - stop_loss(d).
    [[nodiscard]] double limited_mean(double d) const;

    /// -int_d^inf dF/dtheta(y) dy, the theta-sensitivity of the stop-loss transform.
    [[nodiscard]] double stop_loss_dtheta(double d) const;
    /// stop_loss_dtheta(d) / stop_loss(d), with 0/0 read as 0 for quadrature families.
    [[nodiscard]] double stop_loss_log_sensitivity(double d) const;

    [[nodiscard]] std::string describe() const;

    static constexpr double kQuadTol = 1e-12;

private:
    ClaimDistribution(ClaimFamily family, std::initializer_list<double> params, std::optional<double> theta);

    [[nodiscard]] double pareto_shape() const noexcept;
    [[nodiscard]] double pareto_scale() const noexcept;
    [[nodiscard]] double exp_mean() const noexcept;

    ClaimFamily family_;
    std::array<double, 2> params_{};
    std::size_t n_params_ = 0;
    std::optional<double> theta_;
};

enum class PriorFamily { Uniform, TruncatedNormal, PointMass };

[[nodiscard]] std::string_view to_string(PriorFamily f);
[[nodiscard]] PriorFamily parse_prior_family(std::string_view name);

/// Prior G over a hidden scalar (risk aversion or risk type).
class TypeDistribution {
public:
    [[nodiscard]] static TypeDistribution uniform(double low, double high);
    [[nodiscard]] static TypeDistribution truncated_normal(double loc, double scale, double low, double high);
    [[nodiscard]] static TypeDistribution point_mass(double atom);

    [[nodiscard]] PriorFamily family() const noexcept { return family_; }
    [[nodiscard]] double low() const noexcept { return low_; }
    [[nodiscard]] double high() const noexcept { return high_; }
    [[nodiscard]] double loc() const noexcept { return loc_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }
    [[nodiscard]] double atom() const noexcept { return low_; }
    [[nodiscard]] bool degenerate() const noexcept { return family_ == PriorFamily::PointMass || low_ == high_; }

    /// Density on [low, high]; zero outside. Undefined for point masses.
    [[nodiscard]] double density(double x) const;
    [[nodiscard]] double mean() const;

    /// Same family restricted to [low, high] intersected with the current support.
    [[nodiscard]] TypeDistribution clamped(double low, double high) const;

    [[nodiscard]] std::string describe() const;

private:
    TypeDistribution(PriorFamily family, double low, double high, double loc, double scale);

    PriorFamily family_;
    double low_;
    double high_;
    double loc_;
    double scale_;
    double norm_ = 1.0;
};

/// int h dG by 64-node Gauss–Legendre, or evaluation at the atom.
[[nodiscard]] double prior_expectation(const TypeDistribution& g, const std::function<double(double)>& h);

enum class RiskAversionForm { Constant, LinearInTheta, InverseInTheta };

[[nodiscard]] std::string_view to_string(RiskAversionForm f);
[[nodiscard]] RiskAversionForm parse_risk_aversion_form(std::string_view name);

/// gamma(theta) = c, a*theta or a/theta.
struct RiskAversionSpec {
    RiskAversionForm form = RiskAversionForm::Constant;
    double coefficient = 1.0;

    [[nodiscard]] double operator()(double theta) const;
    [[nodiscard]] bool nondecreasing() const noexcept { return form != RiskAversionForm::InverseInTheta; }
    [[nodiscard]] std::string describe() const;
};

}  // namespace screening
