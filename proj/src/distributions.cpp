#include "screening/distributions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "screening/errors.hpp"
#include "screening/numerics.hpp"

namespace screening {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string normalized(std::string_view name) {
    std::string out;
    for (char c : name) {
        if (c == '_' || c == '-' || c == ' ') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << what << " must be positive and finite (got " << v << ")";
        throw ParameterError(msg.str());
    }
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

std::string_view to_string(ClaimFamily f) {
    switch (f) {
        case ClaimFamily::ExponentialMean: return "exponential_mean";
        case ClaimFamily::ParetoShapeInvTheta: return "pareto_shape_inv_theta";
        case ClaimFamily::UniformOnZeroTheta: return "uniform_on_zero_theta";
        case ClaimFamily::ExponentialFixed: return "exponential_fixed";
        case ClaimFamily::ParetoFixed: return "pareto_fixed";
    }
    return "unknown";
}

ClaimFamily parse_claim_family(std::string_view name) {
    const std::string n = normalized(name);
    if (n == "exponentialmean") return ClaimFamily::ExponentialMean;
    if (n == "paretoshapeinvtheta") return ClaimFamily::ParetoShapeInvTheta;
    if (n == "uniformonzerotheta") return ClaimFamily::UniformOnZeroTheta;
    if (n == "exponentialfixed") return ClaimFamily::ExponentialFixed;
    if (n == "paretofixed") return ClaimFamily::ParetoFixed;
    throw ParameterError("unknown claim family '" + std::string(name) + "'");
}

ClaimDistribution::ClaimDistribution(ClaimFamily family, std::initializer_list<double> params,
                                     std::optional<double> theta)
    : family_(family), n_params_(params.size()), theta_(theta) {
    std::copy(params.begin(), params.end(), params_.begin());
}

ClaimDistribution ClaimDistribution::exponential_mean(double theta) {
    require_positive(theta, "exponential_mean: theta");
    return {ClaimFamily::ExponentialMean, {}, theta};
}

ClaimDistribution ClaimDistribution::pareto_shape_inv_theta(double theta, double scale) {
    require_positive(theta, "pareto_shape_inv_theta: theta");
    require_positive(scale, "pareto_shape_inv_theta: scale");
    return {ClaimFamily::ParetoShapeInvTheta, {scale}, theta};
}

ClaimDistribution ClaimDistribution::uniform_on_zero_theta(double theta) {
    require_positive(theta, "uniform_on_zero_theta: theta");
    return {ClaimFamily::UniformOnZeroTheta, {}, theta};
}

ClaimDistribution ClaimDistribution::exponential_fixed(double mean) {
    require_positive(mean, "exponential_fixed: mean");
    return {ClaimFamily::ExponentialFixed, {mean}, std::nullopt};
}

ClaimDistribution ClaimDistribution::pareto_fixed(double shape, double scale) {
    require_positive(shape, "pareto_fixed: shape");
    require_positive(scale, "pareto_fixed: scale");
    return {ClaimFamily::ParetoFixed, {shape, scale}, std::nullopt};
}

ClaimDistribution ClaimDistribution::with_theta(double theta) const {
    switch (family_) {
        case ClaimFamily::ExponentialMean: return exponential_mean(theta);
        case ClaimFamily::ParetoShapeInvTheta: return pareto_shape_inv_theta(theta, params_[0]);
        case ClaimFamily::UniformOnZeroTheta: return uniform_on_zero_theta(theta);
        default: throw UnsupportedOperation("with_theta: " + std::string(to_string(family_)) + " is not theta-indexed");
    }
}

bool ClaimDistribution::theta_indexed() const noexcept {
    return family_ == ClaimFamily::ExponentialMean || family_ == ClaimFamily::ParetoShapeInvTheta ||
           family_ == ClaimFamily::UniformOnZeroTheta;
}

double ClaimDistribution::pareto_shape() const noexcept {
    return family_ == ClaimFamily::ParetoFixed ? params_[0] : 1.0 / *theta_;
}

double ClaimDistribution::pareto_scale() const noexcept {
    return family_ == ClaimFamily::ParetoFixed ? params_[1] : params_[0];
}

double ClaimDistribution::exp_mean() const noexcept {
    return family_ == ClaimFamily::ExponentialFixed ? params_[0] : *theta_;
}

double ClaimDistribution::support_lower() const noexcept {
    switch (family_) {
        case ClaimFamily::ParetoFixed:
        case ClaimFamily::ParetoShapeInvTheta: return pareto_scale();
        default: return 0.0;
    }
}

double ClaimDistribution::support_upper() const noexcept {
    return family_ == ClaimFamily::UniformOnZeroTheta ? *theta_ : kInf;
}

double ClaimDistribution::cdf(double y) const {
    if (y < 0.0) return 0.0;
    switch (family_) {
        case ClaimFamily::ExponentialMean:
        case ClaimFamily::ExponentialFixed: return -std::expm1(-y / exp_mean());
        case ClaimFamily::ParetoShapeInvTheta:
        case ClaimFamily::ParetoFixed: {
            const double ym = pareto_scale();
            return y <= ym ? 0.0 : 1.0 - std::pow(ym / y, pareto_shape());
        }
        case ClaimFamily::UniformOnZeroTheta: return std::min(y / *theta_, 1.0);
    }
    return 0.0;
}

double ClaimDistribution::survival(double y) const {
    if (y < 0.0) return 1.0;
    switch (family_) {
        case ClaimFamily::ExponentialMean:
        case ClaimFamily::ExponentialFixed: return std::exp(-y / exp_mean());
        case ClaimFamily::ParetoShapeInvTheta:
        case ClaimFamily::ParetoFixed: {
            const double ym = pareto_scale();
            return y <= ym ? 1.0 : std::pow(ym / y, pareto_shape());
        }
        case ClaimFamily::UniformOnZeroTheta: return std::max(1.0 - y / *theta_, 0.0);
    }
    return 1.0;
}

double ClaimDistribution::pdf(double y) const {
    if (y < 0.0) return 0.0;
    switch (family_) {
        case ClaimFamily::ExponentialMean:
        case ClaimFamily::ExponentialFixed: {
            const double mu = exp_mean();
            return std::exp(-y / mu) / mu;
        }
        case ClaimFamily::ParetoShapeInvTheta:
        case ClaimFamily::ParetoFixed: {
            const double ym = pareto_scale();
            const double a = pareto_shape();
            return y < ym ? 0.0 : a / y * std::pow(ym / y, a);
        }
        case ClaimFamily::UniformOnZeroTheta: return y <= *theta_ ? 1.0 / *theta_ : 0.0;
    }
    return 0.0;
}

double ClaimDistribution::quantile(double u) const {
    if (!(u >= 0.0 && u <= 1.0)) throw ParameterError("quantile: u must lie in [0, 1]");
    switch (family_) {
        case ClaimFamily::ExponentialMean:
        case ClaimFamily::ExponentialFixed: return u == 1.0 ? kInf : -exp_mean() * std::log1p(-u);
        case ClaimFamily::ParetoShapeInvTheta:
        case ClaimFamily::ParetoFixed:
            return u == 1.0 ? kInf : pareto_scale() * std::pow(1.0 - u, -1.0 / pareto_shape());
        case ClaimFamily::UniformOnZeroTheta: return u * *theta_;
    }
    return 0.0;
}

double ClaimDistribution::sample(Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    return quantile(unif(rng));
}

double ClaimDistribution::dtheta_cdf(double y) const {
    if (!theta_indexed()) {
        throw UnsupportedOperation("dtheta_cdf: " + std::string(to_string(family_)) + " is not theta-indexed");
    }
    const double th = *theta_;
    if (y <= 0.0) return 0.0;
    switch (family_) {
        case ClaimFamily::ExponentialMean: return -y / (th * th) * std::exp(-y / th);
        case ClaimFamily::ParetoShapeInvTheta: {
            const double ym = params_[0];
            if (y <= ym) return 0.0;
            const double r = ym / y;
            return std::pow(r, 1.0 / th) * std::log(r) / (th * th);
        }
        case ClaimFamily::UniformOnZeroTheta: return y <= th ? -y / (th * th) : 0.0;
        default: break;
    }
    return 0.0;
}

double ClaimDistribution::mean() const {
    switch (family_) {
        case ClaimFamily::ExponentialMean:
        case ClaimFamily::ExponentialFixed: return exp_mean();
        case ClaimFamily::ParetoShapeInvTheta:
        case ClaimFamily::ParetoFixed: {
            const double a = pareto_shape();
            if (a <= 1.0) throw MomentError("mean: Pareto shape <= 1 has an infinite mean");
            return a * pareto_scale() / (a - 1.0);
        }
        case ClaimFamily::UniformOnZeroTheta: return 0.5 * *theta_;
    }
    return 0.0;
}

double ClaimDistribution::second_moment() const {
    switch (family_) {
        case ClaimFamily::ExponentialMean:
        case ClaimFamily::ExponentialFixed: {
            const double mu = exp_mean();
            return 2.0 * mu * mu;
        }
        case ClaimFamily::ParetoShapeInvTheta:
        case ClaimFamily::ParetoFixed: {
            const double a = pareto_shape();
            if (a <= 2.0) throw MomentError("second_moment: Pareto shape <= 2 has an infinite second moment");
            const double ym = pareto_scale();
            return a * ym * ym / (a - 2.0);
        }
        case ClaimFamily::UniformOnZeroTheta: return *theta_ * *theta_ / 3.0;
    }
    return 0.0;
}

double ClaimDistribution::stop_loss(double d) const {
    if (std::isnan(d)) throw ParameterError("stop_loss: deductible is NaN");
    if (d == kInf) return 0.0;
    switch (family_) {
        case ClaimFamily::ExponentialMean:
        case ClaimFamily::ExponentialFixed: {
            const double mu = exp_mean();
            return d >= 0.0 ? mu * std::exp(-d / mu) : mu - d;
        }
        case ClaimFamily::ParetoShapeInvTheta:
        case ClaimFamily::ParetoFixed: {
            const double a = pareto_shape();
            const double ym = pareto_scale();
            if (a <= 1.0) throw MomentError("stop_loss: Pareto shape <= 1 has an infinite mean");
            if (d < ym) return mean() - d;
            return d * std::pow(ym / d, a) / (a - 1.0);
        }
        case ClaimFamily::UniformOnZeroTheta: {
            const double th = *theta_;
            const double lo = std::max(d, 0.0);
            const double shift = d < 0.0 ? -d : 0.0;
            if (lo >= th) return shift;
            return shift + integrate([this](double y) { return survival(y); }, lo, th, kQuadTol);
        }
    }
    return 0.0;
}

double ClaimDistribution::stop_loss_sq(double d) const {
    if (std::isnan(d)) throw ParameterError("stop_loss_sq: deductible is NaN");
    if (d == kInf) {
        (void)second_moment();
        return 0.0;
    }
    switch (family_) {
        case ClaimFamily::ExponentialMean:
        case ClaimFamily::ExponentialFixed: {
            const double mu = exp_mean();
            if (d >= 0.0) return 2.0 * mu * mu * std::exp(-d / mu);
            return 2.0 * mu * mu - 2.0 * d * mu + d * d;
        }
        case ClaimFamily::ParetoShapeInvTheta:
        case ClaimFamily::ParetoFixed: {
            const double a = pareto_shape();
            const double ym = pareto_scale();
            if (a <= 2.0) throw MomentError("stop_loss_sq: Pareto shape <= 2 has an infinite second moment");
            if (d < ym) return second_moment() - 2.0 * d * mean() + d * d;
            return 2.0 * d * d * std::pow(ym / d, a) / ((a - 1.0) * (a - 2.0));
        }
        case ClaimFamily::UniformOnZeroTheta: {
            const double th = *theta_;
            if (d < 0.0) return second_moment() - 2.0 * d * mean() + d * d;
            if (d >= th) return 0.0;
            return integrate([this, d](double y) { return 2.0 * (y - d) * survival(y); }, d, th, kQuadTol);
        }
    }
    return 0.0;
}

double ClaimDistribution::capped_sq_moment(double d) const {
    if (std::isnan(d)) throw ParameterError("capped_sq_moment: deductible is NaN");
    if (d <= 0.0) return 0.0;
    if (d == kInf) return second_moment();
    switch (family_) {
        case ClaimFamily::ExponentialMean:
        case ClaimFamily::ExponentialFixed: {
            const double mu = exp_mean();
            const double x = d / mu;
            return 2.0 * mu * mu * (-std::expm1(-x) - x * std::exp(-x));
        }
        case ClaimFamily::ParetoShapeInvTheta:
        case ClaimFamily::ParetoFixed: {
            const double a = pareto_shape();
            const double ym = pareto_scale();
            if (d <= ym) return d * d;
            if (std::abs(a - 2.0) < 1e-12) return ym * ym * (1.0 + 2.0 * std::log(d / ym));
            return ym * ym + 2.0 * (d * d * std::pow(ym / d, a) - ym * ym) / (2.0 - a);
        }
        case ClaimFamily::UniformOnZeroTheta: {
            const double hi = std::min(d, *theta_);
            return integrate([this](double y) { return 2.0 * y * survival(y); }, 0.0, hi, kQuadTol);
        }
    }
    return 0.0;
}

double ClaimDistribution::limited_mean(double d) const {
    if (std::isnan(d)) throw ParameterError("limited_mean: deductible is NaN");
    if (d <= 0.0) return d < 0.0 ? d : 0.0;
    if (d == kInf) return mean();
    switch (family_) {
        case ClaimFamily::ExponentialMean:
        case ClaimFamily::ExponentialFixed: {
            const double mu = exp_mean();
            return -mu * std::expm1(-d / mu);
        }
        case ClaimFamily::ParetoShapeInvTheta:
        case ClaimFamily::ParetoFixed: {
            const double a = pareto_shape();
            const double ym = pareto_scale();
            if (d <= ym) return d;
            if (std::abs(a - 1.0) < 1e-12) return ym * (1.0 + std::log(d / ym));
            return ym + (d * std::pow(ym / d, a) - ym) / (1.0 - a);
        }
        case ClaimFamily::UniformOnZeroTheta: {
            const double hi = std::min(d, *theta_);
            return integrate([this](double y) { return survival(y); }, 0.0, hi, kQuadTol);
        }
    }
    return 0.0;
}

double ClaimDistribution::stop_loss_dtheta(double d) const {
    if (!theta_indexed()) {
        throw UnsupportedOperation("stop_loss_dtheta: " + std::string(to_string(family_)) + " is not theta-indexed");
    }
    const double th = *theta_;
    const double lo = std::max(d, 0.0);
    switch (family_) {
        case ClaimFamily::ExponentialMean: {
            const double x = lo / th;
            return (1.0 + x) * std::exp(-x);
        }
        case ClaimFamily::ParetoShapeInvTheta: {
            const double a = 1.0 / th;
            if (a <= 1.0) throw MomentError("stop_loss_dtheta: Pareto shape <= 1 has an infinite mean");
            const double ym = params_[0];
            const double t = std::max(lo, ym) / ym;
            const double am1 = a - 1.0;
            return ym / (th * th) * std::pow(t, -am1) * (std::log(t) / am1 + 1.0 / (am1 * am1));
        }
        case ClaimFamily::UniformOnZeroTheta: {
            if (lo >= th) return 0.0;
            return integrate([this](double y) { return -dtheta_cdf(y); }, lo, th, kQuadTol);
        }
        default: break;
    }
    return 0.0;
}

double ClaimDistribution::stop_loss_log_sensitivity(double d) const {
    if (!theta_indexed()) {
        throw UnsupportedOperation("stop_loss_log_sensitivity: " + std::string(to_string(family_)) +
                                   " is not theta-indexed");
    }
    const double th = *theta_;
    switch (family_) {
        case ClaimFamily::ExponentialMean: return d >= 0.0 ? (1.0 + d / th) / th : 1.0 / (th - d);
        case ClaimFamily::ParetoShapeInvTheta: {
            const double ym = params_[0];
            if (d >= ym) {
                const double a = 1.0 / th;
                if (a <= 1.0) throw MomentError("stop_loss_log_sensitivity: Pareto shape <= 1");
                return (std::log(d / ym) + 1.0 / (a - 1.0)) / (th * th);
            }
            return stop_loss_dtheta(d) / stop_loss(d);
        }
        case ClaimFamily::UniformOnZeroTheta:
            if (d >= th) return 0.0;
            return d >= 0.0 ? (th + d) / (th * (th - d)) : 1.0 / (th - 2.0 * d);
        default: break;
    }
    const double psi = stop_loss(d);
    const double psi_t = stop_loss_dtheta(d);
    if (psi < 1e-14) {
        if (psi_t <= 1e-14) return 0.0;
        std::ostringstream msg;
        msg << "log sensitivity singular at d = " << d << " (stop-loss " << psi << ", theta-sensitivity " << psi_t
            << ")";
        throw NumericError(msg.str());
    }
    return psi_t / psi;
}

std::string ClaimDistribution::describe() const {
    std::ostringstream os;
    os << to_string(family_) << "(";
    switch (family_) {
        case ClaimFamily::ExponentialMean: os << "theta=" << *theta_; break;
        case ClaimFamily::ParetoShapeInvTheta: os << "theta=" << *theta_ << ", scale=" << params_[0]; break;
        case ClaimFamily::UniformOnZeroTheta: os << "theta=" << *theta_; break;
        case ClaimFamily::ExponentialFixed: os << "mean=" << params_[0]; break;
        case ClaimFamily::ParetoFixed: os << "shape=" << params_[0] << ", scale=" << params_[1]; break;
    }
    os << ")";
    return os.str();
}

std::string_view to_string(PriorFamily f) {
    switch (f) {
        case PriorFamily::Uniform: return "uniform";
        case PriorFamily::TruncatedNormal: return "truncated_normal";
        case PriorFamily::PointMass: return "point_mass";
    }
    return "unknown";
}

PriorFamily parse_prior_family(std::string_view name) {
    const std::string n = normalized(name);
    if (n == "uniform") return PriorFamily::Uniform;
    if (n == "truncatednormal" || n == "truncnorm") return PriorFamily::TruncatedNormal;
    if (n == "pointmass") return PriorFamily::PointMass;
    throw ParameterError("unknown prior family '" + std::string(name) + "'");
}

TypeDistribution::TypeDistribution(PriorFamily family, double low, double high, double loc, double scale)
    : family_(family), low_(low), high_(high), loc_(loc), scale_(scale) {
    if (!std::isfinite(low) || !std::isfinite(high) || low > high) {
        throw ParameterError("prior support must satisfy low <= high (finite)");
    }
    if (family == PriorFamily::TruncatedNormal) {
        require_positive(scale, "truncated_normal: scale");
        norm_ = normal_cdf((high - loc) / scale) - normal_cdf((low - loc) / scale);
        if (!(norm_ > 0.0)) throw ParameterError("truncated_normal: no mass on the truncation interval");
    }
}

TypeDistribution TypeDistribution::uniform(double low, double high) {
    return {PriorFamily::Uniform, low, high, 0.0, 0.0};
}

TypeDistribution TypeDistribution::truncated_normal(double loc, double scale, double low, double high) {
    return {PriorFamily::TruncatedNormal, low, high, loc, scale};
}

TypeDistribution TypeDistribution::point_mass(double atom) {
    return {PriorFamily::PointMass, atom, atom, atom, 0.0};
}

double TypeDistribution::density(double x) const {
    if (degenerate()) throw UsageError("density: prior is degenerate");
    if (x < low_ || x > high_) return 0.0;
    if (family_ == PriorFamily::Uniform) return 1.0 / (high_ - low_);
    const double z = (x - loc_) / scale_;
    return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * scale_ * norm_);
}

double TypeDistribution::mean() const {
    return prior_expectation(*this, [](double x) { return x; });
}

TypeDistribution TypeDistribution::clamped(double low, double high) const {
    const double lo = std::max(low, low_);
    const double hi = std::min(high, high_);
    if (lo > hi) throw ParameterError("clamped: empty support");
    switch (family_) {
        case PriorFamily::Uniform: return uniform(lo, hi);
        case PriorFamily::TruncatedNormal: return truncated_normal(loc_, scale_, lo, hi);
        case PriorFamily::PointMass: return *this;
    }
    return *this;
}

std::string TypeDistribution::describe() const {
    std::ostringstream os;
    switch (family_) {
        case PriorFamily::Uniform: os << "Uniform[" << low_ << ", " << high_ << "]"; break;
        case PriorFamily::TruncatedNormal:
            os << "TruncatedNormal(" << loc_ << ", " << scale_ << ") on [" << low_ << ", " << high_ << "]";
            break;
        case PriorFamily::PointMass: os << "PointMass(" << low_ << ")"; break;
    }
    return os.str();
}

double prior_expectation(const TypeDistribution& g, const std::function<double(double)>& h) {
    if (g.degenerate()) return h(g.low());
    const GaussRule& rule = gauss_legendre(64);
    const double half = 0.5 * (g.high() - g.low());
    const double mid = 0.5 * (g.high() + g.low());
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = mid + half * rule.nodes[i];
        const double v = h(x) * g.density(x);
        if (!std::isfinite(v)) throw NumericError("prior_expectation: non-finite integrand");
        sum += rule.weights[i] * v;
    }
    return sum * half;
}

std::string_view to_string(RiskAversionForm f) {
    switch (f) {
        case RiskAversionForm::Constant: return "constant";
        case RiskAversionForm::LinearInTheta: return "linear_in_theta";
        case RiskAversionForm::InverseInTheta: return "inverse_in_theta";
    }
    return "unknown";
}

RiskAversionForm parse_risk_aversion_form(std::string_view name) {
    const std::string n = normalized(name);
    if (n == "constant") return RiskAversionForm::Constant;
    if (n == "linearintheta" || n == "linear") return RiskAversionForm::LinearInTheta;
    if (n == "inverseintheta" || n == "inverse") return RiskAversionForm::InverseInTheta;
    throw ParameterError("unknown risk-aversion form '" + std::string(name) + "'");
}

double RiskAversionSpec::operator()(double theta) const {
    switch (form) {
        case RiskAversionForm::Constant: return coefficient;
        case RiskAversionForm::LinearInTheta: return coefficient * theta;
        case RiskAversionForm::InverseInTheta: return coefficient / theta;
    }
    return coefficient;
}

std::string RiskAversionSpec::describe() const {
    std::ostringstream os;
    switch (form) {
        case RiskAversionForm::Constant: os << coefficient; break;
        case RiskAversionForm::LinearInTheta: os << coefficient << "*theta"; break;
        case RiskAversionForm::InverseInTheta: os << coefficient << "/theta"; break;
    }
    return os.str();
}

}  // namespace screening
