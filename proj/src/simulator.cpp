#include "screening/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "screening/errors.hpp"

namespace screening {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double z_score(double sim, double analytic, double se) {
    const double diff = sim - analytic;
    if (se > 0.0) return diff / se;
    return std::abs(diff) <= 1e-12 * (1.0 + std::abs(analytic)) ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

void SimConfig::validate() const {
    if (n_paths < 1) throw ParameterError("simulation: n_paths must be >= 1");
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw ParameterError("simulation: horizon must be >= 0");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("simulation: lambda must be >= 0");
}

double MomentSummary::se_mean() const { return n > 0 ? std::sqrt(variance / static_cast<double>(n)) : 0.0; }

double MomentSummary::se_variance() const {
    return n > 0 ? std::sqrt(std::max(m4 - variance * variance, 0.0) / static_cast<double>(n)) : 0.0;
}

double MomentSummary::mv_value(double gamma) const { return mean - 0.5 * gamma * variance; }

double MomentSummary::mv_standard_error(double gamma) const {
    if (n == 0) return 0.0;
    const double v = variance - gamma * m3 + 0.25 * gamma * gamma * (m4 - variance * variance);
    return std::sqrt(std::max(v, 0.0) / static_cast<double>(n));
}

MomentSummary summarize(const std::vector<double>& xs) {
    MomentSummary s;
    s.n = xs.size();
    if (xs.empty()) return s;
    CompensatedSum sum;
    for (double x : xs) sum.add(x);
    s.mean = sum.value() / static_cast<double>(s.n);
    CompensatedSum c2;
    CompensatedSum c3;
    CompensatedSum c4;
    for (double x : xs) {
        const double e = x - s.mean;
        const double e2 = e * e;
        c2.add(e2);
        c3.add(e2 * e);
        c4.add(e2 * e2);
    }
    const auto n = static_cast<double>(s.n);
    s.variance = c2.value() / n;
    s.m3 = c3.value() / n;
    s.m4 = c4.value() / n;
    return s;
}

std::vector<PathOutcome> simulate_paths(const Contract& contract, const ClaimDistribution& claim,
                                        const SimConfig& cfg, double x_customer, double x_insurer) {
    cfg.validate();
    const double rate = cfg.lambda * cfg.horizon;
    const double premium = contract.premium_rate * cfg.horizon;
    const double d = contract.deductible;
    std::vector<PathOutcome> out(cfg.n_paths);
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
        Rng rng(splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(i))));
        long count = 0;
        if (rate > 0.0) count = std::poisson_distribution<long>(rate)(rng);
        CompensatedSum retained;
        CompensatedSum ceded;
        CompensatedSum total;
        for (long k = 0; k < count; ++k) {
            const double y = claim.sample(rng);
            const double r = std::min(y, d);
            retained.add(r);
            ceded.add(y - r);
            total.add(y);
        }
        PathOutcome& o = out[i];
        o.customer = x_customer - premium - retained.value();
        o.insurer = x_insurer + premium - ceded.value();
        o.total_claims = total.value();
    }
    return out;
}

SimResult simulate(const Contract& contract, const ClaimDistribution& claim, const SimConfig& cfg, double x_customer,
                   double x_insurer) {
    const std::vector<PathOutcome> paths = simulate_paths(contract, claim, cfg, x_customer, x_insurer);
    std::vector<double> c(paths.size());
    std::vector<double> ins(paths.size());
    SimResult res;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        c[i] = paths[i].customer;
        ins[i] = paths[i].insurer;
        const double err = std::abs(c[i] + ins[i] - (x_customer + x_insurer - paths[i].total_claims));
        res.max_conservation_error = std::max(res.max_conservation_error, err);
    }
    res.customer = summarize(c);
    res.insurer = summarize(ins);
    return res;
}

AnalyticValues analytic_values(const Contract& contract, const ClaimDistribution& claim, double gamma,
                               double gamma_insurer, double lambda, double horizon, double x_customer,
                               double x_insurer) {
    const double lt = lambda * horizon;
    const double d = contract.deductible;
    const double pt = contract.premium_rate * horizon;
    AnalyticValues v;
    v.customer = x_customer - pt - lt * claim.limited_mean(d) - 0.5 * gamma * lt * claim.capped_sq_moment(d);
    v.insurer = x_insurer + pt - lt * claim.stop_loss(d) - 0.5 * gamma_insurer * lt * claim.stop_loss_sq(d);
    return v;
}

ValidationReport validate_analytic(const Contract& contract, const ClaimDistribution& claim, double gamma,
                                   double gamma_insurer, const SimConfig& cfg, double x_customer, double x_insurer,
                                   double z_limit) {
    ValidationReport r;
    r.analytic = analytic_values(contract, claim, gamma, gamma_insurer, cfg.lambda, cfg.horizon, x_customer, x_insurer);
    const SimResult sim = simulate(contract, claim, cfg, x_customer, x_insurer);
    r.simulated_customer = sim.customer.mv_value(gamma);
    r.simulated_insurer = sim.insurer.mv_value(gamma_insurer);
    r.se_customer = sim.customer.mv_standard_error(gamma);
    r.se_insurer = sim.insurer.mv_standard_error(gamma_insurer);
    r.z_customer = z_score(r.simulated_customer, r.analytic.customer, r.se_customer);
    r.z_insurer = z_score(r.simulated_insurer, r.analytic.insurer, r.se_insurer);
    r.max_conservation_error = sim.max_conservation_error;
    r.passed = std::abs(r.z_customer) <= z_limit && std::abs(r.z_insurer) <= z_limit &&
               r.max_conservation_error <= 1e-10;
    return r;
}

}  // namespace screening
