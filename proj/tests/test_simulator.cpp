#include <doctest.h>

#include <cmath>

#include "screening/errors.hpp"
#include "screening/simulator.hpp"

using namespace screening;

namespace {

Contract make_contract(const ClaimDistribution& f, double d, double xi, double lambda = 1.0) {
    return {d, xi, (1.0 + xi) * lambda * f.stop_loss(d)};
}

}  // namespace

TEST_CASE("summary moments") {
    const auto s = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(s.n == 4);
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.variance == doctest::Approx(1.25));
    CHECK(s.m3 == doctest::Approx(0.0));
    CHECK(s.mv_value(2.0) == doctest::Approx(2.5 - 1.25));
}

TEST_CASE("conservation holds path by path") {
    const auto f = ClaimDistribution::exponential_fixed(1.0);
    SimConfig cfg;
    cfg.n_paths = 20000;
    const auto paths = simulate_paths(make_contract(f, 1.2, 6.0), f, cfg, 3.0, 4.0);
    for (const auto& p : paths) CHECK(std::abs(p.customer + p.insurer - (7.0 - p.total_claims)) <= 1e-10);
}

TEST_CASE("simulation is deterministic for a seed") {
    const auto f = ClaimDistribution::pareto_fixed(5.0, 3.0);
    SimConfig cfg;
    cfg.n_paths = 5000;
    const auto a = simulate(make_contract(f, 2.0, 0.4), f, cfg, 0.0, 0.0);
    const auto b = simulate(make_contract(f, 2.0, 0.4), f, cfg, 0.0, 0.0);
    CHECK(a.customer.mean == b.customer.mean);
    CHECK(a.customer.variance == b.customer.variance);
    CHECK(a.insurer.m4 == b.insurer.m4);
    cfg.seed = 43;
    const auto c = simulate(make_contract(f, 2.0, 0.4), f, cfg, 0.0, 0.0);
    CHECK(c.customer.mean != a.customer.mean);
}

TEST_CASE("no insurance") {
    const auto f = ClaimDistribution::exponential_fixed(1.0);
    SimConfig cfg;
    const Contract none{INFINITY, 0.0, 0.0};
    const auto r = simulate(none, f, cfg, 10.0, 0.0);
    CHECK(std::abs(r.customer.mean - 9.0) <= 3.0 * r.customer.se_mean());
    CHECK(std::abs(r.customer.variance - 2.0) <= 3.0 * r.customer.se_variance());
    CHECK(r.insurer.mean == 0.0);
}

TEST_CASE("zero horizon leaves surpluses untouched") {
    const auto f = ClaimDistribution::exponential_fixed(1.0);
    SimConfig cfg;
    cfg.n_paths = 1000;
    cfg.horizon = 0.0;
    const auto r = simulate(make_contract(f, 1.0, 1.0), f, cfg, 5.0, 2.0);
    CHECK(r.customer.mean == 5.0);
    CHECK(r.customer.variance == 0.0);
    CHECK(r.insurer.mean == 2.0);
}

TEST_CASE("analytic values") {
    const auto f = ClaimDistribution::exponential_fixed(1.0);
    const auto v = analytic_values(make_contract(f, 1.2, 6.0), f, 5.0, 1.0, 1.0, 1.0, 0.0, 0.0);
    CHECK(v.insurer == doctest::Approx(5.0 * std::exp(-1.2)).epsilon(1e-12));
    const double customer = -1.0 - 6.0 * std::exp(-1.2) - 2.5 * (2.0 - 2.0 * 2.2 * std::exp(-1.2));
    CHECK(v.customer == doctest::Approx(customer).epsilon(1e-12));
}

TEST_CASE("simulation matches the analytic values") {
    const auto f = ClaimDistribution::exponential_fixed(1.0);
    SimConfig cfg;
    const auto rep = validate_analytic(make_contract(f, 1.2, 6.0), f, 5.0, 1.0, cfg, 0.0, 0.0);
    CHECK(rep.passed);
    CHECK(std::abs(rep.z_customer) <= 4.0);
    CHECK(std::abs(rep.z_insurer) <= 4.0);
}

TEST_CASE("standard errors shrink like one over root n") {
    const auto f = ClaimDistribution::exponential_fixed(1.0);
    const auto c = make_contract(f, 1.2, 6.0);
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        SimConfig small;
        small.n_paths = 20000;
        small.seed = 1000 + trial;
        SimConfig big = small;
        big.n_paths = 40000;
        const double ratio = simulate(c, f, big, 0.0, 0.0).customer.se_mean() /
                             simulate(c, f, small, 0.0, 0.0).customer.se_mean();
        CHECK(ratio >= 0.65);
        CHECK(ratio <= 0.75);
    }
}

TEST_CASE("config validation") {
    SimConfig cfg;
    cfg.n_paths = 0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
}
