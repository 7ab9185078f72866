#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "screening/errors.hpp"
#include "screening/contract.hpp"
#include "screening/numerics.hpp"

using namespace screening;

TEST_CASE("integrate") {
    CHECK(integrate([](double) { return 1.0; }, 0.0, 1.0, 1e-12) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(integrate([](double y) { return std::exp(-y); }, 0.0, INFINITY, 1e-12) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(integrate([](double y) { return y * std::exp(-y); }, 0.0, INFINITY, 1e-12) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(integrate([](double y) { return std::sin(y); }, 0.0, M_PI, 1e-12) == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(integrate([](double) { return 3.0; }, 2.0, 2.0, 1e-12) == 0.0);
}

TEST_CASE("Gauss-Legendre is exact on polynomials") {
    const GaussRule& g = gauss_legendre(16);
    for (int k = 0; k <= 31; ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], k);
        const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
        CHECK(std::abs(s - exact) <= 1e-10);
    }
}

TEST_CASE("Simpson weights integrate cubics exactly") {
    for (std::size_t n : {3u, 4u, 7u, 10u}) {
        const double h = 2.0 / static_cast<double>(n - 1);
        const auto w = simpson_weights(n, h);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = -1.0 + h * static_cast<double>(i);
            s += w[i] * (x * x * x + x * x);
        }
        CHECK(s == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
    }
}

TEST_CASE("cumulative Simpson is fourth order at every node") {
    auto worst = [](std::size_t n) {
        const double h = 2.0 / static_cast<double>(n - 1);
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = std::cos(h * static_cast<double>(i));
        const auto c = cumulative_simpson(g, h);
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(c[i] - std::sin(h * static_cast<double>(i))));
        return e;
    };
    const double coarse = worst(41);
    const double fine = worst(81);
    CHECK(coarse < 1e-6);
    CHECK(coarse / fine > 12.0);
}

TEST_CASE("solve_ivp") {
    SolverConfig cfg;
    const auto grid = uniform_grid(0.0, 1.0, 11);
    const auto flat = solve_ivp([](double, double) { return 0.0; }, 3.5, grid, cfg);
    for (double v : flat.values) CHECK(v == 3.5);
    for (double lam : {-2.0, -1.0, 1.0}) {
        const auto s = solve_ivp([lam](double, double y) { return lam * y; }, 1.0, grid, cfg);
        CHECK(std::abs(s.values.back() - std::exp(lam)) <= 10.0 * cfg.ode_tol);
    }
}

TEST_CASE("solve_ivp reproduces the exponential-family loading curve") {
    const double g = 5.0;
    const double k = 4.9;
    auto closed = [&](double t) { return 1.0 / (1.0 + g * t - k * t * std::exp(1.0 / (g * t))) - 1.0; };
    const auto grid = uniform_grid(1.0, 9.0, 81);
    const auto s = solve_ivp([g](double x, double y) { return -(1.0 + y) * (1.0 + y / (x * g)) / x; }, closed(1.0),
                             grid, SolverConfig{});
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(s.values[i] - closed(grid[i])) < 1e-7);
}

TEST_CASE("maximize_scalar") {
    const auto q = maximize_scalar([](double x) { return -(x - 2.0) * (x - 2.0); }, 0.0, 5.0, 1e-10);
    CHECK(q.x == doctest::Approx(2.0).epsilon(1e-8));
    const auto h = [](double xi) { return (xi - 1.0) * std::exp(-xi / 5.0); };
    const auto r = maximize_scalar(h, 0.0, 50.0, 1e-10);
    CHECK(r.x == doctest::Approx(6.0).epsilon(1e-7));
    for (double x : uniform_grid(0.0, 50.0, 1001)) CHECK(r.value >= h(x) - 1e-7);
    const auto c = maximize_scalar([](double) { return 4.0; }, 0.0, 1.0, 1e-9);
    CHECK(c.degenerate);
    CHECK(c.value == 4.0);
    const auto edge = maximize_scalar([](double x) { return x; }, 0.0, 3.0, 1e-10);
    CHECK(edge.x == doctest::Approx(3.0));
}

TEST_CASE("maximize_scalar audit on a bumpy objective") {
    const auto h = [](double x) { return std::sin(3.0 * x) * std::exp(-0.1 * x) + 0.05 * x; };
    const auto r = maximize_scalar(h, 0.0, 10.0, 1e-10, 128);
    for (double x : uniform_grid(0.0, 10.0, 1001)) CHECK(r.value >= h(x) - 1e-7);
}

TEST_CASE("bisect") {
    CHECK(bisect([](double x) { return x - 1.0; }, 0.0, 2.0, 1e-12) == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(bisect([](double x) { return std::exp(-x) - 0.5; }, 0.0, 5.0, 1e-12) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-11));
    CHECK(bisect([](double x) { return x; }, 0.0, 1.0, 1e-12) == 0.0);
    CHECK_THROWS_AS((void)bisect([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12), BracketError);
}

TEST_CASE("fixed_point") {
    const auto id = fixed_point([](const std::vector<double>& x) { return x; }, {1.0, 2.0}, 1.0, 10, 1e-12);
    CHECK(id.iterations == 1);
    CHECK(id.residual == 0.0);
    const auto half = fixed_point(
        [](const std::vector<double>& x) {
            std::vector<double> y(x);
            for (double& v : y) v = v / 2.0 + 1.0;
            return y;
        },
        {0.0, 0.0, 0.0}, 1.0, 200, 1e-12);
    for (double v : half.x) CHECK(v == doctest::Approx(2.0).epsilon(1e-11));
    for (std::size_t i = 1; i < half.residual_history.size(); ++i) {
        CHECK(half.residual_history[i] <= half.residual_history[i - 1]);
    }
    CHECK(half.contraction_estimate == doctest::Approx(0.5).epsilon(1e-6));
    CHECK_THROWS_AS(
        (void)fixed_point(
            [](const std::vector<double>& x) {
                std::vector<double> y(x);
                for (double& v : y) v = 2.0 * v + 1.0;
                return y;
            },
            {0.0}, 1.0, 20, 1e-12),
        ConvergenceError);
}

TEST_CASE("solver config validation") {
    SolverConfig c;
    CHECK_NOTHROW(c.validate());
    c.fp_damping = 0.0;
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c = SolverConfig{};
    c.grid_points = 1;
    CHECK_THROWS_AS(c.validate(), ParameterError);
}
