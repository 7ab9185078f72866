#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace screening {

/// Tolerances and budgets shared by every solver.
struct SolverConfig {
    double quad_tol = 1e-10;
    double ode_step_init = 0.0;  ///< max initial RK4 substep; 0 uses the grid spacing
    double ode_tol = 1e-8;
    double opt_tol = 1e-9;
    double fp_damping = 1.0;
    int fp_max_iter = 500;
    int grid_points = 401;
    double max_loading = 100.0;           ///< cap on the lowest type's loading during the search for C
    double coverage_margin = 0.1;         ///< bounded claims: keep d(theta_L) <= (1 - margin) * support end
    double insurer_value_factor = 1.0;    ///< insurer value = factor * lambda * T * H(C*)

    /// Throws ParameterError if any field is out of range.
    void validate() const;
};

using ScalarFn = std::function<double(double)>;
using OdeRhs = std::function<double(double, double)>;

/// Adaptive Simpson quadrature on [a, b]; b may be +infinity.
[[nodiscard]] double integrate(const ScalarFn& f, double a, double b, double tol);

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

[[nodiscard]] const GaussRule& gauss_legendre(int n);

/// Composite Simpson weights for n equally spaced nodes with spacing h
/// (a 3/8 panel closes an even count).
[[nodiscard]] std::vector<double> simpson_weights(std::size_t n, double h);

/// Running integral of equally spaced samples, fourth order at every node.
[[nodiscard]] std::vector<double> cumulative_simpson(std::span<const double> g, double h);

struct IvpSolution {
    std::vector<double> values;   ///< solution at the requested grid
    std::vector<double> fine_x;   ///< dense uniform sub-grid (contains the grid)
    std::vector<double> fine_y;
    int substeps = 1;             ///< RK4 substeps per grid interval at convergence
};

/// RK4 on a uniform grid, doubling the substep count until two
/// successive refinements differ by less than cfg.ode_tol.
[[nodiscard]] IvpSolution solve_ivp(const OdeRhs& rhs, double y0, std::span<const double> grid,
                                    const SolverConfig& cfg);

struct MaximizeResult {
    double x = 0.0;
    double value = 0.0;
    bool degenerate = false;  ///< objective numerically constant on the scan
    int evaluations = 0;
};

/// Coarse scan to bracket the best point, then golden-section search to
/// width tol and one parabolic refinement. Returns the best evaluated point.
[[nodiscard]] MaximizeResult maximize_scalar(const ScalarFn& h, double lo, double hi, double tol,
                                             int scan_points = 64);

/// Bisection root of f on [lo, hi]; throws BracketError without a sign change.
[[nodiscard]] double bisect(const ScalarFn& f, double lo, double hi, double tol);

using CurveMap = std::function<std::vector<double>(const std::vector<double>&)>;

struct FixedPointResult {
    std::vector<double> x;
    int iterations = 0;
    double residual = 0.0;
    double damping = 1.0;                 ///< damping in force at exit
    double contraction_estimate = 0.0;    ///< largest observed residual ratio
    std::vector<double> residual_history;
};

/// Damped Picard iteration x <- (1-a) x + a T(x) until sup|T(x)-x| < tol.
/// The damping is halved whenever the residual grows.
[[nodiscard]] FixedPointResult fixed_point(const CurveMap& T, std::vector<double> init, double damping,
                                           int max_iter, double tol);

}  // namespace screening
