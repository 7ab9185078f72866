#include "screening/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "screening/errors.hpp"

namespace screening {

void SolverConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ParameterError(std::string("solver config: ") + what);
    };
    require(quad_tol > 0.0, "quad_tol must be > 0");
    require(ode_tol > 0.0, "ode_tol must be > 0");
    require(opt_tol > 0.0, "opt_tol must be > 0");
    require(ode_step_init >= 0.0, "ode_step_init must be >= 0");
    require(fp_damping > 0.0 && fp_damping <= 1.0, "fp_damping must lie in (0, 1]");
    require(fp_max_iter >= 1, "fp_max_iter must be >= 1");
    require(grid_points >= 3, "grid_points must be >= 3");
    require(max_loading > 0.0, "max_loading must be > 0");
    require(coverage_margin > 0.0 && coverage_margin < 1.0, "coverage_margin must be in (0, 1)");
    require(insurer_value_factor > 0.0, "insurer_value_factor must be > 0");
}

namespace {

constexpr int kMaxQuadDepth = 48;

struct SimpsonPanel {
    double a, b, fa, fm, fb, whole;
};

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const ScalarFn& f, const SimpsonPanel& p, double tol, int depth) {
    const double m = 0.5 * (p.a + p.b);
    const double lm = 0.5 * (p.a + m);
    const double rm = 0.5 * (m + p.b);
    const double flm = f(lm);
    const double frm = f(rm);
    if (!std::isfinite(flm) || !std::isfinite(frm)) {
        throw NumericError("integrate: non-finite integrand value");
    }
    const double left = simpson(p.a, m, p.fa, flm, p.fm);
    const double right = simpson(m, p.b, p.fm, frm, p.fb);
    const double delta = left + right - p.whole;
    if (std::abs(delta) <= 15.0 * tol ||
        std::abs(delta) <= 64.0 * std::numeric_limits<double>::epsilon() * std::abs(left + right)) {
        return left + right + delta / 15.0;
    }
    if (depth >= kMaxQuadDepth) {
        throw NumericError("integrate: maximum recursion depth exceeded");
    }
    return adaptive(f, {p.a, m, p.fa, flm, p.fm, left}, 0.5 * tol, depth + 1) +
           adaptive(f, {m, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth + 1);
}

double integrate_finite(const ScalarFn& f, double a, double b, double tol) {
    constexpr int panels = 16;
    const double h = (b - a) / panels;
    double total = 0.0;
    double fa = f(a);
    for (int i = 0; i < panels; ++i) {
        const double x0 = a + i * h;
        const double x1 = (i + 1 == panels) ? b : a + (i + 1) * h;
        const double xm = 0.5 * (x0 + x1);
        const double fm = f(xm);
        const double fb = f(x1);
        if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb)) {
            throw NumericError("integrate: non-finite integrand value");
        }
        total += adaptive(f, {x0, x1, fa, fm, fb, simpson(x0, x1, fa, fm, fb)}, tol / panels, 0);
        fa = fb;
    }
    return total;
}

}  // namespace

double integrate(const ScalarFn& f, double a, double b, double tol) {
    if (!(tol > 0.0)) throw ParameterError("integrate: tol must be > 0");
    if (std::isnan(a) || std::isnan(b) || a > b) throw ParameterError("integrate: require a <= b");
    if (a == b) return 0.0;
    if (std::isinf(b)) {
        // y = a + t / (1 - t) maps [0, 1) onto [a, inf).
        const ScalarFn g = [&f, a](double t) {
            if (t >= 1.0) return 0.0;
            const double s = 1.0 - t;
            return f(a + t / s) / (s * s);
        };
        return integrate_finite(g, 0.0, 1.0, tol);
    }
    return integrate_finite(f, a, b, tol);
}

const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw ParameterError("gauss_legendre: n must be >= 1");
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return cache.emplace(n, std::move(rule)).first->second;
}

std::vector<double> simpson_weights(std::size_t n, double h) {
    std::vector<double> w(n, 0.0);
    if (n < 2) return w;
    if (n == 2) {
        w[0] = w[1] = 0.5 * h;
        return w;
    }
    std::size_t simpson_end = n - 1;  // last node covered by the 1-4-2 rule
    if (n % 2 == 0) simpson_end = n - 4;
    for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if (n % 2 == 0) {
        const std::size_t s = n - 4;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    return w;
}

std::vector<double> cumulative_simpson(std::span<const double> g, double h) {
    const std::size_t n = g.size();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    if (n == 2) {
        out[1] = 0.5 * h * (g[0] + g[1]);
        return out;
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (i % 2 == 0) {
            out[i] = out[i - 2] + h / 3.0 * (g[i - 2] + 4.0 * g[i - 1] + g[i]);
        } else if (i + 1 < n) {
            out[i] = out[i - 1] + h / 12.0 * (5.0 * g[i - 1] + 8.0 * g[i] - g[i + 1]);
        } else {
            out[i] = out[i - 1] + h / 12.0 * (-g[i - 2] + 8.0 * g[i - 1] + 5.0 * g[i]);
        }
    }
    return out;
}

namespace {

constexpr int kMaxSubsteps = 1 << 14;
constexpr int kMaxFineFactor = 64;

IvpSolution rk4_run(const OdeRhs& rhs, double y0, std::span<const double> grid, int m) {
    IvpSolution sol;
    sol.substeps = m;
    const int keep_every = std::max(1, m / kMaxFineFactor);
    sol.values.reserve(grid.size());
    sol.values.push_back(y0);
    sol.fine_x.push_back(grid[0]);
    sol.fine_y.push_back(y0);
    double y = y0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double h = (grid[i + 1] - grid[i]) / m;
        for (int s = 0; s < m; ++s) {
            const double x = grid[i] + s * h;
            const double k1 = rhs(x, y);
            const double k2 = rhs(x + 0.5 * h, y + 0.5 * h * k1);
            const double k3 = rhs(x + 0.5 * h, y + 0.5 * h * k2);
            const double k4 = rhs(x + h, y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if ((s + 1) % keep_every == 0) {
                const bool last = (s + 1 == m);
                sol.fine_x.push_back(last ? grid[i + 1] : grid[i] + (s + 1) * h);
                sol.fine_y.push_back(y);
            }
        }
        sol.values.push_back(y);
    }
    return sol;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double e = std::abs(a[i] - b[i]);
        if (!std::isfinite(e)) return std::numeric_limits<double>::infinity();
        d = std::max(d, e);
    }
    return d;
}

}  // namespace

IvpSolution solve_ivp(const OdeRhs& rhs, double y0, std::span<const double> grid, const SolverConfig& cfg) {
    if (grid.empty()) throw ParameterError("solve_ivp: empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw ParameterError("solve_ivp: grid must be strictly ascending");
    }
    if (grid.size() == 1) {
        IvpSolution sol;
        sol.values = {y0};
        sol.fine_x = {grid[0]};
        sol.fine_y = {y0};
        return sol;
    }
    int m = 1;
    if (cfg.ode_step_init > 0.0) {
        double widest = 0.0;
        for (std::size_t i = 1; i < grid.size(); ++i) widest = std::max(widest, grid[i] - grid[i - 1]);
        m = std::max(1, static_cast<int>(std::ceil(widest / cfg.ode_step_init)));
    }
    IvpSolution prev = rk4_run(rhs, y0, grid, m);
    std::vector<double> history;
    while (2 * m <= kMaxSubsteps) {
        m *= 2;
        IvpSolution cur = rk4_run(rhs, y0, grid, m);
        const double diff = sup_diff(prev.values, cur.values);
        history.push_back(diff);
        if (diff < cfg.ode_tol) return cur;
        prev = std::move(cur);
    }
    std::ostringstream msg;
    msg << "solve_ivp: refinement did not converge (last difference "
        << (history.empty() ? 0.0 : history.back()) << ")";
    throw ConvergenceError(msg.str(), std::move(history));
}

MaximizeResult maximize_scalar(const ScalarFn& h, double lo, double hi, double tol, int scan_points) {
    if (!(lo <= hi)) throw ParameterError("maximize_scalar: require lo <= hi");
    MaximizeResult best;
    auto eval = [&](double x) {
        const double v = h(x);
        ++best.evaluations;
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "maximize_scalar: non-finite objective at x = " << x;
            throw NumericError(msg.str());
        }
        if (best.evaluations == 1 || v > best.value) {
            best.value = v;
            best.x = x;
        }
        return v;
    };
    if (lo == hi) {
        eval(lo);
        best.degenerate = true;
        return best;
    }
    scan_points = std::max(scan_points, 3);
    const double step = (hi - lo) / (scan_points - 1);
    double vmin = std::numeric_limits<double>::infinity();
    int ibest = 0;
    double vbest = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < scan_points; ++i) {
        const double x = (i + 1 == scan_points) ? hi : lo + i * step;
        const double v = eval(x);
        vmin = std::min(vmin, v);
        if (v > vbest) {
            vbest = v;
            ibest = i;
        }
    }
    if (vbest - vmin <= 1e-13 * (1.0 + std::abs(vbest))) {
        best.degenerate = true;
        return best;
    }
    double a = lo + std::max(ibest - 1, 0) * step;
    double b = std::min(hi, lo + std::min(ibest + 1, scan_points - 1) * step);

    constexpr double invphi = 0.6180339887498949;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = eval(d);
        }
        if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) break;
    }
    // One parabolic step through the best point and its neighbours at the final width.
    const double w = std::max(b - a, tol);
    const double x1 = best.x - w;
    const double x3 = best.x + w;
    if (x1 >= lo && x3 <= hi) {
        const double f2 = best.value;
        const double x2 = best.x;
        const double f1 = eval(x1);
        const double f3 = eval(x3);
        const double denom = f1 - 2.0 * f2 + f3;
        if (denom < 0.0) {
            const double xv = x2 + 0.5 * w * (f1 - f3) / denom;
            if (xv > x1 && xv < x3) eval(xv);
        }
    }
    return best;
}

double bisect(const ScalarFn& f, double lo, double hi, double tol) {
    if (!(lo <= hi)) throw ParameterError("bisect: require lo <= hi");
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (!std::isfinite(flo) || !std::isfinite(fhi) || (flo > 0.0) == (fhi > 0.0)) {
        std::ostringstream msg;
        msg << "bisect: no sign change on [" << lo << ", " << hi << "] (f = " << flo << ", " << fhi << ")";
        throw BracketError(msg.str());
    }
    for (int it = 0; it < 400 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

FixedPointResult fixed_point(const CurveMap& T, std::vector<double> init, double damping, int max_iter, double tol) {
    if (!(damping > 0.0 && damping <= 1.0)) throw ParameterError("fixed_point: damping must lie in (0, 1]");
    if (max_iter < 1) throw ParameterError("fixed_point: max_iter must be >= 1");
    FixedPointResult out;
    out.damping = damping;
    std::vector<double> x = std::move(init);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= max_iter; ++k) {
        std::vector<double> tx = T(x);
        if (tx.size() != x.size()) throw ParameterError("fixed_point: map changed the curve length");
        const double res = sup_diff(x, tx);
        out.residual_history.push_back(res);
        if (std::isfinite(prev) && prev > 0.0 && std::isfinite(res)) {
            out.contraction_estimate = std::max(out.contraction_estimate, res / prev);
        }
        if (res < tol) {
            out.x = std::move(tx);
            out.iterations = k;
            out.residual = res;
            return out;
        }
        if (!std::isfinite(res) || (std::isfinite(prev) && res > prev)) out.damping *= 0.5;
        if (!std::isfinite(res)) {
            throw ConvergenceError("fixed_point: non-finite residual", std::move(out.residual_history));
        }
        const double a = out.damping;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = (1.0 - a) * x[i] + a * tx[i];
        prev = res;
    }
    std::ostringstream msg;
    msg << "fixed_point: no convergence after " << max_iter << " iterations (residual "
        << out.residual_history.back() << ")";
    throw ConvergenceError(msg.str(), std::move(out.residual_history));
}

}  // namespace screening
