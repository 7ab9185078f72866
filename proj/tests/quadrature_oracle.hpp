#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "screening/numerics.hpp"

namespace screening::testing {

/// int_a^top g; an infinite tail is mapped by y = c/s so power-law tails stay smooth.
inline double tail_integral(const std::function<double(double)>& g, double a, double top) {
    if (std::isfinite(top)) return integrate(g, a, top, 1e-12);
    const double c = std::max(a, 1.0);
    const double head = c > a ? integrate(g, a, c, 1e-12) : 0.0;
    return head + integrate([&](double s) { return g(c / s) * c / (s * s); }, 1e-12, 1.0, 1e-12);
}

}  // namespace screening::testing
