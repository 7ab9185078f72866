#include "screening/contract.hpp"

#include <cmath>

#include "screening/errors.hpp"

namespace screening {

void MarketParams::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("market: lambda must be > 0");
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw ParameterError("market: horizon must be >= 0");
    if (!(gamma_insurer >= 0.0) || !std::isfinite(gamma_insurer)) {
        throw ParameterError("market: gamma_insurer must be >= 0");
    }
    if (!std::isfinite(x_customer) || !std::isfinite(x_insurer)) {
        throw ParameterError("market: initial surpluses must be finite");
    }
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
    if (n < 1) throw ParameterError("uniform_grid: n must be >= 1");
    if (n == 1 || lo == hi) return {lo};
    std::vector<double> g(static_cast<std::size_t>(n));
    const double h = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + i * h;
    g.back() = hi;
    return g;
}

}  // namespace screening
