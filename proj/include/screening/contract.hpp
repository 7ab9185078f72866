#pragma once

#include <string>
#include <utility>
#include <vector>

namespace screening {

/// Market constants shared by both screening problems.
struct MarketParams {
    double lambda = 1.0;          ///< claim intensity
    double horizon = 1.0;         ///< T
    double gamma_insurer = 1.0;   ///< insurer risk aversion
    double x_customer = 0.0;
    double x_insurer = 0.0;

    void validate() const;
};

/// Excess-of-loss contract: pays (y - deductible)_+ per claim.
struct Contract {
    double deductible = 0.0;
    double loading = 0.0;
    double premium_rate = 0.0;  ///< (1 + loading) * lambda * stop_loss(deductible)
};

enum class MenuIndex { Gamma, Theta };

struct ContractMenu {
    MenuIndex index = MenuIndex::Gamma;
    std::vector<double> grid;
    std::vector<Contract> contracts;
    std::vector<double> gamma_of_theta;  ///< filled for theta-indexed menus
};

/// Outcome of a grid audit of the truth-telling constraint.
struct TruthTellingReport {
    int n_types = 0;
    double fine_cell = 0.0;       ///< spacing of the report grid
    double max_deviation = 0.0;   ///< max |argmax report - true type|
    bool passed = true;
    std::vector<std::pair<double, double>> violations;  ///< (true type, best report)
};

[[nodiscard]] std::vector<double> uniform_grid(double lo, double hi, int n);

}  // namespace screening
