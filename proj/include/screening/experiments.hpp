#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "screening/attitude.hpp"
#include "screening/config.hpp"
#include "screening/csv.hpp"
#include "screening/simulator.hpp"
#include "screening/type_screening.hpp"

namespace screening {

/// Every key an experiment config may contain.
[[nodiscard]] const std::set<std::string>& known_config_keys();

[[nodiscard]] SolverConfig solver_config_from(const Config& cfg);
[[nodiscard]] MarketParams market_from(const Config& cfg);
[[nodiscard]] TypeDistribution prior_from(const Config& cfg);
/// Claim law from `claim.*`; theta-indexed families take `claim.theta` or `fallback_theta`.
[[nodiscard]] ClaimDistribution claim_from(const Config& cfg, double fallback_theta);
[[nodiscard]] AttitudeProblem attitude_problem_from(const Config& cfg);
[[nodiscard]] TypeProblem type_problem_from(const Config& cfg);

struct RunResult {
    nlohmann::json summary;
    std::vector<std::filesystem::path> artifacts;
};

/// mode = attitude | type: menu.csv, curve.csv, report.csv and optional SVGs.
[[nodiscard]] RunResult run_solve(const Config& cfg, const std::filesystem::path& out_dir);
/// Monte Carlo check of one contract; writes report.csv.
[[nodiscard]] RunResult run_simulate(const Config& cfg, const std::filesystem::path& out_dir);
/// Feasibility and assumption diagnostics only; writes nothing.
[[nodiscard]] RunResult run_check(const Config& cfg);
/// Dispatch on `mode` (attitude, type, simulate, reproduce_figure).
[[nodiscard]] RunResult run_config(const Config& cfg, const std::filesystem::path& out_dir);

/// One curve of a figure: an attitude or a type problem.
struct FigureSeries {
    std::string name;   ///< file stem
    std::string label;  ///< legend text (no commas)
    std::variant<AttitudeProblem, TypeProblem> problem;
};

struct FigureSpec {
    int id = 1;
    std::string title;
    std::string index_label;  ///< "gamma" or "theta"
    std::vector<FigureSeries> series;
    std::optional<double> loading_clip;
};

[[nodiscard]] FigureSpec figure_spec(int id);

/// Solves every series of figure `id`, writes figN_<series>.csv, figN_summary.csv and
/// (optionally) figN_loading.svg / figN_deductible.svg rendered from the written CSVs.
[[nodiscard]] RunResult reproduce_figure(int id, const std::filesystem::path& out_dir, const SolverConfig& cfg = {},
                                         bool emit_svg = true);

/// Re-renders the SVGs of figure `id` from the CSVs in `dir`; returns (file name, SVG text).
[[nodiscard]] std::vector<std::pair<std::string, std::string>> figure_svgs_from_csv(
    int id, const std::filesystem::path& dir);

/// Menu as a CSV table: gamma or theta, loading, deductible, premium_rate[, gamma_of_theta].
[[nodiscard]] CsvTable menu_table(const ContractMenu& menu);

}  // namespace screening
