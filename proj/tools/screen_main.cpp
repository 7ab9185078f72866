#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "screening/errors.hpp"
#include "screening/experiments.hpp"

namespace {

namespace fs = std::filesystem;
using namespace screening;

enum ExitCode : int { kOk = 0, kOther = 1, kParse = 2, kNoContract = 3, kNumeric = 4 };

int report_error(const std::string& status, const std::string& message, int code,
                 const std::string& key = {}) {
    nlohmann::json rec = {{"status", status}, {"error", message}, {"exit_code", code}};
    if (!key.empty()) rec["key"] = key;
    std::cerr << rec.dump() << "\n";
    return code;
}

fs::path output_dir(const std::string& flag, const Config* cfg) {
    if (!flag.empty()) return flag;
    if (cfg && cfg->has("output.directory")) return cfg->get_string("output.directory");
    if (const char* env = std::getenv("SCREEN_OUTPUT_DIR"); env && *env) return env;
    return "screen_out";
}

void print_result(const RunResult& r) {
    nlohmann::json out = r.summary;
    out["status"] = "ok";
    out["artifacts"] = nlohmann::json::array();
    for (const auto& p : r.artifacts) out["artifacts"].push_back(p.string());
    std::cout << out.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"screen: insurance screening menus under hidden risk attitude or risk type"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_flag;
    int figure = 0;
    bool no_svg = false;

    auto* solve = app.add_subcommand("solve", "Solve the problem in a config file and write menu/curve/report CSVs");
    solve->add_option("--config", config_path, "Config file")->required();
    solve->add_option("--out", out_flag, "Output directory (default: output.directory, $SCREEN_OUTPUT_DIR)");

    auto* reproduce = app.add_subcommand("reproduce", "Regenerate the data and plots of one figure");
    reproduce->add_option("--figure", figure, "Figure id")->required()->check(CLI::Range(1, 5));
    reproduce->add_option("--out", out_flag, "Output directory (default: $SCREEN_OUTPUT_DIR)");
    reproduce->add_flag("--no-svg", no_svg, "Write CSVs only");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of one contract");
    simulate->add_option("--config", config_path, "Config file")->required();
    simulate->add_option("--out", out_flag, "Output directory");

    auto* check = app.add_subcommand("check", "Feasibility and assumption diagnostics only");
    check->add_option("--config", config_path, "Config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("usage-error", e.what(), kParse);
    }

    try {
        if (*reproduce) {
            print_result(reproduce_figure(figure, output_dir(out_flag, nullptr), SolverConfig{}, !no_svg));
            return kOk;
        }
        const Config cfg = Config::load(config_path);
        cfg.require_known(known_config_keys());
        if (*check) {
            print_result(run_check(cfg));
        } else if (*simulate) {
            Config sim = cfg;
            sim.set("mode", "simulate");
            print_result(run_simulate(sim, output_dir(out_flag, &cfg)));
        } else {
            print_result(run_config(cfg, output_dir(out_flag, &cfg)));
        }
        return kOk;
    } catch (const ConfigError& e) {
        return report_error("parse-error", e.what(), kParse, e.key());
    } catch (const InfeasibleError& e) {
        return report_error("no-contract", e.what(), kNoContract);
    } catch (const NumericError& e) {
        return report_error("numeric-error", e.what(), kNumeric);
    } catch (const std::exception& e) {
        return report_error("error", e.what(), kOther);
    }
}
