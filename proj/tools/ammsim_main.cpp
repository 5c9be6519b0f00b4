// Batch CLI for the constant-product AMM game simulator.
//
//   ammsim <subcommand> --config <path> --out <path> [--oracle]
//
// Subcommands: playout, expected, thresholds, freeze-map, gas-sweep,
// calibrate. Exit codes: 0 success, 1 config error, 2 domain error.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ammsim/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Constant-product AMM three-period game simulator"};
    app.require_subcommand(1);

    struct SubcommandSpec {
        const char* name;
        const char* description;
        bool supports_oracle;
    };
    constexpr SubcommandSpec specs[] = {
        {"playout", "Play the four events at one parameter point (4 CSV rows)", true},
        {"expected", "Expected LP payoff: enumeration vs closed form per grid point", true},
        {"thresholds", "No-arbitrage threshold beta1 and freeze threshold beta2", true},
        {"freeze-map", "Freeze verdict over the alpha x beta grid", false},
        {"gas-sweep", "Gas fees g1, g2 over the parameter grid", false},
        {"calibrate", "Fee-convention calibration report", false},
    };

    std::string config_path;
    std::string out_path;
    bool use_oracle = false;
    std::string chosen;
    for (const SubcommandSpec& spec : specs) {
        CLI::App* sub = app.add_subcommand(spec.name, spec.description);
        sub->add_option("--config", config_path, "Scenario config file")->required();
        sub->add_option("--out", out_path, "Output CSV path")->required();
        if (spec.supports_oracle) {
            sub->add_flag("--oracle", use_oracle, "Use brute-force oracle optimizers");
        }
        sub->callback([&chosen, name = std::string(spec.name)] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // CLI11 returns 0 for --help; anything else is a usage error.
        return code == 0 ? 0 : ammsim::cli::kExitConfigError;
    }

    return ammsim::cli::run(chosen, config_path, out_path, use_oracle, std::cerr, &std::cout);
}
