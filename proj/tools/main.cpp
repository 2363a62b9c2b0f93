#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fimcon/commands.hpp"
#include "fimcon/scenario_config.hpp"

namespace {

int load_and_run(const std::string& path, int (*command)(const fimcon::ScenarioConfig&,
                                                         std::ostream&)) {
    try {
        const fimcon::ScenarioConfig cfg = fimcon::load_config(path);
        return command(cfg, std::cout);
    } catch (const fimcon::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return fimcon::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"funnel control with internal models for linear systems"};
    app.require_subcommand(1);

    std::string config_path, config_with, config_without;
    std::vector<double> kr_values;
    int mc_count = 50;
    std::uint64_t mc_seed = 0;
    double mc_kr = 200.0;

    auto* check = app.add_subcommand("check", "validate a scenario configuration");
    check->add_option("config", config_path, "scenario configuration (JSON)")->required();

    auto* run = app.add_subcommand("run", "validate, simulate and write trace artifacts");
    run->add_option("config", config_path, "scenario configuration (JSON)")->required();

    auto* compare = app.add_subcommand("compare", "run two scenarios and compare tracking");
    compare->add_option("first", config_with, "first configuration (JSON)")->required();
    compare->add_option("second", config_without, "second configuration (JSON)")->required();

    auto* sweep = app.add_subcommand("sweep", "rerun a scenario over a list of k_r values");
    sweep->add_option("config", config_path, "scenario configuration (JSON)")->required();
    sweep->add_option("--kr", kr_values, "k_r values to sweep")->required()->delimiter(',');

    auto* mc = app.add_subcommand("mc", "randomized closed-loop suite");
    mc->add_option("--count", mc_count, "number of scenarios");
    mc->add_option("--seed", mc_seed, "base seed for the scenario generator");
    mc->add_option("--kr", mc_kr, "gain parameter k_r for every scenario");

    CLI11_PARSE(app, argc, argv);

    if (check->parsed()) return load_and_run(config_path, fimcon::cmd_check);
    if (run->parsed()) return load_and_run(config_path, fimcon::cmd_run);

    if (compare->parsed()) {
        try {
            const auto doc_a = fimcon::read_json_file(config_with);
            const auto doc_b = fimcon::read_json_file(config_without);
            if (!fimcon::shared_sections_match(doc_a, doc_b)) {
                std::cerr << "config error: plant/reference/controller/sim sections differ\n";
                return fimcon::kExitConfigError;
            }
            return fimcon::cmd_compare(fimcon::parse_config(doc_a), fimcon::parse_config(doc_b),
                                       std::cout);
        } catch (const fimcon::ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return fimcon::kExitConfigError;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }

    if (sweep->parsed()) {
        try {
            const fimcon::ScenarioConfig cfg = fimcon::load_config(config_path);
            return fimcon::cmd_sweep(cfg, kr_values, std::cout);
        } catch (const fimcon::ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return fimcon::kExitConfigError;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }

    if (mc->parsed()) return fimcon::cmd_mc(mc_count, mc_seed, mc_kr, std::cout);
    return 0;
}
