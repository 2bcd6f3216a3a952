#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wealthgame/config.hpp"
#include "wealthgame/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Wealth-game market simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::string seed;
    std::vector<std::string> overrides;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value config file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "master seed (overrides config)");
        sub->add_option("overrides", overrides, "key=value overrides");
    };

    add_common(app.add_subcommand("run", "single endogenous-market time series"));
    add_common(app.add_subcommand("sweep", "phase-diagram parameter sweep"));
    add_common(app.add_subcommand("evolve", "open market with agent replacement"));
    add_common(app.add_subcommand("backtest", "replay an exogenous close series"));

    CLI11_PARSE(app, argc, argv);

    try {
        wg::Config cfg;
        if (!config_path.empty()) cfg = wg::Config::from_file(config_path);
        for (const auto& o : overrides) cfg.set_override(o);
        if (!seed.empty()) cfg.set("seed", seed);

        const std::string subcommand = app.get_subcommands().front()->get_name();
        auto artifacts = wg::harness::run_scenario(subcommand, cfg, out_dir);
        for (const auto& path : artifacts) std::printf("wrote %s\n", path.c_str());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
