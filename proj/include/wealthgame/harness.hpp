#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wealthgame/config.hpp"
#include "wealthgame/metrics.hpp"
#include "wealthgame/simulation.hpp"

namespace wg::harness {

// Shortest round-trip decimal representation; keeps artifacts byte-stable.
std::string format_double(double v);

// Post-transient views of a finished run.
struct RunSeries {
    std::vector<double> prices;       // window length + 1 points
    std::vector<double> changes;      // price_after - price_before
    std::vector<std::uint32_t> states;
    std::vector<double> mean_wealth;  // total agent wealth / N
};

RunSeries extract_series(const std::vector<StepRecord>& records,
                         double transient_fraction, int n_agents);

SimConfig sim_config_from(const Config& cfg);

// Writes fully-resolved defaults back so the meta file reflects the run.
void resolve_defaults(Config& cfg, const std::string& subcommand);

// Subcommands: run, sweep, evolve, backtest. Artifacts land in out_dir.
// Returns the paths written.
std::vector<std::string> run_scenario(const std::string& subcommand, Config cfg,
                                      const std::string& out_dir);

}  // namespace wg::harness
