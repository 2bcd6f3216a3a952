#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "wealthgame/simulation.hpp"

namespace wg {

enum class NewcomerWealth { Zero, MarketAverage };

struct EvolutionConfig {
    long period = 1000;   // T_ev
    long horizon = 10000; // T
    NewcomerWealth newcomer_wealth = NewcomerWealth::Zero;
    // Evict a uniformly random agent instead of the poorest; statistical
    // control matching the closed-form random-evolution survival.
    bool random_eviction = false;
};

struct Replacement {
    long step = 0;
    int agent_index = 0;
    double exited_wealth = 0.0;
};

// Index of the minimum-wealth agent, ties broken uniformly at random.
int poorest_agent(const std::vector<AgentState>& agents, Rng& rng);

// Closed-form survival probability of random evolution at the horizon.
double random_baseline(long entry_time, long horizon, int n_agents, long period);

struct SurvivalBucket {
    long entrants = 0;
    long survivors = 0;
};

// One evolving-market run: every `period` steps the poorest (or a random)
// agent is swapped for a newcomer.
class EvolutionRun {
public:
    EvolutionRun(SimConfig sim_config, EvolutionConfig evo_config);

    void run();

    Simulation& simulation() { return sim_; }
    const std::vector<Replacement>& replacements() const { return replacements_; }
    const std::vector<long>& entry_times() const { return entry_times_; }
    const EvolutionConfig& config() const { return evo_; }

    // (w_new - w_exit) accumulated over all replacements; closes the books
    // of the open market: sum_w + W_mm - inflows == 0.
    double wealth_inflow() const { return wealth_inflow_; }

    // Entrants and horizon survivors per entry time, founders at 0.
    void accumulate_survival(std::map<long, SurvivalBucket>& buckets) const;

private:
    Simulation sim_;
    EvolutionConfig evo_;
    std::vector<long> entry_times_;       // per agent slot
    std::vector<Replacement> replacements_;
    std::vector<std::pair<long, bool>> exited_; // entry time, survived=false
    double wealth_inflow_ = 0.0;
};

struct SurvivalRow {
    long entry_time = 0;
    double empirical = 0.0;
    double baseline = 0.0;
    long entrants = 0;
};

std::vector<SurvivalRow> survival_curve(const std::map<long, SurvivalBucket>& buckets,
                                        long horizon, int n_agents, long period,
                                        int n_samples);

// Bookkeeping-only Monte Carlo of uniform eviction, no market attached.
std::map<long, SurvivalBucket> random_eviction_survival(int n_agents, long horizon,
                                                        long period, int samples,
                                                        std::uint64_t seed);

}  // namespace wg
