#include "wealthgame/evolution.hpp"

#include <cmath>

namespace wg {

int poorest_agent(const std::vector<AgentState>& agents, Rng& rng) {
    int best = 0;
    double best_wealth = agents[0].wealth;
    int ties = 1;
    for (int i = 1; i < static_cast<int>(agents.size()); ++i) {
        if (agents[i].wealth < best_wealth) {
            best = i;
            best_wealth = agents[i].wealth;
            ties = 1;
        } else if (agents[i].wealth == best_wealth) {
            ++ties;
            if (std::uniform_int_distribution<int>(0, ties - 1)(rng) == 0) best = i;
        }
    }
    return best;
}

double random_baseline(long entry_time, long horizon, int n_agents, long period) {
    const double keep = 1.0 - 1.0 / n_agents;
    if (entry_time == 0)
        return std::pow(keep, static_cast<double>(horizon) / period);
    return std::pow(keep, static_cast<double>(horizon - entry_time) / period) / n_agents;
}

EvolutionRun::EvolutionRun(SimConfig sim_config, EvolutionConfig evo_config)
    : sim_(std::move(sim_config)), evo_(evo_config) {
    entry_times_.assign(sim_.config().params.n_agents, 0);
}

void EvolutionRun::run() {
    const int n = sim_.config().params.n_agents;
    for (long t = 1; t <= evo_.horizon; ++t) {
        sim_.step();
        if (t % evo_.period != 0) continue;
        int idx = evo_.random_eviction
                      ? std::uniform_int_distribution<int>(0, n - 1)(sim_.rng())
                      : poorest_agent(sim_.agents(), sim_.rng());
        double exited = sim_.agents()[idx].wealth;
        double entering = evo_.newcomer_wealth == NewcomerWealth::Zero
                              ? 0.0
                              : sim_.total_agent_wealth() / n;
        exited_.emplace_back(entry_times_[idx], false);
        sim_.replace_agent(idx, entering);
        entry_times_[idx] = t;
        replacements_.push_back({t, idx, exited});
        wealth_inflow_ += entering - exited;
    }
}

void EvolutionRun::accumulate_survival(std::map<long, SurvivalBucket>& buckets) const {
    for (const auto& [entry, survived] : exited_) {
        auto& b = buckets[entry];
        ++b.entrants;
        (void)survived;
    }
    for (long entry : entry_times_) {
        auto& b = buckets[entry];
        ++b.entrants;
        ++b.survivors;
    }
}

std::vector<SurvivalRow> survival_curve(const std::map<long, SurvivalBucket>& buckets,
                                        long horizon, int n_agents, long period,
                                        int n_samples) {
    // Per-capita convention of the closed form: survivors are divided by
    // N * samples, so founders reduce to survivors/entrants while later
    // entrants carry the 1/N entry weight.
    std::vector<SurvivalRow> rows;
    rows.reserve(buckets.size());
    for (const auto& [entry, b] : buckets) {
        SurvivalRow row;
        row.entry_time = entry;
        row.entrants = b.entrants;
        row.empirical = static_cast<double>(b.survivors) /
                        (static_cast<double>(n_samples) * n_agents);
        row.baseline = random_baseline(entry, horizon, n_agents, period);
        rows.push_back(row);
    }
    return rows;
}

std::map<long, SurvivalBucket> random_eviction_survival(int n_agents, long horizon,
                                                        long period, int samples,
                                                        std::uint64_t seed) {
    std::map<long, SurvivalBucket> buckets;
    for (int s = 0; s < samples; ++s) {
        Rng rng(derive_seed(seed, 0, static_cast<std::uint64_t>(s)));
        std::vector<long> entry(n_agents, 0);
        std::uniform_int_distribution<int> pick(0, n_agents - 1);
        for (long t = period; t <= horizon; t += period) {
            int idx = pick(rng);
            ++buckets[entry[idx]].entrants;
            entry[idx] = t;
        }
        for (long e : entry) {
            auto& b = buckets[e];
            ++b.entrants;
            ++b.survivors;
        }
    }
    return buckets;
}

}  // namespace wg
