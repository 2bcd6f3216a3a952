#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wealthgame/rng.hpp"

namespace wg {

struct SpreadPolicy {
    enum class Kind { None, FixedSpread, FixedRate, AdaptiveRate };
    Kind kind = Kind::None;
    double fixed_spread = 0.0;   // S, FixedSpread
    double rate = 0.0;           // R (fixed) or R(t) (adaptive)
    double learning_rate = 0.0;  // eta, AdaptiveRate
    double target_wealth = 0.0;  // W_target, AdaptiveRate
};

enum class ClearingMode { MarketMaker, Matched };

struct MarketMakerState {
    double cash = 0.0;
    long inventory = 0;  // always -sum_i k_i under market-maker clearing
    double wealth = 0.0; // cash + inventory * P_T
};

struct SpreadResult {
    double spread = 0.0;
    SpreadPolicy next;
};

// Half-spread for the coming transactions plus the policy state carried to
// the next step. total_agent_wealth is the pre-step sum of agent wealths.
SpreadResult compute_spread(const SpreadPolicy& policy, double transaction_price,
                            double total_agent_wealth, int n_agents);

struct ClearResult {
    std::vector<std::int8_t> effective;
    int excess_demand = 0;  // pre-match sum; this drives the price update
    int n_buyers = 0;
    int n_sellers = 0;
    int n_frustrated = 0;
};

// Market-maker clearing: every clamped decision transacts.
ClearResult clear_market_maker(std::span<const std::int8_t> actions);

// No market-maker: the majority side is randomly thinned down to the
// minority side; leftover agents are frustrated (action reset to 0).
ClearResult clear_matched(std::span<const std::int8_t> actions, Rng& rng);

// Mirrors the agents' aggregate cash leg and collects the spread income,
// then marks the inventory to P_T.
void mm_settle(MarketMakerState& mm, std::span<const std::int8_t> effective,
               double transaction_price, double spread);

}  // namespace wg
