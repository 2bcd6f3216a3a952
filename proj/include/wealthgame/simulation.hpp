#pragma once

#include <cstdint>
#include <vector>

#include "wealthgame/market_maker.hpp"
#include "wealthgame/params.hpp"
#include "wealthgame/strategy.hpp"

namespace wg {

// sign(A) * |A|^gamma added to the price; A = 0 leaves it unchanged.
double price_update(double price, int excess_demand, double gamma);

// (1-beta) * P(t) + beta * P(t+1)
inline double transaction_price(double price_now, double price_next, double beta) {
    return (1.0 - beta) * price_now + beta * price_next;
}

// 0 if the proposed decision would push |position| past the bound.
inline int clamp_action(int position, int proposed, int max_position) {
    int k = position + proposed;
    return (k > max_position || k < -max_position) ? 0 : proposed;
}

struct AgentState {
    std::vector<Strategy> strategies;
    std::vector<StrategyScore> scores;
    double zero_score = 0.0;  // accumulated epsilon of the 0-strategy
    int position = 0;
    double cash = 0.0;
    double wealth = 0.0;
};

// Buyers pay P_T + S, sellers receive P_T - S; wealth is re-marked to P_T.
void settle_agent(AgentState& agent, int effective_action,
                  double transaction_price, double spread);

struct MarketState {
    double price = 0.0;
    double transaction_price = 0.0;  // P_T of the last completed step
    std::uint32_t history = 0;       // m most recent price-change bits, LSB newest
    long time = 0;
    int excess_demand_last = 0;
};

struct StepRecord {
    long time = 0;
    double price_before = 0.0;
    double price_after = 0.0;
    double transaction_price = 0.0;
    int excess_demand = 0;
    std::uint32_t history_state = 0;  // mu the agents acted on
    double total_agent_wealth = 0.0;
    double mm_wealth = 0.0;
    double spread = 0.0;
    double rate = 0.0;
    int n_buyers = 0;
    int n_sellers = 0;
    int n_frustrated = 0;
};

struct SimConfig {
    ModelParams params;
    PayoffScheme scheme = PayoffScheme::Wealth;
    SpreadPolicy spread;
    ClearingMode clearing = ClearingMode::MarketMaker;
};

// One endogenous market. A run is a pure function of (config, seed):
// strategies, the initial history and every in-step draw come from one
// mt19937_64 stream.
class Simulation {
public:
    explicit Simulation(SimConfig config);

    StepRecord step();
    void run(long steps);

    const SimConfig& config() const { return config_; }
    const MarketState& market() const { return market_; }
    const MarketMakerState& market_maker() const { return mm_; }
    const SpreadPolicy& spread_policy() const { return spread_; }
    std::vector<AgentState>& agents() { return agents_; }
    const std::vector<AgentState>& agents() const { return agents_; }
    const std::vector<StepRecord>& records() const { return records_; }
    const std::vector<std::int8_t>& last_actions() const { return last_actions_; }
    Rng& rng() { return rng_; }

    double total_agent_wealth() const;

    // Swaps agent `index` for a newcomer with fresh random strategies; the
    // market-maker absorbs the leaver's open position at P_T.
    void replace_agent(int index, double newcomer_cash);

    void set_history(std::uint32_t bits) { market_.history = bits & history_mask_; }
    void clear_records() { records_.clear(); }

private:
    SimConfig config_;
    Rng rng_;
    std::vector<AgentState> agents_;
    MarketState market_;
    MarketMakerState mm_;
    SpreadPolicy spread_;
    std::uint32_t history_mask_ = 0;
    std::vector<std::int8_t> last_actions_;
    std::vector<StepRecord> records_;
};

}  // namespace wg
