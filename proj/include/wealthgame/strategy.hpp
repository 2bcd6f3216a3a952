#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wealthgame/rng.hpp"

namespace wg {

enum class PayoffScheme { Wealth, Minority, Dollar, Majority };

// Lookup table mapping each of the 2^m history states to a decision in
// {-1, 0, +1}.
struct Strategy {
    std::vector<std::int8_t> table;

    int decide(std::uint32_t state) const { return table[state]; }
};

struct StrategyScore {
    double virtual_wealth = 0.0;
    int virtual_position = 0;  // k_sigma, Wealth scheme only
    int last_action = 0;       // a_sigma(t-1), Dollar scheme only
};

// Realized prices of one market step, shared by all score updates.
struct PriceStep {
    double price_now = 0.0;   // P(t)
    double price_next = 0.0;  // P(t+1)
    double pt_now = 0.0;      // P_T(t)
    double pt_prev = 0.0;     // P_T(t-1)
};

Strategy gen_strategy(Rng& rng, int memory, bool require_buy_sell);

// Index of the highest-scoring strategy; index == scores.size() means the
// 0-strategy when it is enabled. Ties break uniformly at random.
int select_strategy(std::span<const StrategyScore> scores,
                    bool zero_enabled, double zero_score, Rng& rng);

// Per-scheme virtual score update. decision_now is the raw table decision
// for the realized history state; the Wealth scheme clamps it against the
// virtual position internally.
void update_score(PayoffScheme scheme, StrategyScore& score,
                  int decision_now, const PriceStep& step, int max_position);

}  // namespace wg
