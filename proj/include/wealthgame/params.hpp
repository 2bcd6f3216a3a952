#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wg {

// All scalar knobs of the endogenous market.
struct ModelParams {
    int n_agents = 100;             // N
    int memory = 3;                 // m
    int strategies_per_agent = 2;   // s
    int max_position = 3;           // K
    double price_sensitivity = 0.5; // gamma, in [0,1]
    double market_impact = 0.5;     // beta, in [0,1]
    double interest_rate = 0.0;     // epsilon, pays the 0-strategy
    bool require_buy_sell = true;   // every strategy has >=1 buy and >=1 sell
    bool zero_strategy = false;     // grand-canonical variant
    // Blocked (position-limited) decisions normally do not enter the excess
    // demand; set true to include the proposed bids instead.
    bool include_blocked_in_demand = false;
    double initial_price = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
        if (n_agents < 1) fail("n_agents must be >= 1");
        if (memory < 1) fail("memory must be >= 1");
        if (strategies_per_agent < 1) fail("strategies_per_agent must be >= 1");
        if (max_position < 1) fail("max_position must be >= 1");
        if (price_sensitivity < 0.0 || price_sensitivity > 1.0)
            fail("price_sensitivity must be in [0,1]");
        if (market_impact < 0.0 || market_impact > 1.0)
            fail("market_impact must be in [0,1]");
        if (interest_rate < 0.0) fail("interest_rate must be >= 0");
        if (memory > 20) fail("memory too large (table would have 2^m entries)");
    }
};

// Tolerances for the wealth accounting identity w = c + k * P_T.
inline constexpr double kRelTol = 1e-9;
inline constexpr double kAbsTol = 1e-12;

inline bool nearly_equal(double a, double b,
                         double rel = kRelTol, double abs = kAbsTol) {
    double diff = a > b ? a - b : b - a;
    double scale = std::abs(a) > std::abs(b) ? std::abs(a) : std::abs(b);
    return diff <= abs || diff <= rel * scale;
}

}  // namespace wg
