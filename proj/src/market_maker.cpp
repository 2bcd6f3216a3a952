#include "wealthgame/market_maker.hpp"

#include <algorithm>
#include <cmath>

namespace wg {

SpreadResult compute_spread(const SpreadPolicy& policy, double transaction_price,
                            double total_agent_wealth, int n_agents) {
    SpreadResult r{0.0, policy};
    switch (policy.kind) {
        case SpreadPolicy::Kind::None:
            break;
        case SpreadPolicy::Kind::FixedSpread:
            r.spread = policy.fixed_spread;
            break;
        case SpreadPolicy::Kind::FixedRate:
            r.spread = policy.rate * std::abs(transaction_price);
            break;
        case SpreadPolicy::Kind::AdaptiveRate:
            r.spread = policy.rate * std::abs(transaction_price);
            r.next.rate = std::max(
                policy.rate + policy.learning_rate / n_agents *
                                  (policy.target_wealth + total_agent_wealth),
                0.0);
            break;
    }
    return r;
}

ClearResult clear_market_maker(std::span<const std::int8_t> actions) {
    ClearResult r;
    r.effective.assign(actions.begin(), actions.end());
    for (int a : actions) {
        r.excess_demand += a;
        if (a > 0) ++r.n_buyers;
        else if (a < 0) ++r.n_sellers;
    }
    return r;
}

ClearResult clear_matched(std::span<const std::int8_t> actions, Rng& rng) {
    ClearResult r;
    r.effective.assign(actions.begin(), actions.end());
    std::vector<int> buyers, sellers;
    for (int i = 0; i < static_cast<int>(actions.size()); ++i) {
        r.excess_demand += actions[i];
        if (actions[i] > 0) buyers.push_back(i);
        else if (actions[i] < 0) sellers.push_back(i);
    }
    r.n_buyers = static_cast<int>(buyers.size());
    r.n_sellers = static_cast<int>(sellers.size());
    auto& majority = buyers.size() > sellers.size() ? buyers : sellers;
    const std::size_t keep = std::min(buyers.size(), sellers.size());
    // partial Fisher-Yates: the first `keep` entries are a uniform draw
    for (std::size_t i = 0; i < keep; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, majority.size() - 1);
        std::swap(majority[i], majority[pick(rng)]);
    }
    for (std::size_t i = keep; i < majority.size(); ++i) {
        r.effective[majority[i]] = 0;
        ++r.n_frustrated;
    }
    return r;
}

void mm_settle(MarketMakerState& mm, std::span<const std::int8_t> effective,
               double transaction_price, double spread) {
    long traded = 0;
    long volume = 0;
    for (int a : effective) {
        traded += a;
        volume += a > 0 ? a : -a;
    }
    // buyers pay P_T + S, sellers receive P_T - S; the opposite legs land here
    mm.cash += traded * transaction_price + volume * spread;
    mm.inventory -= traded;
    mm.wealth = mm.cash + mm.inventory * transaction_price;
}

}  // namespace wg
