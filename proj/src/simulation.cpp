#include "wealthgame/simulation.hpp"

#include <cmath>
#include <stdexcept>

namespace wg {

double price_update(double price, int excess_demand, double gamma) {
    if (excess_demand == 0) return price;
    double mag = std::pow(std::abs(static_cast<double>(excess_demand)), gamma);
    return excess_demand > 0 ? price + mag : price - mag;
}

void settle_agent(AgentState& agent, int effective_action,
                  double transaction_price, double spread) {
    agent.cash -= effective_action * transaction_price
                  + std::abs(effective_action) * spread;
    agent.position += effective_action;
    agent.wealth = agent.cash + agent.position * transaction_price;
}

Simulation::Simulation(SimConfig config)
    : config_(std::move(config)), rng_(config_.params.seed) {
    const ModelParams& p = config_.params;
    p.validate();
    spread_ = config_.spread;
    history_mask_ = (std::uint32_t{1} << p.memory) - 1;

    agents_.resize(p.n_agents);
    for (auto& a : agents_) {
        a.strategies.reserve(p.strategies_per_agent);
        for (int j = 0; j < p.strategies_per_agent; ++j)
            a.strategies.push_back(gen_strategy(rng_, p.memory, p.require_buy_sell));
        a.scores.assign(p.strategies_per_agent, StrategyScore{});
    }

    market_.price = p.initial_price;
    market_.transaction_price = p.initial_price;
    std::uint32_t h = 0;
    for (int b = 0; b < p.memory; ++b) h = (h << 1) | random_bit(rng_);
    market_.history = h;
}

double Simulation::total_agent_wealth() const {
    double total = 0.0;
    for (const auto& a : agents_) total += a.wealth;
    return total;
}

StepRecord Simulation::step() {
    const ModelParams& p = config_.params;
    const std::uint32_t mu = market_.history;
    const int n = p.n_agents;

    // (1) decide, (2) clamp
    std::vector<std::int8_t> proposed(n);
    int blocked_demand = 0;
    for (int i = 0; i < n; ++i) {
        AgentState& a = agents_[i];
        int idx = select_strategy(a.scores, p.zero_strategy, a.zero_score, rng_);
        int d = idx < p.strategies_per_agent ? a.strategies[idx].decide(mu) : 0;
        int clamped = clamp_action(a.position, d, p.max_position);
        if (clamped != d) blocked_demand += d;
        proposed[i] = static_cast<std::int8_t>(clamped);
    }

    // (3) clearing
    ClearResult cleared = config_.clearing == ClearingMode::MarketMaker
                              ? clear_market_maker(proposed)
                              : clear_matched(proposed, rng_);
    int demand = cleared.excess_demand;
    if (p.include_blocked_in_demand) demand += blocked_demand;

    // (4)-(6) price, transaction price, spread
    double price_next = price_update(market_.price, demand, p.price_sensitivity);
    double pt = transaction_price(market_.price, price_next, p.market_impact);
    double pt_prev = market_.time == 0 ? pt : market_.transaction_price;
    double pre_wealth = total_agent_wealth();
    SpreadResult sp = compute_spread(spread_, pt, pre_wealth, n);
    // matched clearing has no counterparty to collect a spread
    if (config_.clearing == ClearingMode::Matched) sp.spread = 0.0;
    spread_ = sp.next;

    // (7) settlement
    double total_wealth = 0.0;
    for (int i = 0; i < n; ++i) {
        settle_agent(agents_[i], cleared.effective[i], pt, sp.spread);
        total_wealth += agents_[i].wealth;
        if (agents_[i].position > p.max_position || agents_[i].position < -p.max_position)
            throw std::logic_error("position bound violated");
    }
    if (config_.clearing == ClearingMode::MarketMaker)
        mm_settle(mm_, cleared.effective, pt, sp.spread);

    // (8) virtual scores, price-taker semantics with no spread
    PriceStep ps{market_.price, price_next, pt, pt_prev};
    for (auto& a : agents_) {
        for (int j = 0; j < p.strategies_per_agent; ++j)
            update_score(config_.scheme, a.scores[j], a.strategies[j].decide(mu),
                         ps, p.max_position);
        if (p.zero_strategy) a.zero_score += p.interest_rate;
    }

    // (9) history bit; quiet steps append a random signal
    int bit = price_next > market_.price   ? 1
              : price_next < market_.price ? 0
                                           : random_bit(rng_);
    market_.history = ((mu << 1) | static_cast<std::uint32_t>(bit)) & history_mask_;

    StepRecord rec;
    rec.time = market_.time;
    rec.price_before = market_.price;
    rec.price_after = price_next;
    rec.transaction_price = pt;
    rec.excess_demand = demand;
    rec.history_state = mu;
    rec.total_agent_wealth = total_wealth;
    rec.mm_wealth = mm_.wealth;
    rec.spread = sp.spread;
    rec.rate = spread_.rate;
    rec.n_buyers = cleared.n_buyers;
    rec.n_sellers = cleared.n_sellers;
    rec.n_frustrated = cleared.n_frustrated;

    market_.price = price_next;
    market_.transaction_price = pt;
    market_.excess_demand_last = demand;
    ++market_.time;
    last_actions_ = std::move(cleared.effective);
    records_.push_back(rec);
    return rec;
}

void Simulation::run(long steps) {
    records_.reserve(records_.size() + steps);
    for (long t = 0; t < steps; ++t) step();
}

void Simulation::replace_agent(int index, double newcomer_cash) {
    const ModelParams& p = config_.params;
    AgentState& a = agents_.at(index);
    // the leaver's position moves to the market-maker at P_T: inventory and
    // cash legs offset, so the market-maker's wealth is unchanged
    mm_.inventory += a.position;
    mm_.cash -= a.position * market_.transaction_price;
    mm_.wealth = mm_.cash + mm_.inventory * market_.transaction_price;

    a.strategies.clear();
    for (int j = 0; j < p.strategies_per_agent; ++j)
        a.strategies.push_back(gen_strategy(rng_, p.memory, p.require_buy_sell));
    a.scores.assign(p.strategies_per_agent, StrategyScore{});
    a.zero_score = 0.0;
    a.position = 0;
    a.cash = newcomer_cash;
    a.wealth = newcomer_cash;
}

}  // namespace wg
