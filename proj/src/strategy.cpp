#include "wealthgame/strategy.hpp"

#include <algorithm>
#include <cstdlib>

namespace wg {

Strategy gen_strategy(Rng& rng, int memory, bool require_buy_sell) {
    const std::size_t n = std::size_t{1} << memory;
    std::uniform_int_distribution<int> pick(-1, 1);
    Strategy s;
    s.table.resize(n);
    for (;;) {
        bool has_buy = false, has_sell = false;
        for (auto& cell : s.table) {
            int d = pick(rng);
            cell = static_cast<std::int8_t>(d);
            has_buy |= d == 1;
            has_sell |= d == -1;
        }
        if (!require_buy_sell || (has_buy && has_sell)) return s;
    }
}

int select_strategy(std::span<const StrategyScore> scores,
                    bool zero_enabled, double zero_score, Rng& rng) {
    const int n = static_cast<int>(scores.size());
    int best = 0;
    double best_score = scores[0].virtual_wealth;
    int ties = 1;
    auto consider = [&](int idx, double score) {
        if (score > best_score) {
            best = idx;
            best_score = score;
            ties = 1;
        } else if (score == best_score) {
            ++ties;
            // reservoir draw keeps each tied candidate equally likely
            if (std::uniform_int_distribution<int>(0, ties - 1)(rng) == 0) best = idx;
        }
    };
    for (int i = 1; i < n; ++i) consider(i, scores[i].virtual_wealth);
    if (zero_enabled) consider(n, zero_score);
    return best;
}

void update_score(PayoffScheme scheme, StrategyScore& score,
                  int decision_now, const PriceStep& step, int max_position) {
    const double dp = step.price_next - step.price_now;
    switch (scheme) {
        case PayoffScheme::Wealth: {
            // Pre-update position multiplies the transaction price change;
            // the virtual position then absorbs the clamped action. The
            // bound blocks only position-opening moves, so a position left
            // above a shrunken wealth-based bound is not force-liquidated.
            score.virtual_wealth += score.virtual_position * (step.pt_now - step.pt_prev);
            int k_old = score.virtual_position;
            int k_new = k_old + decision_now;
            if (std::abs(k_new) <= max_position || std::abs(k_new) < std::abs(k_old))
                score.virtual_position = k_new;
            break;
        }
        case PayoffScheme::Minority:
            score.virtual_wealth += -decision_now * dp;
            break;
        case PayoffScheme::Dollar:
            score.virtual_wealth += score.last_action * dp;
            score.last_action = decision_now;
            break;
        case PayoffScheme::Majority:
            score.virtual_wealth += decision_now * dp;
            break;
    }
}

}  // namespace wg
