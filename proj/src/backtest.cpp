#include "wealthgame/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "wealthgame/rng.hpp"
#include "wealthgame/simulation.hpp"

namespace wg {

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

}  // namespace

PriceSeries load_series(const std::string& path, const ColumnSpec& columns,
                        std::size_t min_length) {
    std::ifstream in(path);
    if (!in)
        throw SeriesError(SeriesErrorKind::MissingFile, "cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw SeriesError(SeriesErrorKind::TooShort, path + ": empty file");
    auto header = split_csv_row(line);
    int close_col = find_column(header, columns.close);
    if (close_col < 0)
        throw SeriesError(SeriesErrorKind::MissingColumn,
                          path + ": no column '" + columns.close + "'");
    int date_col = find_column(header, columns.date);

    PriceSeries series;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_row(line);
        if (static_cast<int>(fields.size()) <= close_col ||
            fields[static_cast<std::size_t>(close_col)].empty())
            throw SeriesError(SeriesErrorKind::NonNumericClose,
                              path + ": row " + std::to_string(row) + ": missing close");
        const std::string& cell = fields[static_cast<std::size_t>(close_col)];
        char* end = nullptr;
        double close = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0')
            throw SeriesError(SeriesErrorKind::NonNumericClose,
                              path + ": row " + std::to_string(row) +
                                  ": non-numeric close '" + cell + "'");
        if (!(close > 0.0))
            throw SeriesError(SeriesErrorKind::NonPositiveClose,
                              path + ": row " + std::to_string(row) +
                                  ": non-positive close " + cell);
        series.closes.push_back(close);
        if (date_col >= 0 && static_cast<int>(fields.size()) > date_col)
            series.dates.push_back(fields[static_cast<std::size_t>(date_col)]);
    }
    if (!series.dates.empty()) {
        std::vector<std::size_t> order(series.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return series.dates[a] < series.dates[b];
        });
        PriceSeries sorted;
        sorted.dates.reserve(series.size());
        sorted.closes.reserve(series.size());
        for (std::size_t i : order) {
            sorted.dates.push_back(series.dates[i]);
            sorted.closes.push_back(series.closes[i]);
        }
        series = std::move(sorted);
    }
    if (series.size() < min_length)
        throw SeriesError(SeriesErrorKind::TooShort,
                          path + ": series has " + std::to_string(series.size()) +
                              " rows, need >= " + std::to_string(min_length));
    return series;
}

PriceSeries slice_series(const PriceSeries& series, const std::string& from,
                         const std::string& to) {
    if (series.dates.empty() || (from.empty() && to.empty())) return series;
    PriceSeries out;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!from.empty() && series.dates[i] < from) continue;
        if (!to.empty() && series.dates[i] > to) continue;
        out.dates.push_back(series.dates[i]);
        out.closes.push_back(series.closes[i]);
    }
    return out;
}

int wealth_based_K(double wealth, double price) {
    double k = wealth / price;
    return k > 0.0 ? static_cast<int>(std::floor(k)) : 0;
}

namespace {

// Blocks only moves that push |position| past the bound; reducing an
// oversized position stays allowed after a wealth-based bound shrinks.
int open_clamp(int position, int proposed, int bound) {
    int k = position + proposed;
    if (std::abs(k) <= bound || std::abs(k) < std::abs(position)) return proposed;
    return 0;
}

}  // namespace

BacktestResult run_backtest(const PriceSeries& series, const BacktestConfig& config) {
    const int m = config.memory;
    const std::size_t len = series.size();
    if (len < static_cast<std::size_t>(m) + 2)
        throw SeriesError(SeriesErrorKind::TooShort,
                          "series too short for memory " + std::to_string(m));
    if (config.position_mode == PositionMode::WealthBased &&
        config.initial_wealth < 0.0)
        throw std::invalid_argument("WealthBased mode needs initial_wealth > 0");

    const std::vector<double>& p = series.closes;
    const double beta = config.beta;
    const double p0 = p.front();
    const double p_final = p.back();
    const double w0 = config.position_mode == PositionMode::WealthBased
                          ? (config.initial_wealth > 0.0 ? config.initial_wealth
                                                         : 5.0 * p0)
                          : 0.0;

    // Every agent sees the same history; zero-change days are resolved once
    // with a series-level stream.
    Rng bit_rng(derive_seed(config.seed, 0xDA7AULL));
    std::vector<std::uint32_t> mu(len, 0);
    const std::uint32_t mask = (std::uint32_t{1} << m) - 1;
    std::uint32_t h = 0;
    for (std::size_t j = 1; j < len; ++j) {
        int bit = p[j] > p[j - 1] ? 1 : p[j] < p[j - 1] ? 0 : random_bit(bit_rng);
        h = ((h << 1) | static_cast<std::uint32_t>(bit)) & mask;
        mu[j] = h;  // state after observing the change ending at day j
    }

    const std::size_t first_day = static_cast<std::size_t>(m);
    const std::size_t last_day = len - 2;  // Eq.-3 pricing needs the next close

    BacktestResult result;
    result.final_wealth.resize(config.n_agents);
    if (config.record_trajectories)
        result.trajectories.assign(config.n_agents, {});

    int n_gaining = 0, n_bankrupt = 0;
    for (int i = 0; i < config.n_agents; ++i) {
        Rng rng(derive_seed(config.seed, 0, 0, static_cast<std::uint64_t>(i) + 1));
        std::vector<Strategy> strategies;
        strategies.reserve(config.strategies_per_agent);
        for (int j = 0; j < config.strategies_per_agent; ++j)
            strategies.push_back(gen_strategy(rng, m, config.require_buy_sell));
        std::vector<StrategyScore> scores(config.strategies_per_agent);

        int position = 0;
        double cash = w0;
        double wealth = w0;
        double pt_prev = transaction_price(p[first_day], p[first_day + 1], beta);

        for (std::size_t t = first_day; t <= last_day; ++t) {
            double pt = transaction_price(p[t], p[t + 1], beta);
            int bound = config.position_mode == PositionMode::FixedK
                            ? config.max_position
                            : wealth_based_K(wealth, p[t]);
            int idx = select_strategy(scores, false, 0.0, rng);
            int a = open_clamp(position, strategies[idx].decide(mu[t]), bound);

            cash -= a * pt;
            position += a;
            wealth = cash + position * pt;

            PriceStep ps{p[t], p[t + 1], pt, pt_prev};
            for (int j = 0; j < config.strategies_per_agent; ++j)
                update_score(config.scheme, scores[j], strategies[j].decide(mu[t]),
                             ps, bound);
            pt_prev = pt;
            if (config.record_trajectories) result.trajectories[i].push_back(wealth);
        }

        double final_raw = cash + position * p_final;
        result.final_wealth[i] = final_raw / p_final;
        if (final_raw < 0.0) ++n_bankrupt;
        if (config.position_mode == PositionMode::WealthBased &&
            final_raw > w0 * p_final / p0)
            ++n_gaining;
    }

    BacktestSummary& s = result.summary;
    const auto& fw = result.final_wealth;
    s.average_wealth = std::accumulate(fw.begin(), fw.end(), 0.0) / fw.size();
    s.best_wealth = *std::max_element(fw.begin(), fw.end());
    s.worst_wealth = *std::min_element(fw.begin(), fw.end());
    s.percent_bankrupt = 100.0 * n_bankrupt / config.n_agents;
    s.percent_gaining = config.position_mode == PositionMode::WealthBased
                            ? 100.0 * n_gaining / config.n_agents
                            : std::numeric_limits<double>::quiet_NaN();

    const int bins = 50;
    double lo = s.worst_wealth, hi = s.best_wealth;
    if (hi <= lo) hi = lo + 1.0;
    double width = (hi - lo) / bins;
    s.histogram_edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) s.histogram_edges[b] = lo + b * width;
    s.histogram_counts.assign(bins, 0);
    for (double w : fw) {
        int b = std::min(bins - 1, static_cast<int>((w - lo) / width));
        ++s.histogram_counts[static_cast<std::size_t>(std::max(0, b))];
    }
    return result;
}

}  // namespace wg
