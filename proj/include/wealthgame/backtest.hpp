#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wealthgame/strategy.hpp"

namespace wg {

struct PriceSeries {
    std::vector<std::string> dates;  // ISO-8601, may be empty
    std::vector<double> closes;      // strictly positive

    std::size_t size() const { return closes.size(); }
};

enum class SeriesErrorKind {
    MissingFile,
    MissingColumn,
    NonNumericClose,
    NonPositiveClose,
    TooShort,
};

class SeriesError : public std::runtime_error {
public:
    SeriesError(SeriesErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    SeriesErrorKind kind() const { return kind_; }

private:
    SeriesErrorKind kind_;
};

struct ColumnSpec {
    std::string date = "date";
    std::string close = "close";
};

// CSV with a header row. Rows are sorted chronologically when a date column
// is present, otherwise file order is kept.
PriceSeries load_series(const std::string& path, const ColumnSpec& columns = {},
                        std::size_t min_length = 3);

// Restrict to [from, to] (inclusive, lexicographic ISO dates; empty = open).
PriceSeries slice_series(const PriceSeries& series, const std::string& from,
                         const std::string& to);

enum class PositionMode { FixedK, WealthBased };

// floor(max(wealth / price, 0)); bounds only the opening of positions.
int wealth_based_K(double wealth, double price);

struct BacktestConfig {
    PayoffScheme scheme = PayoffScheme::Wealth;
    int memory = 3;
    int strategies_per_agent = 2;
    double beta = 0.5;
    PositionMode position_mode = PositionMode::FixedK;
    int max_position = 3;        // K, FixedK mode
    double initial_wealth = 0.0; // WealthBased; <= 0 means the 5*P(0) default
    bool require_buy_sell = true;
    int n_agents = 1000;
    std::uint64_t seed = 0;
    bool record_trajectories = false;
};

struct BacktestSummary {
    double average_wealth = 0.0;  // in multiples of the final close
    double best_wealth = 0.0;
    double worst_wealth = 0.0;
    double percent_gaining = 0.0;  // WealthBased mode only, NaN otherwise
    double percent_bankrupt = 0.0;
    std::vector<double> histogram_edges;
    std::vector<long> histogram_counts;
};

struct BacktestResult {
    std::vector<double> final_wealth;  // normalized by the final close
    std::vector<std::vector<double>> trajectories;  // per agent, if recorded
    BacktestSummary summary;
};

// Replays the exogenous series against n_agents independent traders.
BacktestResult run_backtest(const PriceSeries& series, const BacktestConfig& config);

}  // namespace wg
