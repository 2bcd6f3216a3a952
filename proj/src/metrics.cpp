#include "wealthgame/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wg {

double predictability(std::span<const double> changes,
                      std::span<const std::uint32_t> states, int memory) {
    if (changes.empty() || changes.size() != states.size())
        throw std::invalid_argument("predictability: empty or misaligned window");
    const std::size_t n_states = std::size_t{1} << memory;
    std::vector<double> sum(n_states, 0.0);
    std::vector<long> count(n_states, 0);
    for (std::size_t i = 0; i < changes.size(); ++i) {
        sum[states[i]] += changes[i];
        ++count[states[i]];
    }
    double h = 0.0;
    const double n = static_cast<double>(changes.size());
    for (std::size_t s = 0; s < n_states; ++s) {
        if (count[s] == 0) continue;
        double mean = sum[s] / count[s];
        h += (count[s] / n) * mean * mean;
    }
    return h;
}

double volatility(std::span<const double> changes) {
    if (changes.size() < 2)
        throw std::invalid_argument("volatility: window shorter than 2");
    double mean = 0.0, sq = 0.0;
    for (double x : changes) {
        mean += x;
        sq += x * x;
    }
    mean /= changes.size();
    sq /= changes.size();
    double var = sq - mean * mean;
    return var > 0.0 ? std::sqrt(var) : 0.0;
}

double excess_kurtosis(std::span<const double> changes) {
    if (changes.size() < 4)
        throw std::invalid_argument("excess_kurtosis: window shorter than 4");
    double mean = 0.0;
    for (double x : changes) mean += x;
    mean /= changes.size();
    double m2 = 0.0, m4 = 0.0;
    for (double x : changes) {
        double d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= changes.size();
    m4 /= changes.size();
    if (m2 == 0.0) return 0.0;
    return m4 / (m2 * m2) - 3.0;
}

std::string to_string(Attractor a) {
    switch (a) {
        case Attractor::Arbitrageur: return "arbitrageur";
        case Attractor::Trendsetter: return "trendsetter";
        case Attractor::Irregular: return "irregular";
        case Attractor::Quiet: return "quiet";
        case Attractor::Unclassified: return "unclassified";
    }
    return "unclassified";
}

namespace {

struct Segment {
    int sign = 0;
    long length = 0;
    double sum = 0.0;
};

std::vector<Segment> run_length_encode(std::span<const double> dp) {
    std::vector<Segment> segs;
    for (double x : dp) {
        int s = x > 0.0 ? 1 : x < 0.0 ? -1 : 0;
        if (segs.empty() || segs.back().sign != s) segs.push_back({s, 0, 0.0});
        ++segs.back().length;
        segs.back().sum += x;
    }
    return segs;
}

// Short interruptions inside one directional stretch - quiet gaps or
// counter-sign blips shorter than the memory - are absorbed so that a stage
// with a one-step hiccup still counts as one run.
void merge_short_interruptions(std::vector<Segment>& segs, long max_gap) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 1; i + 1 < segs.size(); ++i) {
            if (segs[i].length < max_gap && segs[i - 1].sign != 0 &&
                segs[i].sign != segs[i - 1].sign &&
                segs[i - 1].sign == segs[i + 1].sign) {
                segs[i - 1].length += segs[i].length + segs[i + 1].length;
                segs[i - 1].sum += segs[i].sum + segs[i + 1].sum;
                segs.erase(segs.begin() + i, segs.begin() + i + 2);
                changed = true;
                break;
            }
        }
    }
}

bool is_period_two(std::span<const double> dp) {
    if (dp.size() < 2 || dp[0] == 0.0) return false;
    for (std::size_t i = 0; i + 1 < dp.size(); ++i)
        if (dp[i + 1] != -dp[i]) return false;
    return true;
}

// Cycle-to-cycle variation as the coefficient of variation of the run sums;
// robust against a handful of outlier swings in an otherwise regular cycle.
bool uniform_magnitudes(const std::vector<double>& mags, double tol) {
    double mean = 0.0;
    for (double m : mags) mean += m;
    mean /= mags.size();
    if (mean <= 0.0) return false;
    double var = 0.0;
    for (double m : mags) var += (m - mean) * (m - mean);
    return std::sqrt(var / mags.size()) <= tol * mean;
}

}  // namespace

AttractorResult classify_attractor(std::span<const double> prices,
                                   const AttractorConfig& cfg) {
    AttractorResult res;
    if (static_cast<int>(prices.size()) < cfg.min_window + 1) return res;

    std::vector<double> dp(prices.size() - 1);
    for (std::size_t i = 0; i + 1 < prices.size(); ++i) dp[i] = prices[i + 1] - prices[i];

    if (std::all_of(dp.begin(), dp.end(), [](double x) { return x == 0.0; })) {
        res.label = Attractor::Quiet;
        return res;
    }

    const std::size_t strict = static_cast<std::size_t>(cfg.strict_window);
    if (dp.size() >= strict &&
        is_period_two(std::span<const double>(dp).last(strict))) {
        res.label = Attractor::Arbitrageur;
        return res;
    }

    auto segs = run_length_encode(dp);
    merge_short_interruptions(segs, cfg.memory);
    // drop partial boundary segments
    if (segs.size() > 2) segs.erase(segs.begin());
    if (segs.size() > 2) segs.pop_back();

    std::vector<double> rise_mags, fall_mags;
    std::vector<long> rise_runs, fall_runs;
    bool pattern_ok = segs.size() >= 4;
    int prev_nonzero = 0;
    for (std::size_t i = 0; pattern_ok && i < segs.size(); ++i) {
        const Segment& s = segs[i];
        if (s.sign == 0) {
            if (i > 0 && segs[i - 1].sign == 0) pattern_ok = false;
            continue;
        }
        if (s.length < cfg.memory) { pattern_ok = false; break; }
        if (prev_nonzero != 0 && s.sign == prev_nonzero) { pattern_ok = false; break; }
        prev_nonzero = s.sign;
        if (s.sign > 0) {
            rise_mags.push_back(s.sum);
            rise_runs.push_back(s.length);
        } else {
            fall_mags.push_back(-s.sum);
            fall_runs.push_back(s.length);
        }
    }
    if (pattern_ok &&
        static_cast<int>(rise_mags.size()) >= cfg.min_cycles &&
        static_cast<int>(fall_mags.size()) >= cfg.min_cycles &&
        uniform_magnitudes(rise_mags, cfg.magnitude_tol) &&
        uniform_magnitudes(fall_mags, cfg.magnitude_tol)) {
        res.label = Attractor::Trendsetter;
        res.n_cycles = static_cast<int>(std::min(rise_mags.size(), fall_mags.size()));
        for (long r : rise_runs) res.mean_rise_run += r;
        res.mean_rise_run /= rise_runs.size();
        for (long r : fall_runs) res.mean_fall_run += r;
        res.mean_fall_run /= fall_runs.size();
        for (double m : rise_mags) res.mean_rise_magnitude += m;
        res.mean_rise_magnitude /= rise_mags.size();
        return res;
    }

    res.label = Attractor::Irregular;
    return res;
}

double tail_exponent(std::span<const double> changes,
                     double top_fraction, std::size_t min_samples) {
    if (changes.size() < min_samples)
        throw std::invalid_argument("tail_exponent: insufficient samples");
    std::vector<double> mags;
    mags.reserve(changes.size());
    for (double x : changes)
        if (x != 0.0) mags.push_back(std::abs(x));
    std::size_t k = static_cast<std::size_t>(top_fraction * mags.size());
    if (k < 10 || k + 1 >= mags.size())
        throw std::invalid_argument("tail_exponent: tail too small");
    std::nth_element(mags.begin(), mags.begin() + k, mags.end(), std::greater<>());
    double threshold = mags[k];
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += std::log(mags[i] / threshold);
    acc /= k;
    return -1.0 / acc;
}

double tail_exponent_rank_regression(std::span<const double> changes,
                                     double top_fraction, std::size_t min_samples) {
    if (changes.size() < min_samples)
        throw std::invalid_argument("tail_exponent_rank_regression: insufficient samples");
    std::vector<double> mags;
    mags.reserve(changes.size());
    for (double x : changes)
        if (x != 0.0) mags.push_back(std::abs(x));
    std::size_t k = static_cast<std::size_t>(top_fraction * mags.size());
    if (k < 10 || k >= mags.size())
        throw std::invalid_argument("tail_exponent_rank_regression: tail too small");
    std::partial_sort(mags.begin(), mags.begin() + k, mags.end(), std::greater<>());
    // log(rank) against log(value): slope is the survival exponent
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < k; ++i) {
        double x = std::log(mags[i]);
        double y = std::log(static_cast<double>(i + 1));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    double n = static_cast<double>(k);
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

LinearFit linear_fit(std::span<const double> y) {
    LinearFit fit;
    const std::size_t n = y.size();
    if (n < 2) return fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = static_cast<double>(i);
        sx += x; sy += y[i]; sxx += x * x; sxy += x * y[i];
    }
    double dn = static_cast<double>(n);
    double denom = dn * sxx - sx * sx;
    fit.slope = (dn * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / dn;
    if (n > 2) {
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = y[i] - (fit.intercept + fit.slope * i);
            sse += r * r;
        }
        double mse = sse / (dn - 2.0);
        fit.slope_stderr = std::sqrt(mse * dn / denom);
    }
    return fit;
}

double wealth_gain_per_step(std::span<const double> mean_wealth) {
    if (mean_wealth.empty())
        throw std::invalid_argument("wealth_gain_per_step: empty window");
    if (mean_wealth.size() == 1) return 0.0;
    return linear_fit(mean_wealth).slope;
}

ScalingReport scaling_check(std::span<const double> n_values,
                            std::span<const double> sigmas,
                            std::span<const double> hs, double gamma) {
    ScalingReport rep;
    rep.expected_sigma_slope = gamma;
    rep.expected_h_slope = 2.0 * gamma;
    auto loglog_slope = [](std::span<const double> xs, std::span<const double> ys) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t n = xs.size();
        for (std::size_t i = 0; i < n; ++i) {
            double x = std::log(xs[i]);
            double y = std::log(ys[i]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
        }
        double dn = static_cast<double>(n);
        return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
    };
    rep.sigma_slope = loglog_slope(n_values, sigmas);
    rep.h_slope = loglog_slope(n_values, hs);
    return rep;
}

}  // namespace wg
