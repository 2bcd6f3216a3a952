#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wg {

// H = sum_mu rho(mu) <dP|mu>^2, the history-conditioned predictability.
// states[i] is the m-bit history preceding price change changes[i].
double predictability(std::span<const double> changes,
                      std::span<const std::uint32_t> states, int memory);

// Population standard deviation of the price changes.
double volatility(std::span<const double> changes);

// Fourth standardized moment minus 3; 0 for a Gaussian stream.
double excess_kurtosis(std::span<const double> changes);

enum class Attractor { Arbitrageur, Trendsetter, Irregular, Quiet, Unclassified };

std::string to_string(Attractor a);

struct AttractorConfig {
    int memory = 3;
    int min_window = 1000;       // shorter windows return Unclassified
    int strict_window = 500;     // final stretch checked for exact period 2
    double magnitude_tol = 0.10; // cycle-to-cycle swing variation
    int min_cycles = 2;
};

struct AttractorResult {
    Attractor label = Attractor::Unclassified;
    double mean_rise_run = 0.0;  // steps per detected rising stretch
    double mean_fall_run = 0.0;
    double mean_rise_magnitude = 0.0;
    int n_cycles = 0;
};

AttractorResult classify_attractor(std::span<const double> prices,
                                   const AttractorConfig& cfg);

// Hill estimator on |dP| over the top order statistics; returned with the
// survival-function sign convention (negative, e.g. -3.8).
double tail_exponent(std::span<const double> changes,
                     double top_fraction = 0.05, std::size_t min_samples = 10000);

// Log-log rank regression cross-check for the same exponent.
double tail_exponent_rank_regression(std::span<const double> changes,
                                     double top_fraction = 0.05,
                                     std::size_t min_samples = 10000);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

// Least squares of y against x = 0, 1, ..., n-1.
LinearFit linear_fit(std::span<const double> y);

// Least-squares slope of the per-agent average wealth over the window.
double wealth_gain_per_step(std::span<const double> mean_wealth);

struct ScalingReport {
    double sigma_slope = 0.0;
    double h_slope = 0.0;
    double expected_sigma_slope = 0.0;  // gamma
    double expected_h_slope = 0.0;      // 2 gamma
};

ScalingReport scaling_check(std::span<const double> n_values,
                            std::span<const double> sigmas,
                            std::span<const double> hs, double gamma);

}  // namespace wg
