// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the exit code is the number of failures. Desk-scale settings: N=100 and
// 10^4..10^5 steps stand in for the full-scale figures, so the checks target
// signs, orderings and bands rather than exact large-N values.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wealthgame/backtest.hpp"
#include "wealthgame/config.hpp"
#include "wealthgame/evolution.hpp"
#include "wealthgame/harness.hpp"
#include "wealthgame/metrics.hpp"
#include "wealthgame/rng.hpp"
#include "wealthgame/simulation.hpp"

using namespace wg;
namespace fs = std::filesystem;

namespace {

int g_criterion = 0;
int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
    ++g_criterion;
    std::printf("[%2d/14] %-34s %s  (%s)\n", g_criterion, name.c_str(),
                ok ? "PASS" : "FAIL", detail.c_str());
    if (!ok) ++g_failures;
}

SimConfig mk(double gamma, double beta, int K, int n, std::uint64_t seed) {
    SimConfig sc;
    sc.params.n_agents = n;
    sc.params.max_position = K;
    sc.params.price_sensitivity = gamma;
    sc.params.market_impact = beta;
    sc.params.seed = seed;
    return sc;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

// --- synthetic price series for the exogenous-market criteria ---

// geometric drift 0.0005/day against i.i.d. log-return noise of sd 0.01/day
// (drift/noise ratio 0.05); a steady climb with realistic daily wiggle.
PriceSeries trending_series(std::uint64_t seed, int days) {
    Rng rng(seed);
    std::normal_distribution<double> n01(0.0, 1.0);
    PriceSeries s;
    double lp = 0.0;
    for (int t = 0; t < days; ++t) {
        s.closes.push_back(100.0 * std::exp(lp));
        lp += 0.0005 + 0.01 * n01(rng);
    }
    return s;
}

// two triangular peaks in log price (one e-fold rise and crash, twice) with
// random-walk noise of sd 0.025/day on top; per-leg drift 0.0008/day, so the
// macro signal sits well below the daily noise (ratio 0.032).
PriceSeries rugged_series(std::uint64_t seed, int days) {
    Rng rng(seed);
    std::normal_distribution<double> n01(0.0, 1.0);
    PriceSeries s;
    double rw = 0.0;
    const int leg = days / 4;
    for (int t = 0; t < days; ++t) {
        int k = t / leg;
        double in = static_cast<double>(t % leg) / leg;
        double lp = (k % 2 == 0) ? in : 1.0 - in;
        s.closes.push_back(100.0 * std::exp(lp + rw));
        rw += 0.025 * n01(rng);
    }
    return s;
}

struct Paired {
    double mean = 0.0;
    double se = 0.0;
    double t() const { return se > 0 ? mean / se : 0.0; }
};

Paired paired_diff(const std::vector<double>& d) {
    Paired p;
    for (double x : d) p.mean += x;
    p.mean /= d.size();
    double var = 0;
    for (double x : d) var += (x - p.mean) * (x - p.mean);
    p.se = std::sqrt(var / (d.size() - 1) / d.size());
    return p;
}

// --- criteria ---

void c1_zero_sum() {
    Rng rng(2024);
    std::uniform_real_distribution<double> ug(0.1, 1.0), ub(0.0, 1.0);
    std::uniform_int_distribution<int> uk(1, 5);
    double worst = 0.0;
    for (int c = 0; c < 20; ++c) {
        double gamma = ug(rng), beta = ub(rng);
        int K = uk(rng);
        std::uint64_t seed = rng();
        for (int kind = 0; kind < 4; ++kind) {
            SimConfig sc = mk(gamma, beta, K, 100, seed);
            switch (kind) {
                case 1:
                    sc.spread.kind = SpreadPolicy::Kind::FixedSpread;
                    sc.spread.fixed_spread = 0.1;
                    break;
                case 2:
                    sc.spread.kind = SpreadPolicy::Kind::FixedRate;
                    sc.spread.rate = 0.01;
                    break;
                case 3:
                    sc.spread.kind = SpreadPolicy::Kind::AdaptiveRate;
                    sc.spread.learning_rate = 1e-4;
                    break;
                default: break;
            }
            Simulation sim(sc);
            sim.run(10000);
            for (const auto& r : sim.records()) {
                double books = std::abs(r.total_agent_wealth + r.mm_wealth);
                if (books > worst) worst = books;
            }
        }
    }
    report("zero-sum books, all spread kinds", worst < 1e-6,
           fmt("max |sum_w + W_mm| = %.3g over 80 runs", worst));
}

void c2_accounting() {
    double worst = 0.0;
    for (int s = 0; s < 10; ++s) {
        Simulation sim(mk(0.5, 0.5, 3, 100, 2200 + s));
        std::vector<double> inc(100, 0.0);
        std::vector<int> pos(100, 0);
        double pt_prev = 0.0;
        for (long t = 0; t < 10000; ++t) {
            for (int i = 0; i < 100; ++i) pos[i] = sim.agents()[i].position;
            StepRecord rec = sim.step();
            double pt = rec.transaction_price;
            if (t == 0) pt_prev = pt;
            for (int i = 0; i < 100; ++i) {
                inc[i] += pos[i] * (pt - pt_prev);
                double w = sim.agents()[i].wealth;
                double diff = std::abs(w - inc[i]);
                double scale = std::max({std::abs(w), std::abs(inc[i]), 1.0});
                if (diff / scale > worst) worst = diff / scale;
            }
            pt_prev = pt;
        }
    }
    report("incremental == mark-to-market", worst < 1e-9,
           fmt("max relative gap = %.3g, 10 seeds x 1e4 steps", worst));
}

void c3_arbitrageur() {
    int classified = 0, bad_gain = 0, alternating = 0;
    for (int s = 0; s < 50; ++s) {
        Simulation sim(mk(0.8, 0.4, 1, 100, 100 + s));
        sim.run(4000);
        auto rs = harness::extract_series(sim.records(), 0.5, 100);
        AttractorConfig ac;
        if (classify_attractor(rs.prices, ac).label != Attractor::Arbitrageur)
            continue;
        ++classified;
        // one more window: every strictly alternating agent must gain (or,
        // in anti-phase, lose) exactly (1-2*beta)*|A0|^gamma per 2-cycle
        const int W = 40;
        std::vector<std::vector<double>> w(W);
        std::vector<std::vector<std::int8_t>> act(W);
        int a0 = 0;
        for (int t = 0; t < W; ++t) {
            StepRecord rec = sim.step();
            if (t == 0) a0 = std::abs(rec.excess_demand);
            for (const auto& a : sim.agents()) w[t].push_back(a.wealth);
            act[t] = sim.last_actions();
        }
        double expected = (1.0 - 2.0 * 0.4) * std::pow(a0, 0.8);
        for (int i = 0; i < 100; ++i) {
            bool alt = act[0][i] != 0;
            for (int t = 1; t < W && alt; ++t)
                if (act[t][i] != -act[t - 1][i]) alt = false;
            if (!alt) continue;
            ++alternating;
            for (int t = 0; t + 2 < W; ++t)
                if (std::abs(std::abs(w[t + 2][i] - w[t][i]) - expected) > 1e-9)
                    ++bad_gain;
        }
    }
    report("arbitrageur cycle and gain",
           classified >= 40 && alternating > 0 && bad_gain == 0,
           fmt("classified %g/50, gain mismatches %g of %g agent-cycles",
               classified, bad_gain, alternating));
}

struct BetaSweep {
    Paired gain[3];
    double h[3] = {0, 0, 0};
};

BetaSweep c45_sweep() {
    BetaSweep out;
    const double betas[3] = {0.4, 0.5, 0.6};
    for (int b = 0; b < 3; ++b) {
        std::vector<double> gains;
        for (int s = 0; s < 50; ++s) {
            Simulation sim(mk(0.5, betas[b], 1, 100, 300 + s));
            sim.run(20000);
            auto rs = harness::extract_series(sim.records(), 0.2, 100);
            gains.push_back(wealth_gain_per_step(rs.mean_wealth));
            out.h[b] += predictability(rs.changes, rs.states, 3) / 50.0;
        }
        out.gain[b] = paired_diff(gains);
    }
    return out;
}

void c4_beta_transition(const BetaSweep& sw) {
    bool ok = sw.gain[0].mean > 0 && std::abs(sw.gain[1].t()) <= 3.0 &&
              sw.gain[2].mean < 0;
    report("wealth gain flips sign at beta=0.5", ok,
           fmt("gain/step %.3g | %.2g (t=%.2f) | ", sw.gain[0].mean,
               sw.gain[1].mean, sw.gain[1].t()) +
               fmt("%.3g", sw.gain[2].mean));
}

void c5_predictability_collapse(const BetaSweep& sw) {
    double ratio = sw.h[2] / sw.h[0];
    report("predictability collapse", ratio < 0.05,
           fmt("H(0.6)/H(0.4) = %.3f", ratio));
}

void c6_scaling() {
    std::vector<double> ns{50, 100, 200}, sigs, hs;
    for (double n : ns) {
        double sig = 0, h = 0;
        for (int s = 0; s < 10; ++s) {
            Simulation sim(mk(0.8, 0.4, 1, static_cast<int>(n), 600 + s));
            sim.run(10000);
            auto rs = harness::extract_series(sim.records(), 0.3, static_cast<int>(n));
            sig += volatility(rs.changes) / 10.0;
            h += predictability(rs.changes, rs.states, 3) / 10.0;
        }
        sigs.push_back(sig);
        hs.push_back(h);
    }
    ScalingReport rep = scaling_check(ns, sigs, hs, 0.8);
    bool ok = std::abs(rep.sigma_slope - 0.8) <= 0.15 &&
              std::abs(rep.h_slope - 1.6) <= 0.3;
    report("sigma ~ N^g, H ~ N^2g scaling", ok,
           fmt("slopes %.3f (want 0.8+-0.15), %.3f (want 1.6+-0.3)",
               rep.sigma_slope, rep.h_slope));
}

void c7_trendsetter() {
    int classified = 0, runs_ok = 0;
    for (int s = 0; s < 50; ++s) {
        Simulation sim(mk(0.3, 0.8, 3, 100, 200 + s));
        sim.run(10000);
        auto rs = harness::extract_series(sim.records(), 0.7, 100);
        AttractorConfig ac;
        AttractorResult r = classify_attractor(rs.prices, ac);
        if (r.label != Attractor::Trendsetter) continue;
        ++classified;
        if (r.mean_rise_run >= 6.0 && r.mean_fall_run >= 6.0) ++runs_ok;
    }
    report("trendsetter swings, runs >= 2K",
           classified >= 25 && runs_ok == classified,
           fmt("classified %g/50, %g with both runs >= 6", classified, runs_ok));
}

void c8_fat_tail() {
    std::vector<double> pooled;
    for (int s = 0; s < 20; ++s) {
        Simulation sim(mk(0.7, 0.8, 3, 100, 700 + s));
        sim.run(100000);
        auto rs = harness::extract_series(sim.records(), 0.0, 100);
        pooled.insert(pooled.end(), rs.changes.begin(), rs.changes.end());
    }
    double hill = tail_exponent(pooled);
    std::vector<double> mags(pooled.size());
    for (std::size_t i = 0; i < pooled.size(); ++i) mags[i] = std::abs(pooled[i]);
    double kurt = excess_kurtosis(mags);
    bool ok = hill >= -6.0 && hill <= -2.5 && kurt > 1.0;
    report("irregular-phase fat tail", ok,
           fmt("Hill %.2f (want [-6,-2.5]), kurt(|dP|) %.2f (want >1)", hill, kurt));
}

void c9_spreads() {
    // transient burst: with no spread the agents bank ~+5 off the market
    // maker in the first few hundred steps, then saturate; a fixed spread
    // drains wealth linearly forever, so the bracketing window is the burst.
    double term[2] = {0, 0};
    const double fixed_s[2] = {0.1, 0.4};
    for (int j = 0; j < 2; ++j) {
        for (int s = 0; s < 40; ++s) {
            SimConfig sc = mk(0.5, 0.5, 1, 100, 500 + s);
            sc.spread.kind = SpreadPolicy::Kind::FixedSpread;
            sc.spread.fixed_spread = fixed_s[j];
            Simulation sim(sc);
            sim.run(100);
            term[j] += sim.records().back().total_agent_wealth / 100.0 / 40.0;
        }
    }
    bool adaptive_ok = true;
    std::string ad;
    for (double eta : {1e-5, 1e-4}) {
        std::vector<double> slopes;
        for (int s = 0; s < 10; ++s) {
            SimConfig sc = mk(0.5, 0.5, 1, 100, 800 + s);
            sc.spread.kind = SpreadPolicy::Kind::AdaptiveRate;
            sc.spread.learning_rate = eta;
            sc.spread.target_wealth = 0.0;
            Simulation sim(sc);
            sim.run(50000);
            auto rs = harness::extract_series(sim.records(), 0.8, 100);
            slopes.push_back(wealth_gain_per_step(rs.mean_wealth));
        }
        Paired p = paired_diff(slopes);
        if (std::abs(p.t()) > 3.0) adaptive_ok = false;
        ad += fmt("eta=%.0e t=%.2f ", eta, p.t());
    }
    bool ok = term[0] > 0.0 && term[1] < 0.0 && adaptive_ok;
    report("spread policies bracket break-even", ok,
           fmt("S=0.1: %+.2f, S=0.4: %+.2f at t=100; ", term[0], term[1]) + ad);
}

void c10_random_baseline() {
    bool ok = true;
    std::string detail;
    for (long tev : {10L, 1000L}) {
        auto buckets = random_eviction_survival(100, 10000, tev, 1000, 77);
        auto rows = survival_curve(buckets, 10000, 100, tev, 1000);
        int within = 0, total = 0;
        double worst = 0;
        for (const auto& r : rows) {
            double se = std::sqrt(r.baseline * (1.0 - r.baseline) / r.entrants);
            double z = se > 0 ? std::abs(r.empirical - r.baseline) / se : 0.0;
            ++total;
            if (z <= 3.0) ++within;
            if (z > worst) worst = z;
        }
        // 3-sigma per bucket; with ~1e3 buckets a few stragglers are
        // expected by chance, none should stray past 5 sigma
        if (within < 0.99 * total || worst > 5.0) ok = false;
        detail += fmt("Tev=%g: %g/%g in 3sg ", static_cast<double>(tev),
                      within, total) + fmt("max %.1f; ", worst);
    }
    report("random-evolution closed form", ok, detail);
}

void c11_slow_vs_fast() {
    bool slow_ok = false, fast_ok = false;
    std::string detail;
    for (long tev : {1000L, 10L}) {
        std::map<long, SurvivalBucket> buckets;
        const int samples = 500;
        for (int s = 0; s < samples; ++s) {
            SimConfig sc = mk(0.5, 0.5, 1, 100, derive_seed(42, 7, s));
            EvolutionConfig ec;
            ec.period = tev;
            ec.horizon = 10000;
            EvolutionRun evo(sc, ec);
            evo.run();
            evo.accumulate_survival(buckets);
        }
        auto rows = survival_curve(buckets, 10000, 100, tev, samples);
        int above = 0, total = 0;
        double late_emp = 0, late_base = 0;
        for (const auto& r : rows) {
            if (r.entry_time == 0) continue;
            ++total;
            if (r.empirical >= r.baseline) ++above;
            if (r.entry_time > 8000) {
                late_emp += r.empirical;
                late_base += r.baseline;
            }
        }
        if (tev == 1000) {
            slow_ok = above >= (total * 7 + 9) / 10;
            detail += fmt("slow %g/%g above baseline; ", above, total);
        } else {
            fast_ok = late_emp < late_base;
            detail += fmt("fast late entrants %.3f < %.3f", late_emp, late_base);
        }
    }
    report("slow helps, fast hurts newcomers", slow_ok && fast_ok, detail);
}

double scheme_mean(const PriceSeries& ser, PayoffScheme scheme, int seed) {
    BacktestConfig bc;
    bc.n_agents = 100;
    bc.seed = seed;
    bc.scheme = scheme;
    return run_backtest(ser, bc).summary.average_wealth;
}

void c12_scheme_ordering() {
    // one-sided p < 0.05 over 21 paired seeds: t > 1.725 (df = 20)
    PriceSeries trend = trending_series(7000, 5000);
    PriceSeries rug = rugged_series(9003, 5000);
    std::vector<double> d_trend, d_rug;
    for (int s = 1; s <= 21; ++s) {
        d_trend.push_back(scheme_mean(trend, PayoffScheme::Wealth, s) -
                          scheme_mean(trend, PayoffScheme::Minority, s));
        d_rug.push_back(scheme_mean(rug, PayoffScheme::Minority, s) -
                        scheme_mean(rug, PayoffScheme::Wealth, s));
    }
    Paired pt = paired_diff(d_trend), pr = paired_diff(d_rug);
    bool ok = pt.mean > 0 && pt.t() > 1.725 && pr.mean > 0 && pr.t() > 1.725;
    report("trendy favors Wealth, rugged flips", ok,
           fmt("trend W-M %.2f (t=%.1f), ", pt.mean, pt.t()) +
               fmt("rugged M-W %.2f (t=%.1f)", pr.mean, pr.t()));
}

void c13_bankruptcy_constraint() {
    // affordability-bounded positions: the only bankruptcies come from
    // one-sided strategy tables, which only relaxed sampling admits
    PriceSeries trend = trending_series(7000, 5000);
    auto rate = [&](PayoffScheme sch, bool strict, int seed) {
        BacktestConfig bc;
        bc.n_agents = 1000;
        bc.seed = seed;
        bc.scheme = sch;
        bc.require_buy_sell = strict;
        bc.position_mode = PositionMode::WealthBased;
        return run_backtest(trend, bc).summary.percent_bankrupt;
    };
    int violations = 0;
    double w_rel = 0, m_rel = 0;
    const int S = 21;
    for (int s = 1; s <= S; ++s) {
        double ws = rate(PayoffScheme::Wealth, true, s);
        double wr = rate(PayoffScheme::Wealth, false, s);
        double ms = rate(PayoffScheme::Minority, true, s);
        double mr = rate(PayoffScheme::Minority, false, s);
        if (wr < ws || mr < ms) ++violations;
        w_rel += wr / S;
        m_rel += mr / S;
    }
    bool ok = violations == 0 && m_rel > w_rel;
    report("relaxed constraint breeds bankrupts", ok,
           fmt("violations %g/21, relaxed rates W %.2f%% < M %.2f%%",
               violations, w_rel, m_rel));
}

void c14_determinism_throughput() {
    auto t0 = std::chrono::steady_clock::now();
    Simulation sim(mk(0.5, 0.5, 3, 100, 31337));
    sim.run(100000);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                      .count();

    Config cfg;
    cfg.set("model.n_agents", "100");
    cfg.set("run.steps", "20000");
    cfg.set("seed", "31337");
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    fs::path d1 = fs::temp_directory_path() / "wg_acc_det1";
    fs::path d2 = fs::temp_directory_path() / "wg_acc_det2";
    fs::remove_all(d1);
    fs::remove_all(d2);
    auto p1 = harness::run_scenario("run", cfg, d1.string());
    auto p2 = harness::run_scenario("run", cfg, d2.string());
    bool identical = p1.size() == p2.size();
    for (std::size_t i = 0; identical && i < p1.size(); ++i)
        identical = slurp(p1[i]) == slurp(p2[i]);
    report("byte-identical and < 10 s / 1e5 steps", identical && secs < 10.0,
           fmt("1e5-step run %.2f s, artifacts ", secs) +
               (identical ? "match" : "differ"));
}

}  // namespace

int main() {
    c1_zero_sum();
    c2_accounting();
    c3_arbitrageur();
    BetaSweep sw = c45_sweep();
    c4_beta_transition(sw);
    c5_predictability_collapse(sw);
    c6_scaling();
    c7_trendsetter();
    c8_fat_tail();
    c9_spreads();
    c10_random_baseline();
    c11_slow_vs_fast();
    c12_scheme_ordering();
    c13_bankruptcy_constraint();
    c14_determinism_throughput();
    std::printf("%d/14 criteria passed\n", 14 - g_failures);
    return g_failures;
}
