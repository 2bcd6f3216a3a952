#include "wealthgame/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "wealthgame/backtest.hpp"
#include "wealthgame/evolution.hpp"
#include "wealthgame/rng.hpp"

namespace wg::harness {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

RunSeries extract_series(const std::vector<StepRecord>& records,
                         double transient_fraction, int n_agents) {
    RunSeries rs;
    const std::size_t total = records.size();
    const std::size_t cut =
        static_cast<std::size_t>(transient_fraction * static_cast<double>(total));
    rs.prices.reserve(total - cut + 1);
    rs.changes.reserve(total - cut);
    rs.states.reserve(total - cut);
    rs.mean_wealth.reserve(total - cut);
    for (std::size_t i = cut; i < total; ++i) {
        const StepRecord& r = records[i];
        rs.prices.push_back(r.price_before);
        rs.changes.push_back(r.price_after - r.price_before);
        rs.states.push_back(r.history_state);
        rs.mean_wealth.push_back(r.total_agent_wealth / n_agents);
    }
    if (!records.empty()) rs.prices.push_back(records.back().price_after);
    return rs;
}

namespace {

// Launches up to one task per core and hands results to `consume` in index
// order, so artifacts do not depend on the degree of parallelism.
template <class Result, class Fn, class Consume>
void ordered_parallel(std::size_t n, Fn fn, Consume consume) {
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    std::deque<std::future<Result>> pending;
    std::size_t launched = 0, consumed = 0;
    while (consumed < n) {
        while (launched < n && pending.size() < workers)
            pending.push_back(std::async(std::launch::async, fn, launched++));
        consume(consumed++, pending.front().get());
        pending.pop_front();
    }
}

PayoffScheme parse_scheme(const std::string& s) {
    if (s == "wealth") return PayoffScheme::Wealth;
    if (s == "minority") return PayoffScheme::Minority;
    if (s == "dollar") return PayoffScheme::Dollar;
    if (s == "majority") return PayoffScheme::Majority;
    throw std::runtime_error("config key 'scheme' has invalid value '" + s + "'");
}

SpreadPolicy parse_spread(const Config& cfg) {
    SpreadPolicy p;
    std::string kind = cfg.get_string("spread.kind", "none");
    if (kind == "none") {
        p.kind = SpreadPolicy::Kind::None;
    } else if (kind == "fixed") {
        p.kind = SpreadPolicy::Kind::FixedSpread;
        p.fixed_spread = cfg.get_double("spread.s", 0.1);
    } else if (kind == "rate") {
        p.kind = SpreadPolicy::Kind::FixedRate;
        p.rate = cfg.get_double("spread.rate", 0.001);
    } else if (kind == "adaptive") {
        p.kind = SpreadPolicy::Kind::AdaptiveRate;
        p.rate = cfg.get_double("spread.rate", 0.001);
        p.learning_rate = cfg.get_double("spread.eta", 1e-5);
        p.target_wealth = cfg.get_double("spread.target", 0.0);
    } else {
        throw std::runtime_error("config key 'spread.kind' has invalid value '" +
                                 kind + "'");
    }
    return p;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

void write_meta(const Config& cfg, const std::string& subcommand,
                const std::string& path) {
    auto out = open_out(path);
    out << "harness.command = " << subcommand << "\n";
    out << "harness.rng = mt19937_64\n";
    out << "harness.version = 1.0.0\n";
    for (const auto& [k, v] : cfg.items()) out << k << " = " << v << "\n";
}

std::string scenario_run(const Config& cfg, const std::string& out_dir);
std::string scenario_sweep(const Config& cfg, const std::string& out_dir);
std::string scenario_evolve(const Config& cfg, const std::string& out_dir);
std::string scenario_backtest(const Config& cfg, const std::string& out_dir);

}  // namespace

SimConfig sim_config_from(const Config& cfg) {
    SimConfig sc;
    ModelParams& p = sc.params;
    p.n_agents = cfg.get_int("model.n_agents", 100);
    p.memory = cfg.get_int("model.memory", 3);
    p.strategies_per_agent = cfg.get_int("model.strategies", 2);
    p.max_position = cfg.get_int("model.max_position", 3);
    p.price_sensitivity = cfg.get_double("model.gamma", 0.5);
    p.market_impact = cfg.get_double("model.beta", 0.5);
    p.interest_rate = cfg.get_double("model.epsilon", 0.0);
    p.require_buy_sell = cfg.get_bool("model.require_buy_sell", true);
    p.zero_strategy = cfg.get_bool("model.zero_strategy", false);
    p.include_blocked_in_demand = cfg.get_bool("model.include_blocked_in_demand", false);
    p.initial_price = cfg.get_double("model.initial_price", 0.0);
    p.seed = cfg.get_u64("seed", 12345);
    sc.scheme = parse_scheme(cfg.get_string("scheme", "wealth"));
    sc.spread = parse_spread(cfg);
    std::string clearing = cfg.get_string("clearing", "market_maker");
    if (clearing == "market_maker") sc.clearing = ClearingMode::MarketMaker;
    else if (clearing == "matched") sc.clearing = ClearingMode::Matched;
    else throw std::runtime_error("config key 'clearing' has invalid value '" +
                                  clearing + "'");
    return sc;
}

void resolve_defaults(Config& cfg, const std::string& subcommand) {
    auto def = [&cfg](const std::string& key, const std::string& value) {
        if (!cfg.has(key)) cfg.set(key, value);
    };
    def("seed", "12345");
    def("transient", "0.2");
    if (subcommand != "backtest") {
        def("model.n_agents", "100");
        def("model.memory", "3");
        def("model.strategies", "2");
        def("model.max_position", "3");
        def("model.gamma", "0.5");
        def("model.beta", "0.5");
        def("model.epsilon", "0");
        def("model.require_buy_sell", "true");
        def("model.zero_strategy", "false");
        def("model.include_blocked_in_demand", "false");
        def("model.initial_price", "0");
        def("scheme", "wealth");
        def("clearing", "market_maker");
    }
    if (subcommand == "run") {
        def("run.steps", "100000");
        def("spread.kind", "none");
    } else if (subcommand == "sweep") {
        def("sweep.gamma", "0,0.25,0.5,0.75,1");
        def("sweep.beta", "0,0.25,0.5,0.75,1");
        def("sweep.k", "3");
        def("sweep.n", "100");
        def("sweep.samples", "50");
        def("sweep.steps", "100000");
        def("spread.kind", "none");
    } else if (subcommand == "evolve") {
        def("evolve.period", "1000");
        def("evolve.horizon", "10000");
        def("evolve.samples", "100");
        def("evolve.newcomer", "zero");
        def("evolve.random_eviction", "false");
        // evolving-market scenarios keep the adaptive spread on by default
        def("spread.kind", "adaptive");
        if (cfg.get_string("spread.kind", "") == "adaptive") {
            def("spread.rate", "0");
            def("spread.eta", "1e-5");
            def("spread.target", "0");
        }
    } else if (subcommand == "backtest") {
        def("model.memory", "3");
        def("model.strategies", "2");
        def("model.beta", "0.5");
        def("scheme", "wealth");
        def("backtest.file", "");
        def("backtest.date_column", "date");
        def("backtest.close_column", "close");
        def("backtest.position_mode", "fixed");
        def("backtest.k", "3");
        def("backtest.initial_wealth", "0");
        def("backtest.require_buy_sell", "true");
        def("backtest.n_agents", "1000");
        def("backtest.from", "");
        def("backtest.to", "");
        def("backtest.trajectories", "false");
    }
}

namespace {

const char* kRunHeader =
    "time,price_before,price_after,transaction_price,excess_demand,"
    "history_state,total_agent_wealth,mm_wealth,spread,rate,"
    "n_buyers,n_sellers,n_frustrated\n";

void write_record(std::ofstream& out, const StepRecord& r) {
    out << r.time << ',' << format_double(r.price_before) << ','
        << format_double(r.price_after) << ','
        << format_double(r.transaction_price) << ',' << r.excess_demand << ','
        << r.history_state << ',' << format_double(r.total_agent_wealth) << ','
        << format_double(r.mm_wealth) << ',' << format_double(r.spread) << ','
        << format_double(r.rate) << ',' << r.n_buyers << ',' << r.n_sellers << ','
        << r.n_frustrated << '\n';
}

std::string scenario_run(const Config& cfg, const std::string& out_dir) {
    SimConfig sc = sim_config_from(cfg);
    long steps = cfg.get_long("run.steps", 100000);
    double transient = cfg.get_double("transient", 0.2);

    Simulation sim(sc);
    sim.run(steps);

    std::string path = out_dir + "/run.csv";
    auto out = open_out(path);
    out << kRunHeader;
    for (const auto& r : sim.records()) write_record(out, r);

    RunSeries rs = extract_series(sim.records(), transient, sc.params.n_agents);
    AttractorConfig acfg;
    acfg.memory = sc.params.memory;
    auto cls = classify_attractor(rs.prices, acfg);
    std::printf("steps=%ld attractor=%s H=%s sigma=%s wealth_gain=%s\n", steps,
                to_string(cls.label).c_str(),
                format_double(predictability(rs.changes, rs.states, sc.params.memory)).c_str(),
                format_double(volatility(rs.changes)).c_str(),
                format_double(wealth_gain_per_step(rs.mean_wealth)).c_str());
    return path;
}

struct PointSummary {
    double gamma = 0, beta = 0;
    int k = 0, n = 0;
    int samples = 0;
    long steps = 0;
    double wealth_gain = 0, h = 0, sigma = 0;
    int n_arb = 0, n_trend = 0, n_irr = 0, n_quiet = 0, n_uncls = 0;
    double tail = std::numeric_limits<double>::quiet_NaN();
};

PointSummary run_point(SimConfig base, double gamma, double beta, int k, int n,
                       int samples, long steps, double transient,
                       std::uint64_t master, std::size_t point_index) {
    PointSummary ps;
    ps.gamma = gamma;
    ps.beta = beta;
    ps.k = k;
    ps.n = n;
    ps.samples = samples;
    ps.steps = steps;
    std::vector<double> pooled_changes;
    for (int s = 0; s < samples; ++s) {
        SimConfig sc = base;
        sc.params.price_sensitivity = gamma;
        sc.params.market_impact = beta;
        sc.params.max_position = k;
        sc.params.n_agents = n;
        sc.params.seed = derive_seed(master, point_index, static_cast<std::uint64_t>(s));
        Simulation sim(sc);
        sim.run(steps);
        RunSeries rs = extract_series(sim.records(), transient, n);
        ps.h += predictability(rs.changes, rs.states, sc.params.memory);
        ps.sigma += volatility(rs.changes);
        ps.wealth_gain += wealth_gain_per_step(rs.mean_wealth);
        AttractorConfig acfg;
        acfg.memory = sc.params.memory;
        switch (classify_attractor(rs.prices, acfg).label) {
            case Attractor::Arbitrageur: ++ps.n_arb; break;
            case Attractor::Trendsetter: ++ps.n_trend; break;
            case Attractor::Irregular: ++ps.n_irr; break;
            case Attractor::Quiet: ++ps.n_quiet; break;
            case Attractor::Unclassified: ++ps.n_uncls; break;
        }
        pooled_changes.insert(pooled_changes.end(), rs.changes.begin(),
                              rs.changes.end());
    }
    ps.h /= samples;
    ps.sigma /= samples;
    ps.wealth_gain /= samples;
    try {
        ps.tail = tail_exponent(pooled_changes);
    } catch (const std::invalid_argument&) {
        // thin or short-tailed pools stay NaN
    }
    return ps;
}

std::string point_key(const PointSummary& ps) {
    return format_double(ps.gamma) + "," + format_double(ps.beta) + "," +
           std::to_string(ps.k) + "," + std::to_string(ps.n);
}

const char* kSweepHeader =
    "gamma,beta,k,n,samples,steps,wealth_gain_per_step,predictability,"
    "volatility,n_arbitrageur,n_trendsetter,n_irregular,n_quiet,"
    "n_unclassified,tail_exponent\n";

std::string scenario_sweep(const Config& cfg, const std::string& out_dir) {
    SimConfig base = sim_config_from(cfg);
    auto gammas = cfg.get_list("sweep.gamma", {0, 0.25, 0.5, 0.75, 1});
    auto betas = cfg.get_list("sweep.beta", {0, 0.25, 0.5, 0.75, 1});
    auto ks = cfg.get_list("sweep.k", {3});
    auto ns = cfg.get_list("sweep.n", {100});
    int samples = cfg.get_int("sweep.samples", 50);
    long steps = cfg.get_long("sweep.steps", 100000);
    double transient = cfg.get_double("transient", 0.2);
    std::uint64_t master = cfg.get_u64("seed", 12345);

    if (steps >= 1000000 || samples > 100 ||
        *std::max_element(ns.begin(), ns.end()) >= 1000)
        std::fprintf(stderr,
                     "warning: full-scale sweep settings; expect a long run\n");

    struct Point { double gamma, beta; int k, n; std::size_t index; };
    std::vector<Point> points;
    std::size_t index = 0;
    for (double g : gammas)
        for (double b : betas)
            for (double k : ks)
                for (double n : ns)
                    points.push_back({g, b, static_cast<int>(k),
                                      static_cast<int>(n), index++});

    // per-point flush plus resume: completed points in an existing file are
    // kept and skipped
    std::string path = out_dir + "/sweep.csv";
    std::set<std::string> done;
    bool existing = fs::exists(path);
    if (existing) {
        std::ifstream in(path);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            std::size_t c1 = line.find(',');
            std::size_t c2 = line.find(',', c1 + 1);
            std::size_t c3 = line.find(',', c2 + 1);
            std::size_t c4 = line.find(',', c3 + 1);
            if (c4 != std::string::npos) done.insert(line.substr(0, c4));
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot write " + path);
    if (!existing) out << kSweepHeader;

    std::vector<Point> todo;
    for (const auto& pt : points) {
        PointSummary key_probe;
        key_probe.gamma = pt.gamma;
        key_probe.beta = pt.beta;
        key_probe.k = pt.k;
        key_probe.n = pt.n;
        if (!done.count(point_key(key_probe))) todo.push_back(pt);
    }

    ordered_parallel<PointSummary>(
        todo.size(),
        [&](std::size_t i) {
            const Point& pt = todo[i];
            return run_point(base, pt.gamma, pt.beta, pt.k, pt.n, samples, steps,
                             transient, master, pt.index);
        },
        [&](std::size_t, const PointSummary& ps) {
            out << format_double(ps.gamma) << ',' << format_double(ps.beta) << ','
                << ps.k << ',' << ps.n << ',' << ps.samples << ',' << ps.steps
                << ',' << format_double(ps.wealth_gain) << ','
                << format_double(ps.h) << ',' << format_double(ps.sigma) << ','
                << ps.n_arb << ',' << ps.n_trend << ',' << ps.n_irr << ','
                << ps.n_quiet << ',' << ps.n_uncls << ','
                << format_double(ps.tail) << '\n';
            out.flush();
        });
    return path;
}

std::string scenario_evolve(const Config& cfg, const std::string& out_dir) {
    SimConfig base = sim_config_from(cfg);
    EvolutionConfig evo;
    evo.period = cfg.get_long("evolve.period", 1000);
    evo.horizon = cfg.get_long("evolve.horizon", 10000);
    std::string newcomer = cfg.get_string("evolve.newcomer", "zero");
    if (newcomer == "zero") evo.newcomer_wealth = NewcomerWealth::Zero;
    else if (newcomer == "average") evo.newcomer_wealth = NewcomerWealth::MarketAverage;
    else throw std::runtime_error("config key 'evolve.newcomer' has invalid value '" +
                                  newcomer + "'");
    evo.random_eviction = cfg.get_bool("evolve.random_eviction", false);
    int samples = cfg.get_int("evolve.samples", 100);
    std::uint64_t master = cfg.get_u64("seed", 12345);

    std::map<long, SurvivalBucket> buckets;
    ordered_parallel<std::map<long, SurvivalBucket>>(
        static_cast<std::size_t>(samples),
        [&](std::size_t s) {
            SimConfig sc = base;
            sc.params.seed = derive_seed(master, 0, s);
            EvolutionRun run(sc, evo);
            run.run();
            std::map<long, SurvivalBucket> local;
            run.accumulate_survival(local);
            return local;
        },
        [&](std::size_t, const std::map<long, SurvivalBucket>& local) {
            for (const auto& [entry, b] : local) {
                buckets[entry].entrants += b.entrants;
                buckets[entry].survivors += b.survivors;
            }
        });

    auto rows = survival_curve(buckets, evo.horizon, base.params.n_agents,
                               evo.period, samples);
    std::string path = out_dir + "/survival.csv";
    auto out = open_out(path);
    out << "entry_time,empirical_p,baseline_p,n_entrants\n";
    for (const auto& r : rows)
        out << r.entry_time << ',' << format_double(r.empirical) << ','
            << format_double(r.baseline) << ',' << r.entrants << '\n';
    return path;
}

std::string scenario_backtest(const Config& cfg, const std::string& out_dir) {
    std::string file = cfg.get_string("backtest.file", "");
    if (file.empty()) throw std::runtime_error("config key 'backtest.file' is required");

    BacktestConfig bc;
    bc.scheme = parse_scheme(cfg.get_string("scheme", "wealth"));
    bc.memory = cfg.get_int("model.memory", 3);
    bc.strategies_per_agent = cfg.get_int("model.strategies", 2);
    bc.beta = cfg.get_double("model.beta", 0.5);
    std::string mode = cfg.get_string("backtest.position_mode", "fixed");
    if (mode == "fixed") bc.position_mode = PositionMode::FixedK;
    else if (mode == "wealth") bc.position_mode = PositionMode::WealthBased;
    else throw std::runtime_error(
        "config key 'backtest.position_mode' has invalid value '" + mode + "'");
    bc.max_position = cfg.get_int("backtest.k", 3);
    bc.initial_wealth = cfg.get_double("backtest.initial_wealth", 0.0);
    bc.require_buy_sell = cfg.get_bool("backtest.require_buy_sell", true);
    bc.n_agents = cfg.get_int("backtest.n_agents", 1000);
    bc.seed = cfg.get_u64("seed", 12345);
    bc.record_trajectories = cfg.get_bool("backtest.trajectories", false);

    ColumnSpec columns;
    columns.date = cfg.get_string("backtest.date_column", "date");
    columns.close = cfg.get_string("backtest.close_column", "close");
    PriceSeries series =
        load_series(file, columns, static_cast<std::size_t>(bc.memory) + 2);
    series = slice_series(series, cfg.get_string("backtest.from", ""),
                          cfg.get_string("backtest.to", ""));

    BacktestResult result = run_backtest(series, bc);

    json j;
    j["n_agents"] = bc.n_agents;
    j["n_days"] = series.size();
    j["seed"] = bc.seed;
    j["scheme"] = cfg.get_string("scheme", "wealth");
    j["position_mode"] = mode;
    j["average_wealth"] = result.summary.average_wealth;
    j["best_wealth"] = result.summary.best_wealth;
    j["worst_wealth"] = result.summary.worst_wealth;
    if (std::isnan(result.summary.percent_gaining))
        j["percent_gaining"] = nullptr;
    else
        j["percent_gaining"] = result.summary.percent_gaining;
    j["percent_bankrupt"] = result.summary.percent_bankrupt;
    j["histogram"]["edges"] = result.summary.histogram_edges;
    j["histogram"]["counts"] = result.summary.histogram_counts;

    std::string path = out_dir + "/backtest.json";
    auto out = open_out(path);
    out << j.dump(2) << "\n";

    if (bc.record_trajectories) {
        auto traj = open_out(out_dir + "/trajectories.csv");
        traj << "day";
        for (int i = 0; i < bc.n_agents; ++i) traj << ",agent_" << i;
        traj << "\n";
        if (!result.trajectories.empty()) {
            std::size_t days = result.trajectories[0].size();
            for (std::size_t d = 0; d < days; ++d) {
                traj << d;
                for (int i = 0; i < bc.n_agents; ++i)
                    traj << ',' << format_double(result.trajectories[i][d]);
                traj << '\n';
            }
        }
    }
    return path;
}

}  // namespace

std::vector<std::string> run_scenario(const std::string& subcommand, Config cfg,
                                      const std::string& out_dir) {
    fs::create_directories(out_dir);
    resolve_defaults(cfg, subcommand);

    std::string artifact;
    if (subcommand == "run") artifact = scenario_run(cfg, out_dir);
    else if (subcommand == "sweep") artifact = scenario_sweep(cfg, out_dir);
    else if (subcommand == "evolve") artifact = scenario_evolve(cfg, out_dir);
    else if (subcommand == "backtest") artifact = scenario_backtest(cfg, out_dir);
    else throw std::runtime_error("unknown subcommand: " + subcommand);

    std::string meta_path = out_dir + "/meta";
    write_meta(cfg, subcommand, meta_path);
    return {artifact, meta_path};
}

}  // namespace wg::harness
