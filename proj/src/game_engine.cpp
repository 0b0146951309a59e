#include "thgame/game_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "thgame/errors.hpp"
#include "thgame/parallel.hpp"

namespace thgame {

std::string_view to_string(GameKind kind)
{
    switch (kind) {
    case GameKind::minority: return "minority";
    case GameKind::majority: return "majority";
    case GameKind::dollar: return "dollar";
    }
    return "?";
}

GameKind parse_game_kind(std::string_view text)
{
    if (text == "minority" || text == "mg")
        return GameKind::minority;
    if (text == "majority" || text == "majg")
        return GameKind::majority;
    if (text == "dollar" || text == "$g" || text == "dg")
        return GameKind::dollar;
    throw ConfigError("unknown game kind '" + std::string(text) + "'");
}

void SimConfig::validate() const
{
    if (N < 1)
        throw ConfigError("N must be >= 1");
    if (S < 1)
        throw ConfigError("S must be >= 1");
    if (tau < 1)
        throw ConfigError("tau must be >= 1");
    if (steps < 1)
        throw ConfigError("steps must be >= 1");
    if (warmup < 0)
        throw ConfigError("warmup must be >= 0");
    if (n_counteradaptive < 0 || n_counteradaptive > N)
        throw ConfigError("number of counteradaptive agents must lie in [0, N]");
    StrategySpace(space, m); // range checks on m
}

Simulation::Simulation(const SimConfig& config, const Roster& roster, Rng rng)
    : config_(config), space_(config.space, config.m), rng_(std::move(rng))
{
    config_.validate();
    if (roster.size() != static_cast<std::size_t>(config_.N))
        throw ConfigError("disorder holds " + std::to_string(roster.size()) +
                          " agents but config asks for N=" + std::to_string(config_.N));

    const auto S = static_cast<std::size_t>(config_.S);
    const std::uint32_t histories = space_.history_count();
    std::unordered_map<std::uint32_t, std::uint32_t> pool_of;

    agents_.reserve(roster.size());
    slot_pool_.reserve(roster.size() * S);
    for (std::size_t i = 0; i < roster.size(); ++i) {
        const auto& tuple = roster[i];
        if (tuple.size() != S)
            throw ConfigError("disorder tuples do not match S=" + std::to_string(config_.S));
        AgentState a;
        a.strategy_ids = tuple;
        a.mode = static_cast<int>(i) < config_.n_counteradaptive ? AgentMode::counteradaptive
                                                                 : AgentMode::standard;
        for (auto k : tuple) {
            if (k >= space_.size())
                throw ConfigError("disorder references a strategy outside the strategy space");
            auto [it, inserted] = pool_of.try_emplace(k, static_cast<std::uint32_t>(pool_of.size()));
            if (inserted) {
                pool_ids_.push_back(k);
                pool_multiplicity_.push_back(0);
            }
            ++pool_multiplicity_[it->second];
            slot_pool_.push_back(it->second);
        }
        agents_.push_back(std::move(a));
    }
    pool_scores_.assign(pool_multiplicity_.size(), 0);
    // filled on first use; a long-memory run only visits a few of the 2^m histories
    pool_tables_.assign(pool_ids_.size() * histories, 0);
    tied_.reserve(S);

    const int lag = payoff_lag(config_.kind);
    const int nbits = config_.m + config_.tau + lag;
    std::vector<std::uint8_t> past(static_cast<std::size_t>(nbits)); // past[0] is the newest bit
    for (int i = 0; i < nbits; i += 64) {
        const std::uint64_t word = rng_();
        for (int j = i; j < std::min(nbits, i + 64); ++j)
            past[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>((word >> (j - i)) & 1u);
    }
    std::uint64_t p = 0;
    for (int j = std::min(nbits, 64) - 1; j >= 0; --j)
        p = (p << 1) | past[static_cast<std::size_t>(j)];
    path_ = PathCode{p};
    if (!config_.warm_start)
        return;

    const auto mhist = [&](int offset) {
        std::uint32_t h = 0;
        for (int j = offset + config_.m - 1; j >= offset; --j)
            h = (h << 1) | past[static_cast<std::size_t>(j)];
        return h;
    };
    for (int j = config_.tau; j >= 1; --j) {
        const bool up = (past[static_cast<std::size_t>(j - 1)] != 0) != config_.history_bit_flip;
        push_context({mhist(j + lag), up ? 1 : -1});
    }
    previous_history_ = mhist(1);
}

std::int64_t Simulation::score(std::size_t agent, std::size_t slot) const
{
    return pool_scores_[slot_pool_[agent * static_cast<std::size_t>(config_.S) + slot]];
}

int Simulation::increment(std::size_t pool_index, const Context& c) const
{
    return payoff_sign(config_.kind) * table(pool_index, c.history) * c.outcome;
}

Action Simulation::table(std::size_t pool_index, std::uint32_t h) const
{
    Action& a = pool_tables_[pool_index * space_.history_count() + h];
    if (a == 0)
        a = space_.action(pool_ids_[pool_index], HistoryCode{h});
    return a;
}

void Simulation::push_context(const Context& c)
{
    for (std::size_t k = 0; k < pool_scores_.size(); ++k)
        pool_scores_[k] += increment(k, c);
    window_.push_back(c);
    if (window_.size() > static_cast<std::size_t>(config_.tau)) {
        const Context old = window_.front();
        window_.pop_front();
        for (std::size_t k = 0; k < pool_scores_.size(); ++k)
            pool_scores_[k] -= increment(k, old);
    }
}

StepRecord Simulation::step()
{
    const auto S = static_cast<std::size_t>(config_.S);
    const std::uint32_t h = history().value;

    StepRecord rec;
    rec.per_agent_payoff.resize(agents_.size());
    std::vector<Action> actions(agents_.size());

    int A = 0;
    for (std::size_t i = 0; i < agents_.size(); ++i) {
        const bool counter = agents_[i].mode == AgentMode::counteradaptive;
        const std::uint32_t* slots = &slot_pool_[i * S];

        std::int64_t target = pool_scores_[slots[0]];
        for (std::size_t s = 1; s < S; ++s) {
            const std::int64_t v = pool_scores_[slots[s]];
            target = counter ? std::min(target, v) : std::max(target, v);
        }
        tied_.clear();
        for (std::size_t s = 0; s < S; ++s)
            if (pool_scores_[slots[s]] == target)
                tied_.push_back(slots[s]);

        Action a = table(tied_[0], h);
        const bool unanimous = std::all_of(tied_.begin(), tied_.end(),
                                           [&](std::uint32_t p) { return table(p, h) == a; });
        if (!unanimous) {
            ++rec.n_undecided;
            a = table(tied_[uniform_index(rng_, tied_.size())], h);
        }
        actions[i] = a;
        A += a;
    }

    int bit;
    int outcome;
    if (A == 0) {
        bit = coin_flip(rng_);
        outcome = 0;
    } else {
        bit = winning_bit(A, config_.history_bit_flip);
        outcome = config_.payoff == PayoffForm::sign ? (A > 0 ? 1 : -1) : A;
    }

    for (std::size_t i = 0; i < agents_.size(); ++i) {
        const Action own = config_.kind == GameKind::dollar ? agents_[i].last_action : actions[i];
        const int g = payoff_sign(config_.kind) * own * outcome;
        rec.per_agent_payoff[i] = g;
        agents_[i].wealth += g;
        agents_[i].last_action = actions[i];
    }

    std::optional<std::uint32_t> scored_history;
    if (config_.kind == GameKind::dollar)
        scored_history = previous_history_;
    else
        scored_history = h;

    last_strategy_gain_ = 0;
    if (scored_history) {
        const Context c{*scored_history, outcome};
        push_context(c);
        std::int64_t total = 0;
        for (std::size_t k = 0; k < pool_scores_.size(); ++k)
            total += static_cast<std::int64_t>(pool_multiplicity_[k]) * increment(k, c);
        last_strategy_gain_ = static_cast<double>(total) / static_cast<double>(config_.N * config_.S);
    }

    previous_history_ = h;
    path_ = append_bit(path_, bit, 64);
    ++t_;

    rec.A = A;
    rec.winning_bit = bit;
    return rec;
}

Simulation init_state(const SimConfig& config)
{
    config.validate();
    Rng rng(config.seed);
    const StrategySpace space(config.space, config.m);
    Roster roster = sample_roster(config.N, config.S, space, rng);
    return Simulation(config, roster, std::move(rng));
}

Simulation init_state(const SimConfig& config, const QuenchedDisorder& disorder)
{
    config.validate();
    if (disorder.memory() != config.m || disorder.strategies_per_agent() != config.S ||
        disorder.space() != config.space || disorder.agent_count() != config.N)
        throw ConfigError("quenched disorder does not match (N, S, m, space) of the config");
    return Simulation(config, disorder.expand(), Rng(config.seed));
}

double batch_means_se(std::span<const double> series, int batches)
{
    const std::size_t n = series.size();
    if (n < 2)
        return 0;
    const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(std::max(batches, 2)), n);
    const std::size_t size = n / b;
    std::vector<double> means(b);
    for (std::size_t i = 0; i < b; ++i) {
        const auto first = series.begin() + static_cast<std::ptrdiff_t>(i * size);
        means[i] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(size), 0.0) /
                   static_cast<double>(size);
    }
    return mean_and_se(means).se;
}

MeanSe mean_and_se(std::span<const double> values)
{
    MeanSe r;
    const auto n = static_cast<double>(values.size());
    if (values.empty())
        return r;
    r.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() < 2)
        return r;
    double ss = 0;
    for (double v : values)
        ss += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(ss / (n - 1) / n);
    return r;
}

RunResult run(Simulation& sim)
{
    const SimConfig& cfg = sim.config();
    for (long t = 0; t < cfg.warmup; ++t)
        sim.step();

    std::vector<std::int64_t> wealth_before;
    for (const auto& a : sim.agents())
        wealth_before.push_back(a.wealth);

    RunResult r;
    const auto steps = static_cast<std::size_t>(cfg.steps);
    r.bit_series.reserve(steps);
    r.aggregate.reserve(steps);
    std::vector<double> agent_series(steps), strategy_series(steps);
    double sum_a = 0, sum_a2 = 0;
    for (std::size_t t = 0; t < steps; ++t) {
        StepRecord rec = sim.step();
        r.bit_series.push_back(static_cast<std::uint8_t>(rec.winning_bit));
        r.aggregate.push_back(rec.A);
        agent_series[t] = std::accumulate(rec.per_agent_payoff.begin(), rec.per_agent_payoff.end(), 0.0) /
                          static_cast<double>(cfg.N);
        strategy_series[t] = sim.last_strategy_gain();
        sum_a += rec.A;
        sum_a2 += static_cast<double>(rec.A) * rec.A;
    }

    r.agent_gain = mean_and_se(agent_series).mean;
    r.agent_gain_se = batch_means_se(agent_series);
    r.strategy_gain = mean_and_se(strategy_series).mean;
    r.strategy_gain_se = batch_means_se(strategy_series);
    const double mean_a = sum_a / static_cast<double>(steps);
    r.volatility = std::max(0.0, sum_a2 / static_cast<double>(steps) - mean_a * mean_a) / cfg.N;

    double c_sum = 0, s_sum = 0;
    int c_n = 0, s_n = 0;
    for (std::size_t i = 0; i < sim.agents().size(); ++i) {
        const auto& a = sim.agents()[i];
        const double g = static_cast<double>(a.wealth - wealth_before[i]) / static_cast<double>(steps);
        r.per_agent_gains.push_back(g);
        if (a.mode == AgentMode::counteradaptive) {
            c_sum += g;
            ++c_n;
        } else {
            s_sum += g;
            ++s_n;
        }
    }
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    r.c_agent_gain = c_n ? c_sum / c_n : nan;
    r.s_agent_gain = s_n ? s_sum / s_n : nan;
    return r;
}

RunResult run(const SimConfig& config)
{
    Simulation sim = init_state(config);
    return run(sim);
}

RunResult run(const SimConfig& config, const QuenchedDisorder& disorder)
{
    Simulation sim = init_state(config, disorder);
    return run(sim);
}

std::uint64_t ensemble_run_seed(std::uint64_t master, int run)
{
    return derive_seed(master, "run", {static_cast<std::uint64_t>(run)});
}

std::uint64_t restart_seed(std::uint64_t master, int restart)
{
    return derive_seed(master, "restart", {static_cast<std::uint64_t>(restart)});
}

GainReport restart_gains(const SimConfig& config, const QuenchedDisorder& disorder, int restarts,
                         unsigned workers)
{
    config.validate();
    if (restarts < 1)
        throw ConfigError("need at least one restart");
    const auto n = static_cast<std::size_t>(restarts);
    std::vector<double> agent(n), strategy(n);
    parallel_for(
        n,
        [&](std::size_t r) {
            SimConfig c = config;
            c.warm_start = true;
            c.seed = restart_seed(config.seed, static_cast<int>(r));
            const RunResult res = run(c, disorder);
            agent[r] = res.agent_gain;
            strategy[r] = res.strategy_gain;
        },
        workers);
    GainReport g;
    g.runs = restarts;
    const MeanSe a = mean_and_se(agent), s = mean_and_se(strategy);
    g.agent_gain = a.mean;
    g.agent_se = a.se;
    g.strategy_gain = s.mean;
    g.strategy_se = s.se;
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    g.c_minus_s = g.c_minus_s_se = g.c_gain = g.s_gain = nan;
    return g;
}

GainReport ensemble_gains(const SimConfig& config, int runs, unsigned workers)
{
    config.validate();
    if (runs < 1)
        throw ConfigError("ensemble needs at least one run");
    const auto n = static_cast<std::size_t>(runs);
    std::vector<double> agent(n), strategy(n), diff(n), c_gain(n), s_gain(n);
    parallel_for(
        n,
        [&](std::size_t r) {
            SimConfig c = config;
            c.seed = ensemble_run_seed(config.seed, static_cast<int>(r));
            const RunResult res = run(c);
            agent[r] = res.agent_gain;
            strategy[r] = res.strategy_gain;
            diff[r] = res.c_agent_gain - res.s_agent_gain;
            c_gain[r] = res.c_agent_gain;
            s_gain[r] = res.s_agent_gain;
        },
        workers);

    GainReport g;
    g.runs = runs;
    const MeanSe a = mean_and_se(agent), s = mean_and_se(strategy), d = mean_and_se(diff);
    g.agent_gain = a.mean;
    g.agent_se = a.se;
    g.strategy_gain = s.mean;
    g.strategy_se = s.se;
    g.c_minus_s = d.mean;
    g.c_minus_s_se = d.se;
    g.c_gain = mean_and_se(c_gain).mean;
    g.s_gain = mean_and_se(s_gain).mean;
    return g;
}

} // namespace thgame
