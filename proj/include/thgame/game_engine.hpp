#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "thgame/rng.hpp"
#include "thgame/strategy_space.hpp"

namespace thgame {

enum class GameKind { minority, majority, dollar };

inline constexpr GameKind kAllGameKinds[] = {GameKind::minority, GameKind::majority,
                                             GameKind::dollar};

std::string_view to_string(GameKind kind);
GameKind parse_game_kind(std::string_view text);

/// -1 for the minority rule, +1 for the majority-type rules.
constexpr int payoff_sign(GameKind kind) { return kind == GameKind::minority ? -1 : 1; }

/// Number of most recent actions/histories the payoff looks back past the current one.
constexpr int payoff_lag(GameKind kind) { return kind == GameKind::dollar ? 1 : 0; }

enum class AgentMode { standard, counteradaptive };

/// sign: +-1 points per step. linear: +-a*A, kept for experimentation only.
enum class PayoffForm { sign, linear };

struct SimConfig {
    int N = 31;
    int m = 2;
    int S = 2;
    int tau = 1;
    GameKind kind = GameKind::minority;
    long steps = 20000;
    long warmup = 400;
    int n_counteradaptive = 0;
    std::uint64_t seed = 0;
    SpaceKind space = SpaceKind::reduced;
    /// When set, the winning bit is 1 iff A(t) < 0 instead of A(t) > 0.
    bool history_bit_flip = false;
    PayoffForm payoff = PayoffForm::sign;
    /// Count the initial bits as already played steps, so score windows start
    /// full instead of empty. The run then starts in a uniformly drawn state of
    /// the analytic chain; restart_gains always sets it.
    bool warm_start = false;

    void validate() const;
};

/// Winning bit for an aggregate vote; A must be non-zero.
constexpr int winning_bit(int aggregate, bool flip)
{
    return (aggregate > 0) != flip ? 1 : 0;
}

struct StepRecord {
    int A = 0;
    int winning_bit = 0;
    std::vector<int> per_agent_payoff;
    int n_undecided = 0;
};

struct AgentState {
    StrategyTuple strategy_ids;
    AgentMode mode = AgentMode::standard;
    std::int64_t wealth = 0;
    /// Action of the previous step, 0 before the first step.
    Action last_action = 0;
};

struct RunResult {
    std::vector<std::uint8_t> bit_series;
    std::vector<int> aggregate;
    double agent_gain = 0;
    double agent_gain_se = 0;
    double strategy_gain = 0;
    double strategy_gain_se = 0;
    double volatility = 0;
    std::vector<double> per_agent_gains;
    /// Mean per-step gain of counteradaptive / standard agents; NaN for an empty group.
    double c_agent_gain = 0;
    double s_agent_gain = 0;
};

/*
 * One THMG / THMAJG / TH$G realization.
 *
 * Virtual scores are shared per distinct strategy: every agent holding
 * strategy k sees the same rolling sum, since the increment only depends on
 * k, the acting history and A(t). The rolling window stores the (history,
 * A) context of the last tau scored steps so the oldest increment can be
 * subtracted when it falls out.
 *
 * m+tau (+1 for the dollar game) initial bits are drawn uniformly. Score
 * windows start empty unless config.warm_start is set, in which case the
 * windows are rebuilt from those bits.
 *
 * Random draws, in order: roster (fresh disorders only), ceil(bits/64) words
 * for the initial bits (newest bit = LSB of the first word), then per step a uniform pick among tied strategies
 * for each agent whose tied strategies disagree, in agent order, and a fair
 * coin whenever A(t) = 0.
 */
class Simulation {
public:
    /// Agents are built from the roster in order; the first n_counteradaptive are c-agents.
    Simulation(const SimConfig& config, const Roster& roster, Rng rng);

    StepRecord step();

    const SimConfig& config() const { return config_; }
    const std::vector<AgentState>& agents() const { return agents_; }
    HistoryCode history() const { return history_of(path_, config_.m); }
    PathCode path() const { return path_; }
    long steps_taken() const { return t_; }

    /// Current rolling score of an agent's s-th strategy.
    std::int64_t score(std::size_t agent, std::size_t slot) const;
    /// Number of increments currently in every score window.
    std::size_t window_length() const { return window_.size(); }

    /// Mean virtual increment over all N*S strategy slots in the last step.
    double last_strategy_gain() const { return last_strategy_gain_; }

private:
    struct Context {
        std::uint32_t history;
        int outcome; // sign(A) or A, already combined with the payoff form
    };

    int increment(std::size_t pool_index, const Context& c) const;
    Action table(std::size_t pool_index, std::uint32_t h) const;
    void push_context(const Context& c);

    SimConfig config_;
    StrategySpace space_;
    Rng rng_;
    std::vector<AgentState> agents_;
    std::vector<std::uint32_t> slot_pool_; // agent * S + s -> pool index
    std::vector<std::uint64_t> pool_ids_;  // pool index -> strategy index
    mutable std::vector<Action> pool_tables_; // pool index * 2^m + h, 0 = not yet computed
    std::vector<int> pool_multiplicity_;
    std::vector<std::int64_t> pool_scores_;
    std::deque<Context> window_;
    PathCode path_;
    std::optional<std::uint32_t> previous_history_;
    long t_ = 0;
    double last_strategy_gain_ = 0;
    std::vector<std::uint32_t> tied_;
};

/// Fresh quenched disorder drawn from the config seed.
Simulation init_state(const SimConfig& config);
/// Agents expanded from the tensor in tensor order.
Simulation init_state(const SimConfig& config, const QuenchedDisorder& disorder);

RunResult run(const SimConfig& config);
RunResult run(const SimConfig& config, const QuenchedDisorder& disorder);
RunResult run(Simulation& sim);

struct GainReport {
    int runs = 0;
    double agent_gain = 0;
    double agent_se = 0;
    double strategy_gain = 0;
    double strategy_se = 0;
    /// Mean over runs of (c-agent gain - s-agent gain); NaN without c-agents.
    double c_minus_s = 0;
    double c_minus_s_se = 0;
    double c_gain = 0;
    double s_gain = 0;
};

/// Seed of run r in an ensemble whose master seed is config.seed.
std::uint64_t ensemble_run_seed(std::uint64_t master, int run);

/// Independent runs with fresh disorders, executed on a bounded worker pool.
GainReport ensemble_gains(const SimConfig& config, int runs, unsigned workers = 0);

/// Seed of restart r of a same-disorder ensemble.
std::uint64_t restart_seed(std::uint64_t master, int restart);

/*
 * Restarts on one fixed disorder from independent uniform initial states.
 * This is the Monte Carlo counterpart of the steady state reached from the
 * uniform vector, including for reducible chains. SEs are across restarts.
 */
GainReport restart_gains(const SimConfig& config, const QuenchedDisorder& disorder, int restarts,
                         unsigned workers = 0);

/// Standard error of the mean from non-overlapping batch means.
double batch_means_se(std::span<const double> series, int batches = 50);

struct MeanSe {
    double mean = 0;
    double se = 0;
};
MeanSe mean_and_se(std::span<const double> values);

} // namespace thgame
