#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "thgame/game_engine.hpp"
#include "thgame/strategy_space.hpp"

namespace thgame {

/*
 * Exact Markov-chain description of the time-horizon games with S = 2.
 *
 * Chain state: the last W winning bits, most recent bit least significant,
 * with W = m + tau for the minority and majority games and W = m + tau + 1
 * for the dollar game (its payoff pairs A(t) with the action taken on the
 * history one step earlier, so one more bit is needed to replay the window).
 * A transition appends the new winning bit and drops the oldest one.
 */

constexpr int kMaxPathBits = 16;

/// Number of bits in a chain state for the given game.
constexpr int state_bits(GameKind kind, int m, int tau) { return m + tau + payoff_lag(kind); }

/// R x 2^m matrix of strategy actions (row = strategy in space order, column = history).
class ActionTable {
public:
    explicit ActionTable(const StrategySpace& space);

    int memory() const { return m_; }
    std::size_t strategies() const { return rows_; }
    std::size_t histories() const { return cols_; }
    Action operator()(std::size_t k, std::uint32_t h) const { return data_[k * cols_ + h]; }

private:
    int m_;
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Action> data_;
};

/*
 * Per-strategy point change for one scored step.
 *
 * Entries are keyed by a transition window of m + 1 + lag bits: bit 0 is the
 * new winning bit, and the acting history of the scored action sits in bits
 * [1 + lag, 1 + lag + m). For the minority and majority games the window is
 * just (acting history, new bit), i.e. one allowed history transition.
 */
class ScoreIncrementTable {
public:
    ScoreIncrementTable(GameKind kind, const ActionTable& actions, bool history_bit_flip = false);

    GameKind kind() const { return kind_; }
    int memory() const { return m_; }
    int window_bits() const { return bits_; }
    std::size_t strategies() const { return r_; }
    std::span<const int> increments(std::uint32_t window) const
    {
        return {data_.data() + static_cast<std::size_t>(window) * r_, r_};
    }
    int operator()(std::uint32_t window, std::size_t k) const { return data_[window * r_ + k]; }

    /// Minority/majority only: vector for the transition from one m-bit history to the next.
    std::span<const int> transition(HistoryCode from, HistoryCode to) const;

private:
    GameKind kind_;
    int m_;
    int bits_;
    std::size_t r_;
    std::vector<int> data_;
};

/// Reduced-space increment table; m <= 6.
ScoreIncrementTable score_increment_table(GameKind kind, int m, bool history_bit_flip = false);

/// Accumulated strategy points along every chain state's last tau scored steps.
class PathScoreTable {
public:
    PathScoreTable(const ScoreIncrementTable& increments, int tau);

    int tau() const { return tau_; }
    int state_bits() const { return bits_; }
    std::size_t strategies() const { return r_; }
    std::size_t states() const { return std::size_t{1} << bits_; }
    int operator()(std::size_t k, std::uint64_t state) const
    {
        return data_[static_cast<std::size_t>(state) * r_ + k];
    }
    std::span<const std::int16_t> column(std::uint64_t state) const
    {
        return {data_.data() + static_cast<std::size_t>(state) * r_, r_};
    }

private:
    int tau_;
    int bits_;
    std::size_t r_;
    std::vector<std::int16_t> data_;
};

/// Reduced-space path table; m + tau <= 16.
PathScoreTable path_score_table(GameKind kind, int m, int tau, bool history_bit_flip = false);

/// Determined net vote A_D and undecided count N_U per chain state.
struct VoteSplit {
    std::vector<int> determined;
    std::vector<int> undecided;
};

VoteSplit decided_and_undecided(GameKind kind, const QuenchedDisorder& disorder, int tau,
                                bool history_bit_flip = false);
VoteSplit decided_and_undecided(const PathScoreTable& scores, const ActionTable& actions,
                                const QuenchedDisorder& disorder);

/*
 * Column-stochastic transition matrix over chain states. Each state has
 * exactly two successors (append 0 or 1), so the matrix is stored as the
 * probability of appending a 1.
 */
class TransitionMatrix {
public:
    TransitionMatrix(int state_bits, std::vector<double> prob_one);

    int state_bits() const { return bits_; }
    std::size_t size() const { return prob_one_.size(); }
    double prob_one(std::uint64_t from) const { return prob_one_[from]; }
    std::uint64_t successor(std::uint64_t from, int bit) const
    {
        return append_bit(PathCode{from}, bit, bits_).value;
    }
    /// T[to, from] = probability that `from` is followed by `to`.
    double operator()(std::uint64_t to, std::uint64_t from) const;
    /// 0/1 adjacency of allowed transitions.
    bool allowed(std::uint64_t to, std::uint64_t from) const;
    double column_sum(std::uint64_t from) const;

    /// y = T x
    std::vector<double> apply(std::span<const double> x) const;

private:
    int bits_;
    std::vector<double> prob_one_;
};

/// Probability that a fair-coin vote of `undecided` agents around `determined` yields A > 0,
/// A < 0 and A = 0, evaluated exactly.
struct VoteOutcome {
    double positive = 0;
    double negative = 0;
    double tie = 0;
    double mean_abs = 0;      ///< E|A|
    double partial_pos = 0;   ///< E[A ; A > 0]
    double partial_neg = 0;   ///< E[A ; A < 0]
};
VoteOutcome vote_outcome(int determined, int undecided);

TransitionMatrix transition_matrix(const VoteSplit& votes, int state_bits, bool history_bit_flip = false);
TransitionMatrix transition_matrix(GameKind kind, const QuenchedDisorder& disorder, int tau,
                                   bool history_bit_flip = false);

struct SteadyState {
    std::vector<double> probability;
    double residual = 0;  ///< ||T p - p||_1
    long iterations = 0;
};

/// Chains up to this size fall back to dense squaring when power iteration stalls.
constexpr std::size_t kMaxDenseStates = 256;

/*
 * Limit of the lazy chain (I + T)/2 started from the uniform vector, i.e. the
 * uniform-start steady state (a mixture over closed classes when T is
 * reducible). Power iteration until ||T p - p||_1 <= tolerance; if that
 * takes more than max_iterations and the chain is small, the lazy matrix is
 * squared 80 times instead.
 */
SteadyState steady_state(const TransitionMatrix& t, double tolerance = 1e-13,
                         long max_iterations = 1'000'000);

/*
 * Per-step gains from a solved chain.
 *
 * agent_gain is the exact stationary expectation of the mean agent payoff:
 * -E|A|/N (minority), +E|A|/N (majority), E[A(t-1) sign A(t)]/N (dollar),
 * with A binomially spread around A_D by the undecided agents.
 * determined_vote_gain is the coarser +-|A_D| . mu / N form, which agrees
 * with agent_gain whenever no state has N_U > |A_D|.
 * strategy_gain is (s_mu . kappa) . mu / (2 N tau): the tau-step path score
 * turned into a per-step figure.
 */
struct AnalyticReport {
    GameKind kind = GameKind::minority;
    int m = 0;
    int tau = 0;
    int N = 0;
    double agent_gain = 0;
    double determined_vote_gain = 0;
    double strategy_gain = 0;
    /// Strategy gain from the expected next-step increment; equals strategy_gain at stationarity.
    double strategy_gain_next_step = 0;
    SteadyState steady;
    VoteSplit votes;
};

AnalyticReport analyze(GameKind kind, const QuenchedDisorder& disorder, int tau,
                       bool history_bit_flip = false);

double expected_agent_gain(GameKind kind, const QuenchedDisorder& disorder, int tau);
double expected_strategy_gain(GameKind kind, const QuenchedDisorder& disorder, int tau);

/// +-|A_D| . mu / N with the minus sign for the minority game.
double determined_vote_gain(GameKind kind, const VoteSplit& votes, std::span<const double> mu, int agents);

} // namespace thgame
