#include "thgame/markov_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "thgame/errors.hpp"

namespace thgame {

namespace {

constexpr std::uint64_t kMaxPathTableEntries = std::uint64_t{1} << 28;

void require_pairs(const QuenchedDisorder& d)
{
    if (d.strategies_per_agent() != 2)
        throw ConfigError("the analytic chain is defined for S = 2 only");
    if (d.agent_count() < 1)
        throw ConfigError("disorder holds no agents");
    // with even N a zero vote leaves a 0 in the score windows, which the bit path cannot encode
    if (d.agent_count() % 2 == 0)
        throw ConfigError("the analytic chain requires an odd number of agents");
}

void require_path_size(int m, int tau)
{
    if (tau < 1)
        throw ConfigError("tau must be >= 1");
    if (m + tau > kMaxPathBits)
        throw ConfigError("m + tau = " + std::to_string(m + tau) + " exceeds the path size limit of 16");
}

} // namespace

ActionTable::ActionTable(const StrategySpace& space)
    : m_(space.memory()), rows_(space.size()), cols_(space.history_count()), data_(rows_ * cols_)
{
    for (std::size_t k = 0; k < rows_; ++k)
        for (std::uint32_t h = 0; h < cols_; ++h)
            data_[k * cols_ + h] = space.action(k, HistoryCode{h});
}

ScoreIncrementTable::ScoreIncrementTable(GameKind kind, const ActionTable& actions, bool flip)
    : kind_(kind), m_(actions.memory()), bits_(actions.memory() + 1 + payoff_lag(kind)),
      r_(actions.strategies())
{
    const std::size_t windows = std::size_t{1} << bits_;
    data_.resize(windows * r_);
    const int lag = payoff_lag(kind);
    const auto history_mask = static_cast<std::uint32_t>(low_mask(m_));
    for (std::uint32_t w = 0; w < windows; ++w) {
        const int bit = static_cast<int>(w & 1);
        const int outcome = (bit == 1) != flip ? 1 : -1; // sign of A(t)
        const std::uint32_t h = (w >> (1 + lag)) & history_mask;
        for (std::size_t k = 0; k < r_; ++k)
            data_[w * r_ + k] = payoff_sign(kind) * actions(k, h) * outcome;
    }
}

std::span<const int> ScoreIncrementTable::transition(HistoryCode from, HistoryCode to) const
{
    if (kind_ == GameKind::dollar)
        throw ConfigError("dollar increments depend on two consecutive transitions");
    const auto mask = static_cast<std::uint32_t>(low_mask(m_));
    if (from.value > mask || to.value > mask || ((from.value << 1) & mask) != (to.value & ~1u & mask))
        throw ConfigError("disallowed history transition");
    return increments((from.value << 1) | (to.value & 1));
}

ScoreIncrementTable score_increment_table(GameKind kind, int m, bool history_bit_flip)
{
    if (m < 1 || m > 6)
        throw ConfigError("increment tables are limited to 1 <= m <= 6");
    return ScoreIncrementTable(kind, ActionTable(build_reduced_strategy_space(m)), history_bit_flip);
}

PathScoreTable::PathScoreTable(const ScoreIncrementTable& inc, int tau)
    : tau_(tau), bits_(inc.memory() + tau + payoff_lag(inc.kind())), r_(inc.strategies())
{
    require_path_size(inc.memory(), tau);
    const std::size_t states = std::size_t{1} << bits_;
    if (static_cast<std::uint64_t>(states) * r_ > kMaxPathTableEntries)
        throw ConfigError("path score table would exceed 2^28 entries");
    data_.assign(states * r_, 0);
    const std::uint64_t window_mask = low_mask(inc.window_bits());
    for (std::size_t s = 0; s < states; ++s) {
        std::int16_t* col = data_.data() + s * r_;
        for (int j = 0; j < tau; ++j) {
            const auto w = static_cast<std::uint32_t>((s >> j) & window_mask);
            const auto v = inc.increments(w);
            for (std::size_t k = 0; k < r_; ++k)
                col[k] = static_cast<std::int16_t>(col[k] + v[k]);
        }
    }
}

PathScoreTable path_score_table(GameKind kind, int m, int tau, bool history_bit_flip)
{
    require_path_size(m, tau);
    return PathScoreTable(
        ScoreIncrementTable(kind, ActionTable(build_reduced_strategy_space(m)), history_bit_flip), tau);
}

VoteSplit decided_and_undecided(const PathScoreTable& scores, const ActionTable& actions,
                                const QuenchedDisorder& disorder)
{
    require_pairs(disorder);
    if (scores.strategies() != actions.strategies() || actions.strategies() != disorder.axis_length())
        throw ConfigError("score table, action table and disorder disagree on the strategy space");
    const std::size_t states = scores.states();
    const auto history_mask = static_cast<std::uint32_t>(low_mask(actions.memory()));

    VoteSplit v;
    v.determined.assign(states, 0);
    v.undecided.assign(states, 0);
    for (std::size_t s = 0; s < states; ++s) {
        const auto h = static_cast<std::uint32_t>(s) & history_mask;
        int det = 0, und = 0;
        for (const auto& [tuple, count] : disorder.entries()) {
            const auto i = tuple[0], j = tuple[1];
            const int si = scores(i, s), sj = scores(j, s);
            const Action ai = actions(i, h), aj = actions(j, h);
            if (si > sj)
                det += count * ai;
            else if (sj > si)
                det += count * aj;
            else if (ai == aj)
                det += count * ai;
            else
                und += count;
        }
        v.determined[s] = det;
        v.undecided[s] = und;
    }
    return v;
}

VoteSplit decided_and_undecided(GameKind kind, const QuenchedDisorder& disorder, int tau,
                                bool history_bit_flip)
{
    require_pairs(disorder);
    require_path_size(disorder.memory(), tau);
    const ActionTable actions(StrategySpace(disorder.space(), disorder.memory()));
    const PathScoreTable scores(ScoreIncrementTable(kind, actions, history_bit_flip), tau);
    return decided_and_undecided(scores, actions, disorder);
}

TransitionMatrix::TransitionMatrix(int state_bits, std::vector<double> prob_one)
    : bits_(state_bits), prob_one_(std::move(prob_one))
{
    if (state_bits < 1 || state_bits > kMaxPathBits + 1)
        throw ConfigError("transition matrix state width out of range");
    if (prob_one_.size() != (std::size_t{1} << state_bits))
        throw ConfigError("transition matrix needs one probability per state");
    for (double p : prob_one_)
        if (!(p >= 0.0 && p <= 1.0))
            throw ConfigError("transition probabilities must lie in [0, 1]");
}

bool TransitionMatrix::allowed(std::uint64_t to, std::uint64_t from) const
{
    return to == successor(from, 0) || to == successor(from, 1);
}

double TransitionMatrix::operator()(std::uint64_t to, std::uint64_t from) const
{
    if (to == successor(from, 1))
        return prob_one_[from];
    if (to == successor(from, 0))
        return 1.0 - prob_one_[from];
    return 0.0;
}

double TransitionMatrix::column_sum(std::uint64_t from) const
{
    double sum = 0;
    for (std::uint64_t to = 0; to < size(); ++to)
        sum += (*this)(to, from);
    return sum;
}

std::vector<double> TransitionMatrix::apply(std::span<const double> x) const
{
    std::vector<double> y(size(), 0.0);
    for (std::uint64_t s = 0; s < size(); ++s) {
        const double p1 = prob_one_[s];
        y[successor(s, 1)] += p1 * x[s];
        y[successor(s, 0)] += (1.0 - p1) * x[s];
    }
    return y;
}

VoteOutcome vote_outcome(int determined, int undecided)
{
    if (undecided < 0)
        throw ConfigError("undecided count must be non-negative");
    VoteOutcome o;
    // C(U, x) / 2^U by recurrence; long double keeps 2^-U representable for any realistic U.
    long double p = std::pow(0.5L, undecided);
    for (int x = 0; x <= undecided; ++x) {
        const int a = determined + 2 * x - undecided;
        const auto pd = static_cast<double>(p);
        if (a > 0) {
            o.positive += pd;
            o.partial_pos += pd * a;
        } else if (a < 0) {
            o.negative += pd;
            o.partial_neg += pd * a;
        } else {
            o.tie += pd;
        }
        o.mean_abs += pd * std::abs(a);
        p = p * (undecided - x) / (x + 1);
    }
    return o;
}

TransitionMatrix transition_matrix(const VoteSplit& votes, int bits, bool history_bit_flip)
{
    std::vector<double> p1(votes.determined.size());
    for (std::size_t s = 0; s < p1.size(); ++s) {
        const VoteOutcome o = vote_outcome(votes.determined[s], votes.undecided[s]);
        const double up = history_bit_flip ? o.negative : o.positive;
        p1[s] = std::min(1.0, up + 0.5 * o.tie);
    }
    return TransitionMatrix(bits, std::move(p1));
}

TransitionMatrix transition_matrix(GameKind kind, const QuenchedDisorder& disorder, int tau,
                                   bool history_bit_flip)
{
    return transition_matrix(decided_and_undecided(kind, disorder, tau, history_bit_flip),
                             state_bits(kind, disorder.memory(), tau), history_bit_flip);
}

SteadyState steady_state(const TransitionMatrix& t, double tolerance, long max_iterations)
{
    SteadyState st;
    const std::size_t n = t.size();
    std::vector<double> p(n, 1.0 / static_cast<double>(n));
    for (long it = 0; it <= max_iterations; ++it) {
        std::vector<double> y = t.apply(p);
        double residual = 0;
        for (std::size_t i = 0; i < n; ++i)
            residual += std::abs(y[i] - p[i]);
        if (residual <= tolerance) {
            st.probability = std::move(p);
            st.residual = residual;
            st.iterations = it;
            return st;
        }
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = 0.5 * (p[i] + y[i]);
            total += p[i];
        }
        for (double& v : p)
            v /= total;
    }
    if (n > kMaxDenseStates)
        throw NumericalError("steady state did not converge within " + std::to_string(max_iterations) +
                             " iterations");

    // Slowly mixing chain (e.g. a transient class that leaks into absorbing
    // states at rate 1e-6). Square the lazy matrix until it reaches its limit.
    std::vector<double> L(n * n, 0.0); // L[to * n + from]
    for (std::size_t from = 0; from < n; ++from) {
        L[from * n + from] += 0.5;
        L[t.successor(from, 1) * n + from] += 0.5 * t.prob_one(from);
        L[t.successor(from, 0) * n + from] += 0.5 * (1.0 - t.prob_one(from));
    }
    std::vector<double> sq(n * n);
    for (int k = 0; k < 80; ++k) {
        std::fill(sq.begin(), sq.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double a = L[i * n + j];
                if (a == 0.0)
                    continue;
                for (std::size_t c = 0; c < n; ++c)
                    sq[i * n + c] += a * L[j * n + c];
            }
        for (std::size_t c = 0; c < n; ++c) { // keep columns stochastic against rounding drift
            double total = 0;
            for (std::size_t i = 0; i < n; ++i)
                total += sq[i * n + c];
            for (std::size_t i = 0; i < n; ++i)
                sq[i * n + c] /= total;
        }
        L.swap(sq);
    }
    for (std::size_t i = 0; i < n; ++i) {
        double v = 0;
        for (std::size_t c = 0; c < n; ++c)
            v += L[i * n + c];
        p[i] = v / static_cast<double>(n);
    }
    const std::vector<double> y = t.apply(p);
    double residual = 0;
    for (std::size_t i = 0; i < n; ++i)
        residual += std::abs(y[i] - p[i]);
    if (residual > std::max(tolerance, 1e-12))
        throw NumericalError("steady state did not converge (residual " + std::to_string(residual) + ")");
    st.probability = std::move(p);
    st.residual = residual;
    st.iterations = max_iterations;
    return st;
}

double determined_vote_gain(GameKind kind, const VoteSplit& votes, std::span<const double> mu, int agents)
{
    double g = 0;
    for (std::size_t s = 0; s < mu.size(); ++s)
        g += std::abs(votes.determined[s]) * mu[s];
    return payoff_sign(kind) * g / agents;
}

AnalyticReport analyze(GameKind kind, const QuenchedDisorder& disorder, int tau, bool history_bit_flip)
{
    require_pairs(disorder);
    const int m = disorder.memory();
    require_path_size(m, tau);

    const ActionTable actions(StrategySpace(disorder.space(), m));
    const ScoreIncrementTable inc(kind, actions, history_bit_flip);
    const PathScoreTable scores(inc, tau);

    AnalyticReport rep;
    rep.kind = kind;
    rep.m = m;
    rep.tau = tau;
    rep.N = disorder.agent_count();
    rep.votes = decided_and_undecided(scores, actions, disorder);

    const int bits = scores.state_bits();
    const std::size_t states = scores.states();
    std::vector<VoteOutcome> outcome(states);
    for (std::size_t s = 0; s < states; ++s)
        outcome[s] = vote_outcome(rep.votes.determined[s], rep.votes.undecided[s]);
    const TransitionMatrix t = transition_matrix(rep.votes, bits, history_bit_flip);
    rep.steady = steady_state(t);
    const auto& mu = rep.steady.probability;
    const double n = rep.N;

    double agent = 0;
    for (std::size_t s = 0; s < states; ++s) {
        if (kind != GameKind::dollar) {
            agent += mu[s] * outcome[s].mean_abs;
            continue;
        }
        // E[A(t) sign A(t+1)]: A(t) restricted to the branch that appends each bit
        const double on_one = history_bit_flip ? outcome[s].partial_neg : outcome[s].partial_pos;
        const double on_zero = history_bit_flip ? outcome[s].partial_pos : outcome[s].partial_neg;
        for (int b = 0; b < 2; ++b) {
            const auto& next = outcome[t.successor(s, b)];
            agent += mu[s] * (b ? on_one : on_zero) * (next.positive - next.negative);
        }
    }
    rep.agent_gain = (kind == GameKind::minority ? -agent : agent) / n;
    rep.determined_vote_gain = determined_vote_gain(kind, rep.votes, mu, rep.N);

    const std::vector<int> kappa = strategy_counts(disorder);
    std::vector<std::pair<std::size_t, int>> used;
    for (std::size_t k = 0; k < kappa.size(); ++k)
        if (kappa[k])
            used.emplace_back(k, kappa[k]);

    const std::uint64_t window_mask = low_mask(inc.window_bits());
    double path_total = 0, next_total = 0;
    for (std::size_t s = 0; s < states; ++s) {
        double weighted = 0;
        for (auto [k, c] : used)
            weighted += c * scores(k, s);
        path_total += mu[s] * weighted;

        for (int b = 0; b < 2; ++b) {
            const double pb = b ? t.prob_one(s) : 1.0 - t.prob_one(s);
            if (pb == 0.0)
                continue;
            const auto w = static_cast<std::uint32_t>(((s << 1) | static_cast<std::uint64_t>(b)) & window_mask);
            double step = 0;
            for (auto [k, c] : used)
                step += c * inc(w, k);
            next_total += mu[s] * pb * step;
        }
    }
    rep.strategy_gain = path_total / (2.0 * n * tau);
    rep.strategy_gain_next_step = next_total / (2.0 * n);
    return rep;
}

double expected_agent_gain(GameKind kind, const QuenchedDisorder& disorder, int tau)
{
    return analyze(kind, disorder, tau).agent_gain;
}

double expected_strategy_gain(GameKind kind, const QuenchedDisorder& disorder, int tau)
{
    return analyze(kind, disorder, tau).strategy_gain;
}

} // namespace thgame
