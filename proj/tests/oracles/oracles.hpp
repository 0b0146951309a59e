#pragma once

// Test-only reference implementations. They are written from the model
// definitions directly and share no code with the library beyond plain types.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "thgame/game_engine.hpp"

namespace oracle {

using thgame::GameKind;

// Reduced strategy space by explicit enumeration: row r < 2^m is
// -(-1)^(sum_j r_j * h_{m-1-j}), row R-1-r is the negation of row r.
inline int rss_action(int m, std::uint64_t k, std::uint32_t h)
{
    const std::uint64_t R = std::uint64_t{2} << m;
    int sign = 1;
    if (k >= R / 2) {
        k = R - 1 - k;
        sign = -1;
    }
    int dot = 0;
    for (int j = 0; j < m; ++j)
        dot += static_cast<int>((k >> j) & 1u) * static_cast<int>((h >> (m - 1 - j)) & 1u);
    return sign * (dot % 2 == 0 ? -1 : 1);
}

inline int full_action(std::uint64_t k, std::uint32_t h) { return ((k >> h) & 1u) ? 1 : -1; }

inline int action(thgame::SpaceKind space, int m, std::uint64_t k, std::uint32_t h)
{
    return space == thgame::SpaceKind::reduced ? rss_action(m, k, h) : full_action(k, h);
}

inline int sgn(int x) { return (x > 0) - (x < 0); }

// Most recent of `bits` (chronological) ending before index `end`, newest as LSB.
inline std::uint32_t history_before(const std::vector<int>& bits, std::size_t end, int m)
{
    std::uint32_t h = 0;
    for (int j = 0; j < m; ++j)
        h |= static_cast<std::uint32_t>(bits[end - 1 - static_cast<std::size_t>(j)]) << j;
    return h;
}

struct TraceStep {
    int A = 0;
    int bit = 0;
    std::vector<int> payoff;
    double strategy_gain = 0;
};

/*
 * Naive simulator: keeps the whole bit/outcome record and recomputes every
 * score from scratch each step. Consumes the generator in the documented
 * order (initial bit words, tie picks in agent order, coin on A = 0).
 */
class ReferenceSim {
public:
    ReferenceSim(const thgame::SimConfig& c, const thgame::Roster& roster, thgame::Rng rng)
        : c_(c), roster_(roster), rng_(std::move(rng))
    {
        lag_ = c.kind == GameKind::dollar ? 1 : 0;
        const int nbits = c.m + c.tau + lag_;
        std::vector<int> newest_first;
        for (int i = 0; i < nbits; i += 64) {
            const std::uint64_t w = rng_();
            for (int j = i; j < std::min(nbits, i + 64); ++j)
                newest_first.push_back(static_cast<int>((w >> (j - i)) & 1u));
        }
        bits_.assign(newest_first.rbegin(), newest_first.rend());
        initial_ = bits_.size();
        for (int b : bits_)
            outcome_.push_back((b != 0) != c.history_bit_flip ? 1 : -1);
        last_action_.assign(roster.size(), 0);
    }

    int score(std::uint64_t k) const
    {
        const int sign = c_.kind == GameKind::minority ? -1 : 1;
        std::size_t T = bits_.size();
        std::size_t first = T - static_cast<std::size_t>(c_.tau);
        if (!c_.warm_start) // only steps actually played are scored
            first = std::max(first, initial_ + static_cast<std::size_t>(lag_));
        int total = 0;
        for (std::size_t u = first; u < T; ++u) {
            const std::uint32_t h = history_before(bits_, u - static_cast<std::size_t>(lag_), c_.m);
            total += sign * action(c_.space, c_.m, k, h) * outcome_[u];
        }
        return total;
    }

    TraceStep step()
    {
        const std::uint32_t h = history_before(bits_, bits_.size(), c_.m);
        std::vector<int> acts(roster_.size());
        int A = 0;
        for (std::size_t i = 0; i < roster_.size(); ++i) {
            const bool counter = static_cast<int>(i) < c_.n_counteradaptive;
            std::vector<int> sc;
            for (auto k : roster_[i])
                sc.push_back(score(k));
            int target = sc[0];
            for (int v : sc)
                target = counter ? std::min(target, v) : std::max(target, v);
            std::vector<std::uint64_t> tied;
            for (std::size_t s = 0; s < sc.size(); ++s)
                if (sc[s] == target)
                    tied.push_back(roster_[i][s]);
            int a = action(c_.space, c_.m, tied[0], h);
            bool same = true;
            for (auto k : tied)
                same = same && action(c_.space, c_.m, k, h) == a;
            if (!same) {
                std::uniform_int_distribution<std::uint64_t> pick(0, tied.size() - 1);
                a = action(c_.space, c_.m, tied[pick(rng_)], h);
            }
            acts[i] = a;
            A += a;
        }
        TraceStep st;
        st.A = A;
        int outcome;
        if (A == 0) {
            st.bit = static_cast<int>(rng_() >> 63);
            outcome = 0;
        } else {
            st.bit = (A > 0) != c_.history_bit_flip ? 1 : 0;
            outcome = sgn(A);
        }
        const int sign = c_.kind == GameKind::minority ? -1 : 1;
        for (std::size_t i = 0; i < acts.size(); ++i) {
            const int own = c_.kind == GameKind::dollar ? last_action_[i] : acts[i];
            st.payoff.push_back(sign * own * outcome);
            last_action_[i] = acts[i];
        }
        // strategy gain of this step over all N*S slots
        const std::uint32_t scored = c_.kind == GameKind::dollar ? history_before(bits_, bits_.size() - 1, c_.m) : h;
        double g = 0;
        for (const auto& tuple : roster_)
            for (auto k : tuple)
                g += sign * action(c_.space, c_.m, k, scored) * outcome;
        st.strategy_gain = g / static_cast<double>(roster_.size() * roster_[0].size());
        if (!c_.warm_start && lag_ && bits_.size() == initial_)
            st.strategy_gain = 0;
        bits_.push_back(st.bit);
        outcome_.push_back(outcome);
        return st;
    }

private:
    thgame::SimConfig c_;
    thgame::Roster roster_;
    thgame::Rng rng_;
    int lag_ = 0;
    std::size_t initial_ = 0;
    std::vector<int> bits_;
    std::vector<int> outcome_;
    std::vector<int> last_action_;
};

// Chain-state bits are chronological with the newest bit at bit 0.
inline std::vector<int> state_to_bits(std::uint64_t state, int nbits)
{
    std::vector<int> bits(static_cast<std::size_t>(nbits));
    for (int j = 0; j < nbits; ++j)
        bits[static_cast<std::size_t>(nbits - 1 - j)] = static_cast<int>((state >> j) & 1u);
    return bits;
}

// Score of strategy k after replaying the tau scored steps contained in a state.
inline int replay_score(GameKind kind, int m, int tau, bool flip, std::uint64_t k, std::uint64_t state)
{
    const int lag = kind == GameKind::dollar ? 1 : 0;
    const std::vector<int> bits = state_to_bits(state, m + tau + lag);
    const int sign = kind == GameKind::minority ? -1 : 1;
    int total = 0;
    for (std::size_t u = bits.size() - static_cast<std::size_t>(tau); u < bits.size(); ++u) {
        const std::uint32_t h = history_before(bits, u - static_cast<std::size_t>(lag), m);
        const int outcome = (bits[u] != 0) != flip ? 1 : -1;
        total += sign * rss_action(m, k, h) * outcome;
    }
    return total;
}

struct Votes {
    int determined = 0;
    int undecided = 0;
};

// Per-agent enumeration of determined vote and undecided count in one state (S = 2).
inline Votes enumerate_votes(GameKind kind, int m, int tau, bool flip, const thgame::Roster& roster,
                             std::uint64_t state)
{
    const std::uint32_t h = static_cast<std::uint32_t>(state & ((1u << m) - 1));
    Votes v;
    for (const auto& t : roster) {
        const int s0 = replay_score(kind, m, tau, flip, t[0], state);
        const int s1 = replay_score(kind, m, tau, flip, t[1], state);
        const int a0 = rss_action(m, t[0], h), a1 = rss_action(m, t[1], h);
        if (s0 > s1)
            v.determined += a0;
        else if (s1 > s0)
            v.determined += a1;
        else if (a0 == a1)
            v.determined += a0;
        else
            ++v.undecided;
    }
    return v;
}

// P(A > 0) with A = D + 2x - U, x ~ Binomial(U, 1/2), by direct summation.
inline double prob_positive(int determined, int undecided)
{
    double p = 0;
    for (int x = 0; x <= undecided; ++x) {
        if (determined + 2 * x - undecided <= 0)
            continue;
        double logc = std::lgamma(undecided + 1.0) - std::lgamma(x + 1.0) - std::lgamma(undecided - x + 1.0);
        p += std::exp(logc - undecided * std::log(2.0));
    }
    return p;
}

} // namespace oracle
