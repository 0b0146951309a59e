#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "thgame/rng.hpp"

namespace thgame {

/// Action taken by an agent or prescribed by a strategy: -1 or +1.
using Action = std::int8_t;

constexpr int kMaxMemory = 14;
constexpr int kMaxFullSpaceMemory = 4;

/// Last m winning bits; the most recent bit is the least significant one.
struct HistoryCode {
    std::uint32_t value = 0;
    friend bool operator==(HistoryCode, HistoryCode) = default;
};

/// Last m+tau (or more) winning bits, most recent bit least significant.
struct PathCode {
    std::uint64_t value = 0;
    friend bool operator==(PathCode, PathCode) = default;
};

constexpr std::uint64_t low_mask(int bits)
{
    return bits >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
}

constexpr HistoryCode history_of(PathCode path, int m)
{
    return HistoryCode{static_cast<std::uint32_t>(path.value & low_mask(m))};
}

/// Shift a new winning bit into a path of the given width, dropping the oldest.
constexpr PathCode append_bit(PathCode path, int bit, int width)
{
    return PathCode{((path.value << 1) | static_cast<std::uint64_t>(bit & 1)) & low_mask(width)};
}

/// A lookup table from every m-bit history to an action.
class Strategy {
public:
    explicit Strategy(std::vector<Action> table);

    int memory() const { return memory_; }
    std::size_t size() const { return table_.size(); }
    Action operator()(HistoryCode h) const { return table_[h.value]; }
    std::span<const Action> table() const { return table_; }
    Strategy negated() const;

    friend bool operator==(const Strategy&, const Strategy&) = default;

private:
    std::vector<Action> table_;
    int memory_ = 0;
};

int hamming_distance(const Strategy& a, const Strategy& b);

enum class SpaceKind { reduced, full };

std::string_view to_string(SpaceKind kind);
SpaceKind parse_space_kind(std::string_view text);

/*
 * An ordered strategy space for memory m.
 *
 * Reduced space (2^(m+1) members): indices 0 .. 2^m - 1 are negated Walsh sign
 * rows, row r reading -(-1)^popcount(r & reverse_m(h)) at history h; index
 * R-1-r is the negation of index r. For m = 2 this reproduces the familiar
 * eight-row table starting at (-1,-1,-1,-1) and ending at (+1,+1,+1,+1).
 *
 * Full space (2^(2^m) members, m <= 4): bit h of the index k selects the
 * action at history h (1 -> +1).
 *
 * Tables are computed on demand, so the object is tiny even for m = 14.
 */
class StrategySpace {
public:
    StrategySpace(SpaceKind kind, int m);

    SpaceKind kind() const { return kind_; }
    int memory() const { return m_; }
    std::uint32_t history_count() const { return std::uint32_t{1} << m_; }
    std::uint64_t size() const { return size_; }

    Action action(std::uint64_t k, HistoryCode h) const;
    Strategy strategy(std::uint64_t k) const;

private:
    SpaceKind kind_;
    int m_;
    std::uint64_t size_;
};

/// Reduced strategy space; m must lie in [1, 14].
StrategySpace build_reduced_strategy_space(int m);
StrategySpace build_full_strategy_space(int m);
StrategySpace build_strategy_space(SpaceKind kind, int m);

/// Sorted strategy indices held by one agent.
using StrategyTuple = std::vector<std::uint32_t>;

/// Agents in construction order; each entry is the agent's tuple as drawn.
using Roster = std::vector<StrategyTuple>;

/*
 * Quenched disorder tensor Omega: number of agents holding each (unordered)
 * strategy tuple. Stored sparsely keyed on the sorted tuple, which for S = 2
 * is the upper-triangular form of the dense matrix.
 */
class QuenchedDisorder {
public:
    QuenchedDisorder(int m, int strategies_per_agent, SpaceKind space);

    static QuenchedDisorder from_roster(int m, int strategies_per_agent, SpaceKind space,
                                        const Roster& roster);
    /// Build an S = 2 disorder from a dense R x R matrix (any triangle).
    static QuenchedDisorder from_matrix(int m, SpaceKind space,
                                        const std::vector<std::vector<int>>& omega);

    void add(StrategyTuple tuple, int count = 1);

    int memory() const { return m_; }
    int strategies_per_agent() const { return s_; }
    SpaceKind space() const { return space_; }
    std::uint64_t axis_length() const { return axis_; }
    int agent_count() const { return n_; }

    int count(StrategyTuple tuple) const;
    /// Omega entry for S = 2 in upper-triangular form (zero below the diagonal).
    int omega(std::uint32_t i, std::uint32_t j) const;
    /// Psi = (Omega + Omega^T) / 2 for S = 2.
    double psi(std::uint32_t i, std::uint32_t j) const;

    const std::map<StrategyTuple, int>& entries() const { return entries_; }

    /// Agents in tensor order: tuples ascending, each repeated by its count.
    Roster expand() const;

    friend bool operator==(const QuenchedDisorder&, const QuenchedDisorder&) = default;

private:
    int m_;
    int s_;
    SpaceKind space_;
    std::uint64_t axis_;
    int n_ = 0;
    std::map<StrategyTuple, int> entries_;
};

/// N independent uniform S-tuples (with replacement inside a tuple), in draw order.
Roster sample_roster(int agents, int strategies_per_agent, const StrategySpace& space, Rng& rng);

QuenchedDisorder sample_quenched_disorder(int agents, int strategies_per_agent, int m,
                                          SpaceKind space, Rng& rng);

/// kappa_k: number of strategy slots, over all agents, holding strategy k.
std::vector<int> strategy_counts(const QuenchedDisorder& disorder);

/*
 * Plain-text tensor format:
 *
 *   omega m=<m> S=<S> N=<N> [space=full]
 *   <R integers>          (R^(S-1) lines, last axis along the line)
 *
 * Writing is refused when the dense tensor would exceed 2^26 entries.
 */
void write_disorder(std::ostream& out, const QuenchedDisorder& disorder);
QuenchedDisorder read_disorder(std::istream& in);

/// The 8x8 upper-triangular tensor used as the standard regression fixture (m=2, S=2, N=31).
QuenchedDisorder reference_disorder_m2();

} // namespace thgame
