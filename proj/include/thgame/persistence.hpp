#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "thgame/game_engine.hpp"
#include "thgame/strategy_space.hpp"

namespace thgame {

using BitSeries = std::vector<std::uint8_t>;

struct PersistenceScore {
    int scale = 0;
    double value = 0;
    /// Number of (previous, current) following-bit comparisons that were scored.
    long window_count = 0;

    double antipersistence() const { return 1.0 - value; }
};

/*
 * Persistence at scale m_s: for every occurrence of an m_s-bit history after
 * the first, compare the bit that follows it with the bit that followed the
 * previous occurrence of the same history. The score is the fraction of equal
 * pairs. Throws when no history repeats.
 */
PersistenceScore persistence(std::span<const std::uint8_t> series, int scale);

/// Fraction of (m_s+1)-bit windows whose last two bits are equal (lag-one repetition rate).
PersistenceScore suffix_persistence(std::span<const std::uint8_t> series, int scale);

/*
 * Two-table generator: each m-bit history alternates between `table` and its
 * negation every time it recurs (+1 -> bit 1). The series starts with the m
 * bits of `seed_history`, oldest first.
 */
BitSeries perfectly_antipersistent_series(int m, const Strategy& table, HistoryCode seed_history,
                                          std::size_t length);

struct GridCell {
    GameKind kind = GameKind::minority;
    int m = 0;
    int scale = 0;
    double persistence = 0;
    double stderr_ = 0;
};

struct GridSpec {
    std::vector<GameKind> kinds;
    std::vector<int> m_range;
    std::vector<int> scale_range;
    int runs = 100;
    long length = 1000;
    SimConfig base;            ///< N, S, tau, warmup, space used for every run
    std::uint64_t master_seed = 0;
    unsigned workers = 0;
};

/// Seed of run r at memory m; shared by every game kind so the kinds see identical disorders.
std::uint64_t grid_run_seed(std::uint64_t master, int m, int run);

/// Cells ordered by kind (as given), then m, then scale.
std::vector<GridCell> persistence_grid(const GridSpec& spec);

} // namespace thgame
