#include "thgame/persistence.hpp"

#include <string>

#include "thgame/errors.hpp"
#include "thgame/parallel.hpp"

namespace thgame {

namespace {

void check_scale(int scale)
{
    if (scale < 1 || scale > 24)
        throw ConfigError("persistence scale must lie in [1, 24]");
}

} // namespace

PersistenceScore persistence(std::span<const std::uint8_t> series, int scale)
{
    check_scale(scale);
    if (series.size() < static_cast<std::size_t>(scale) + 2)
        throw ConfigError("series too short for scale " + std::to_string(scale));

    const auto mask = static_cast<std::uint32_t>(low_mask(scale));
    std::vector<std::int8_t> last_follow(std::size_t{1} << scale, -1);
    std::uint32_t h = 0;
    for (int i = 0; i < scale; ++i)
        h = ((h << 1) | (series[static_cast<std::size_t>(i)] & 1u)) & mask;

    long compared = 0, same = 0;
    for (std::size_t i = static_cast<std::size_t>(scale); i < series.size(); ++i) {
        const auto bit = static_cast<std::int8_t>(series[i] & 1u);
        std::int8_t& prev = last_follow[h];
        if (prev >= 0) {
            ++compared;
            same += prev == bit;
        }
        prev = bit;
        h = ((h << 1) | static_cast<std::uint32_t>(bit)) & mask;
    }
    if (compared == 0)
        throw ConfigError("series too short: no history recurs at scale " + std::to_string(scale));
    return {scale, static_cast<double>(same) / static_cast<double>(compared), compared};
}

PersistenceScore suffix_persistence(std::span<const std::uint8_t> series, int scale)
{
    check_scale(scale);
    if (series.size() < static_cast<std::size_t>(scale) + 1)
        throw ConfigError("series too short for scale " + std::to_string(scale));
    long windows = 0, same = 0;
    for (std::size_t end = static_cast<std::size_t>(scale); end < series.size(); ++end) {
        ++windows;
        same += (series[end] & 1u) == (series[end - 1] & 1u);
    }
    return {scale, static_cast<double>(same) / static_cast<double>(windows), windows};
}

BitSeries perfectly_antipersistent_series(int m, const Strategy& table, HistoryCode seed_history,
                                          std::size_t length)
{
    if (table.memory() != m)
        throw ConfigError("generator table memory does not match m");
    const auto mask = static_cast<std::uint32_t>(low_mask(m));
    if (seed_history.value > mask)
        throw ConfigError("seed history has more than m bits");
    if (length < static_cast<std::size_t>(m))
        throw ConfigError("series length shorter than the seed history");

    BitSeries out;
    out.reserve(length);
    for (int i = m - 1; i >= 0; --i)
        out.push_back(static_cast<std::uint8_t>((seed_history.value >> i) & 1u));

    std::vector<std::uint8_t> use_negated(std::size_t{1} << m, 0);
    std::uint32_t h = seed_history.value;
    while (out.size() < length) {
        const bool up = (table(HistoryCode{h}) > 0) != (use_negated[h] != 0);
        use_negated[h] ^= 1;
        const auto bit = static_cast<std::uint8_t>(up ? 1 : 0);
        out.push_back(bit);
        h = ((h << 1) | bit) & mask;
    }
    return out;
}

std::uint64_t grid_run_seed(std::uint64_t master, int m, int run)
{
    return derive_seed(master, "persistence",
                       {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(run)});
}

std::vector<GridCell> persistence_grid(const GridSpec& spec)
{
    if (spec.kinds.empty() || spec.m_range.empty() || spec.scale_range.empty())
        throw ConfigError("persistence grid needs non-empty kinds, m and scale ranges");
    if (spec.runs < 1)
        throw ConfigError("persistence grid needs at least one run");
    if (spec.length < 2)
        throw ConfigError("series length must be >= 2");
    for (int s : spec.scale_range)
        check_scale(s);

    const std::size_t nk = spec.kinds.size(), nm = spec.m_range.size(), ns = spec.scale_range.size();
    const auto runs = static_cast<std::size_t>(spec.runs);
    // values[((kind * nm + m) * runs + run) * ns + scale]
    std::vector<double> values(nk * nm * runs * ns);

    parallel_for(
        nk * nm * runs,
        [&](std::size_t job) {
            const std::size_t run = job % runs;
            const std::size_t mi = (job / runs) % nm;
            const std::size_t ki = job / (runs * nm);
            SimConfig c = spec.base;
            c.kind = spec.kinds[ki];
            c.m = spec.m_range[mi];
            c.steps = spec.length;
            c.n_counteradaptive = 0;
            c.seed = grid_run_seed(spec.master_seed, c.m, static_cast<int>(run));
            const RunResult r = thgame::run(c);
            for (std::size_t si = 0; si < ns; ++si)
                values[job * ns + si] = persistence(r.bit_series, spec.scale_range[si]).value;
        },
        spec.workers);

    std::vector<GridCell> cells;
    cells.reserve(nk * nm * ns);
    std::vector<double> sample(runs);
    for (std::size_t ki = 0; ki < nk; ++ki)
        for (std::size_t mi = 0; mi < nm; ++mi)
            for (std::size_t si = 0; si < ns; ++si) {
                for (std::size_t run = 0; run < runs; ++run)
                    sample[run] = values[((ki * nm + mi) * runs + run) * ns + si];
                const MeanSe ms = mean_and_se(sample);
                cells.push_back({spec.kinds[ki], spec.m_range[mi], spec.scale_range[si], ms.mean, ms.se});
            }
    return cells;
}

} // namespace thgame
