#include "thgame/strategy_space.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "thgame/errors.hpp"

namespace thgame {

namespace {

std::uint32_t reverse_bits(std::uint32_t h, int width)
{
    std::uint32_t r = 0;
    for (int i = 0; i < width; ++i)
        if (h & (1u << i))
            r |= 1u << (width - 1 - i);
    return r;
}

constexpr std::uint64_t kMaxDenseEntries = std::uint64_t{1} << 26;

} // namespace

Strategy::Strategy(std::vector<Action> table) : table_(std::move(table))
{
    if (table_.empty() || !std::has_single_bit(table_.size()))
        throw ConfigError("strategy table length must be a power of two");
    for (Action a : table_)
        if (a != -1 && a != 1)
            throw ConfigError("strategy table entries must be -1 or +1");
    memory_ = std::countr_zero(table_.size());
}

Strategy Strategy::negated() const
{
    std::vector<Action> t(table_.size());
    std::transform(table_.begin(), table_.end(), t.begin(), [](Action a) { return Action(-a); });
    return Strategy(std::move(t));
}

int hamming_distance(const Strategy& a, const Strategy& b)
{
    if (a.size() != b.size())
        throw ConfigError("hamming distance needs strategies of equal memory");
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d += a.table()[i] != b.table()[i];
    return d;
}

std::string_view to_string(SpaceKind kind)
{
    return kind == SpaceKind::reduced ? "reduced" : "full";
}

SpaceKind parse_space_kind(std::string_view text)
{
    if (text == "reduced" || text == "rss")
        return SpaceKind::reduced;
    if (text == "full")
        return SpaceKind::full;
    throw ConfigError("unknown strategy space '" + std::string(text) + "'");
}

StrategySpace::StrategySpace(SpaceKind kind, int m) : kind_(kind), m_(m)
{
    if (m < 1 || m > kMaxMemory)
        throw ConfigError("memory m=" + std::to_string(m) + " outside [1, 14]");
    if (kind == SpaceKind::full) {
        if (m > kMaxFullSpaceMemory)
            throw ConfigError("full strategy space is limited to m <= 4");
        size_ = std::uint64_t{1} << (std::uint64_t{1} << m);
    } else {
        size_ = std::uint64_t{1} << (m + 1);
    }
}

Action StrategySpace::action(std::uint64_t k, HistoryCode h) const
{
    if (kind_ == SpaceKind::full)
        return ((k >> h.value) & 1) ? Action{1} : Action{-1};
    const std::uint64_t half = size_ >> 1;
    if (k >= half)
        return Action(-action(size_ - 1 - k, h));
    const auto row = static_cast<std::uint32_t>(k);
    return (std::popcount(row & reverse_bits(h.value, m_)) & 1) ? Action{1} : Action{-1};
}

Strategy StrategySpace::strategy(std::uint64_t k) const
{
    if (k >= size_)
        throw ConfigError("strategy index out of range");
    std::vector<Action> t(history_count());
    for (std::uint32_t h = 0; h < history_count(); ++h)
        t[h] = action(k, HistoryCode{h});
    return Strategy(std::move(t));
}

StrategySpace build_reduced_strategy_space(int m) { return StrategySpace(SpaceKind::reduced, m); }
StrategySpace build_full_strategy_space(int m) { return StrategySpace(SpaceKind::full, m); }
StrategySpace build_strategy_space(SpaceKind kind, int m) { return StrategySpace(kind, m); }

QuenchedDisorder::QuenchedDisorder(int m, int strategies_per_agent, SpaceKind space)
    : m_(m), s_(strategies_per_agent), space_(space), axis_(StrategySpace(space, m).size())
{
    if (strategies_per_agent < 1)
        throw ConfigError("strategies per agent must be >= 1");
}

QuenchedDisorder QuenchedDisorder::from_roster(int m, int strategies_per_agent, SpaceKind space,
                                               const Roster& roster)
{
    QuenchedDisorder d(m, strategies_per_agent, space);
    for (const auto& t : roster)
        d.add(t);
    return d;
}

QuenchedDisorder QuenchedDisorder::from_matrix(int m, SpaceKind space,
                                               const std::vector<std::vector<int>>& omega)
{
    QuenchedDisorder d(m, 2, space);
    if (omega.size() != d.axis_length())
        throw ConfigError("disorder matrix has wrong number of rows");
    for (std::uint32_t i = 0; i < omega.size(); ++i) {
        if (omega[i].size() != d.axis_length())
            throw ConfigError("disorder matrix has wrong number of columns");
        for (std::uint32_t j = 0; j < omega[i].size(); ++j) {
            if (omega[i][j] < 0)
                throw ConfigError("disorder counts must be non-negative");
            if (omega[i][j] > 0)
                d.add({i, j}, omega[i][j]);
        }
    }
    return d;
}

void QuenchedDisorder::add(StrategyTuple tuple, int count)
{
    if (tuple.size() != static_cast<std::size_t>(s_))
        throw ConfigError("strategy tuple size does not match S");
    for (auto k : tuple)
        if (k >= axis_)
            throw ConfigError("strategy index outside the strategy space");
    if (count <= 0)
        return;
    std::sort(tuple.begin(), tuple.end());
    entries_[std::move(tuple)] += count;
    n_ += count;
}

int QuenchedDisorder::count(StrategyTuple tuple) const
{
    std::sort(tuple.begin(), tuple.end());
    auto it = entries_.find(tuple);
    return it == entries_.end() ? 0 : it->second;
}

int QuenchedDisorder::omega(std::uint32_t i, std::uint32_t j) const
{
    if (s_ != 2)
        throw ConfigError("omega(i, j) requires S = 2");
    return i <= j ? count({i, j}) : 0;
}

double QuenchedDisorder::psi(std::uint32_t i, std::uint32_t j) const
{
    return 0.5 * (omega(i, j) + omega(j, i));
}

Roster QuenchedDisorder::expand() const
{
    Roster r;
    r.reserve(static_cast<std::size_t>(n_));
    for (const auto& [tuple, c] : entries_)
        for (int i = 0; i < c; ++i)
            r.push_back(tuple);
    return r;
}

Roster sample_roster(int agents, int strategies_per_agent, const StrategySpace& space, Rng& rng)
{
    if (agents < 1)
        throw ConfigError("agent count must be >= 1");
    if (strategies_per_agent < 1)
        throw ConfigError("strategies per agent must be >= 1");
    Roster r(static_cast<std::size_t>(agents));
    for (auto& t : r) {
        t.resize(static_cast<std::size_t>(strategies_per_agent));
        for (auto& k : t)
            k = static_cast<std::uint32_t>(uniform_index(rng, space.size()));
    }
    return r;
}

QuenchedDisorder sample_quenched_disorder(int agents, int strategies_per_agent, int m,
                                          SpaceKind space, Rng& rng)
{
    const StrategySpace sp(space, m);
    return QuenchedDisorder::from_roster(m, strategies_per_agent, space,
                                         sample_roster(agents, strategies_per_agent, sp, rng));
}

std::vector<int> strategy_counts(const QuenchedDisorder& disorder)
{
    std::vector<int> kappa(disorder.axis_length(), 0);
    for (const auto& [tuple, c] : disorder.entries())
        for (auto k : tuple)
            kappa[k] += c;
    return kappa;
}

void write_disorder(std::ostream& out, const QuenchedDisorder& d)
{
    const std::uint64_t r = d.axis_length();
    const int s = d.strategies_per_agent();
    std::uint64_t lines = 1;
    for (int i = 1; i < s; ++i) {
        lines *= r;
        if (lines * r > kMaxDenseEntries)
            throw ConfigError("disorder tensor too large for the dense text format");
    }
    if (lines * r > kMaxDenseEntries)
        throw ConfigError("disorder tensor too large for the dense text format");

    out << "omega m=" << d.memory() << " S=" << s << " N=" << d.agent_count();
    if (d.space() == SpaceKind::full)
        out << " space=full";
    out << '\n';

    auto it = d.entries().begin();
    const auto end = d.entries().end();
    StrategyTuple pos(static_cast<std::size_t>(s), 0);
    for (std::uint64_t line = 0; line < lines; ++line) {
        std::uint64_t rem = line;
        for (int a = s - 2; a >= 0; --a) {
            pos[static_cast<std::size_t>(a)] = static_cast<std::uint32_t>(rem % r);
            rem /= r;
        }
        for (std::uint64_t j = 0; j < r; ++j) {
            pos.back() = static_cast<std::uint32_t>(j);
            int value = 0;
            // entries are sorted lexicographically, as is this dense walk
            if (it != end && it->first == pos) {
                value = it->second;
                ++it;
            }
            if (j)
                out << ' ';
            out << value;
        }
        out << '\n';
    }
}

QuenchedDisorder read_disorder(std::istream& in)
{
    std::string header;
    if (!std::getline(in, header))
        throw FormatError("disorder file is empty");
    std::istringstream hs(header);
    std::string word;
    hs >> word;
    if (word != "omega")
        throw FormatError("disorder header must start with 'omega'");
    int m = -1, s = -1, n = -1;
    SpaceKind space = SpaceKind::reduced;
    while (hs >> word) {
        auto eq = word.find('=');
        if (eq == std::string::npos)
            throw FormatError("malformed header field '" + word + "'");
        const std::string key = word.substr(0, eq);
        const std::string value = word.substr(eq + 1);
        try {
            if (key == "m")
                m = std::stoi(value);
            else if (key == "S")
                s = std::stoi(value);
            else if (key == "N")
                n = std::stoi(value);
            else if (key == "space")
                space = parse_space_kind(value);
            else
                throw FormatError("unknown header field '" + key + "'");
        } catch (const std::logic_error&) {
            throw FormatError("malformed header value in '" + word + "'");
        }
    }
    if (m < 0 || s < 1 || n < 0)
        throw FormatError("disorder header needs m, S and N");

    QuenchedDisorder d(m, s, space);
    const std::uint64_t r = d.axis_length();
    std::uint64_t lines = 1;
    for (int i = 1; i < s; ++i)
        lines *= r;

    StrategyTuple pos(static_cast<std::size_t>(s), 0);
    std::string row;
    for (std::uint64_t line = 0; line < lines; ++line) {
        if (!std::getline(in, row))
            throw FormatError("disorder file ended after " + std::to_string(line) + " rows");
        std::istringstream rs(row);
        std::uint64_t rem = line;
        for (int a = s - 2; a >= 0; --a) {
            pos[static_cast<std::size_t>(a)] = static_cast<std::uint32_t>(rem % r);
            rem /= r;
        }
        for (std::uint64_t j = 0; j < r; ++j) {
            long long value;
            if (!(rs >> value))
                throw FormatError("row " + std::to_string(line + 1) + " has too few entries");
            if (value < 0)
                throw FormatError("negative count in row " + std::to_string(line + 1));
            pos.back() = static_cast<std::uint32_t>(j);
            d.add(pos, static_cast<int>(value));
        }
        std::string extra;
        if (rs >> extra)
            throw FormatError("row " + std::to_string(line + 1) + " has too many entries");
    }
    if (d.agent_count() != n)
        throw FormatError("tensor total " + std::to_string(d.agent_count()) +
                          " does not match header N=" + std::to_string(n));
    return d;
}

QuenchedDisorder reference_disorder_m2()
{
    return QuenchedDisorder::from_matrix(2, SpaceKind::reduced,
                                         {{1, 2, 0, 0, 1, 1, 0, 0},
                                          {0, 0, 0, 0, 3, 3, 1, 1},
                                          {0, 0, 2, 0, 1, 0, 0, 0},
                                          {0, 0, 0, 1, 1, 0, 0, 1},
                                          {0, 0, 0, 0, 1, 0, 2, 1},
                                          {0, 0, 0, 0, 0, 2, 2, 1},
                                          {0, 0, 0, 0, 0, 0, 2, 1},
                                          {0, 0, 0, 0, 0, 0, 0, 0}});
}

} // namespace thgame
