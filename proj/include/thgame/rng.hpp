#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace thgame {

/// Every stochastic component draws from this engine. A run owns exactly one.
using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/*
 * Seed-splitting rule shared by every ensemble in the project:
 *
 *   s0 = splitmix64(master ^ fnv1a(tag))
 *   s_{k+1} = splitmix64(s_k ^ index_k)
 *
 * The tag names the experiment (e.g. "sweep", "cagents"); indices are the
 * parameter coordinates and run number. Runs are therefore independent of the
 * order in which workers execute them.
 */
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                    std::initializer_list<std::uint64_t> indices)
{
    std::uint64_t s = splitmix64(master ^ fnv1a(tag));
    for (std::uint64_t i : indices)
        s = splitmix64(s ^ i);
    return s;
}

/// Uniform integer in [0, n). n must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n)
{
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

inline int coin_flip(Rng& rng) { return static_cast<int>(rng() >> 63); }

} // namespace thgame
