#pragma once

#include <cstdint>
#include <initializer_list>

namespace coxsel {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based stream seed: folds each key into the state in order, so
/// (master, cell, replication) maps to the same stream on any schedule.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t k : keys) s = splitmix64(s ^ splitmix64(k + 0x632BE59BD9B4E019ULL));
    return s;
}

}  // namespace coxsel
