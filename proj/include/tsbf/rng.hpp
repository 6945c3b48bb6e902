#ifndef TSBF_RNG_HPP
#define TSBF_RNG_HPP

#include <cstdint>
#include <random>

namespace tsbf {

using Rng = std::mt19937_64;

/// Independent stream keyed by (master seed, trial, group, attempt, purpose).
/// Distinct keys give statistically independent generators; the same key
/// always reproduces the same sequence regardless of which worker draws it.
inline Rng substream(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t group,
                     std::uint64_t attempt = 0, std::uint64_t purpose = 0) {
    auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x & 0xffffffffu); };
    auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
    std::seed_seq seq{lo(master_seed), hi(master_seed), lo(trial),   hi(trial),
                      lo(group),       hi(group),       lo(attempt), hi(attempt),
                      lo(purpose),     hi(purpose)};
    return Rng(seq);
}

}  // namespace tsbf

#endif  // TSBF_RNG_HPP
