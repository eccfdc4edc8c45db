#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace nkpolicy {

using Seed = std::uint64_t;

/// One step of the SplitMix64 generator; used only for seed derivation.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Derives a child seed from a parent seed and an ordered list of keys.
///
/// The state starts at `parent`; for every key the state is xor-ed with the
/// key and advanced once through SplitMix64. The final output is the child
/// seed. Distinct key lists give statistically independent streams.
Seed derive_seed(Seed parent, std::initializer_list<std::uint64_t> keys) noexcept;

/// Random stream used by all stochastic choices of the simulation.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The distributions are implemented here rather than taken from
/// <random> because the standard leaves their algorithms unspecified, which
/// would make results differ between standard libraries.
class Rng {
public:
    explicit Rng(Seed seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace nkpolicy
