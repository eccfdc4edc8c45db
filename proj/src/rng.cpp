#include "nkpolicy/rng.hpp"

namespace nkpolicy {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Seed derive_seed(Seed parent, std::initializer_list<std::uint64_t> keys) noexcept {
    // Each key is folded into the previous output, which is already mixed.
    std::uint64_t state = parent;
    std::uint64_t out = splitmix64(state);
    for (std::uint64_t key : keys) {
        state = out ^ key;
        out = splitmix64(state);
    }
    return out;
}

std::uint64_t Rng::below(std::uint64_t bound) {
    // Reject the lowest (2^64 mod bound) outputs so the modulo is unbiased.
    const std::uint64_t threshold = -bound % bound;
    std::uint64_t x = engine_();
    while (x < threshold) x = engine_();
    return x % bound;
}

}  // namespace nkpolicy
