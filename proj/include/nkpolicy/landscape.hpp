#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nkpolicy/rng.hpp"

namespace nkpolicy {

inline constexpr int kMaxStringLength = 30;
/// Largest N for which exhaustive scans over all 2^N strings are allowed.
inline constexpr int kMaxExhaustiveLength = 20;

/// A binary string x_1..x_N packed into an integer.
///
/// Component i (0-based) is stored in bit i, so x_1 is the least significant
/// bit. The textual form lists x_1 first.
class BitString {
public:
    BitString() = default;
    BitString(int length, std::uint32_t bits);

    static BitString from_text(std::string_view text);

    int length() const noexcept { return length_; }
    std::uint32_t bits() const noexcept { return bits_; }
    bool operator[](int i) const noexcept { return (bits_ >> i) & 1U; }

    BitString flipped(int i) const noexcept { return BitString(length_, bits_ ^ (1U << i), Unchecked{}); }
    int hamming_distance(const BitString& other) const noexcept;
    std::string to_text() const;

    friend bool operator==(const BitString&, const BitString&) = default;

private:
    struct Unchecked {};
    BitString(int length, std::uint32_t bits, Unchecked) noexcept : length_(length), bits_(bits) {}

    int length_ = 0;
    std::uint32_t bits_ = 0;
};

/// The NK fitness function: N contribution tables of 2^(K+1) entries each.
///
/// Table index convention: the K+1 bits (x_i, x_{i+1}, ..., x_{i+K}), indices
/// modulo N, are packed most-significant-first, so x_i is the high bit of the
/// index. Tables are stored row-major by component, then state.
class NKLandscape {
public:
    /// Validates ranges and that every entry lies strictly inside (0, 1).
    NKLandscape(int n, int k, Seed seed, std::vector<double> tables);

    int n() const noexcept { return n_; }
    int k() const noexcept { return k_; }
    Seed seed() const noexcept { return seed_; }
    std::size_t table_size() const noexcept { return std::size_t{1} << (k_ + 1); }

    std::span<const double> table(int component) const;
    std::span<const double> tables() const noexcept { return tables_; }

    /// Fitness of the string whose packed bits are `bits`. No length check.
    double fitness_of(std::uint32_t bits) const noexcept;
    /// Fitness with length validation.
    double fitness(const BitString& s) const;

    friend bool operator==(const NKLandscape&, const NKLandscape&) = default;

private:
    int n_;
    int k_;
    Seed seed_;
    std::vector<double> tables_;
    // Maps an LSB-first window of K+1 bits to the MSB-first table index.
    std::vector<std::uint32_t> window_to_index_;
};

/// Generates a landscape from (N, K, seed).
///
/// Entries are drawn from Rng(seed) in storage order. For N <= 20 all 2^N
/// fitness values are checked to be pairwise distinct; on a collision the
/// seed is incremented and generation repeats. The returned landscape
/// records the seed that produced it.
NKLandscape generate_landscape(int n, int k, Seed seed);

double fitness(const NKLandscape& landscape, const BitString& s);

/// Fitness of all 2^N strings, indexed by packed bits. Requires N <= 20.
std::vector<double> exhaustive_fitness(const NKLandscape& landscape);

struct GlobalMaximum {
    BitString string;
    double fitness = 0.0;
};

/// Per-component argmax for K = 0, exhaustive scan otherwise (N <= 20).
GlobalMaximum global_maximum(const NKLandscape& landscape);
GlobalMaximum global_maximum_exhaustive(const NKLandscape& landscape);

/// Number of strings strictly fitter than all N single-bit-flip neighbors.
int count_local_maxima(const NKLandscape& landscape);

}  // namespace nkpolicy
