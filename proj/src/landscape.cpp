#include "nkpolicy/landscape.hpp"

#include <algorithm>
#include <bit>
#include <fmt/format.h>

#include "nkpolicy/errors.hpp"

namespace nkpolicy {

namespace {

void check_dimensions(int n, int k) {
    if (n < 1 || n > kMaxStringLength) {
        throw ParameterError(fmt::format("N must be in [1, {}], got {}", kMaxStringLength, n));
    }
    if (k < 0 || k > n - 1) {
        throw ParameterError(fmt::format("K must be in [0, N-1] = [0, {}], got {}", n - 1, k));
    }
}

void check_exhaustive(int n) {
    if (n > kMaxExhaustiveLength) {
        throw ParameterError(
            fmt::format("exhaustive scan limited to N <= {}, got N = {}", kMaxExhaustiveLength, n));
    }
}

std::uint32_t length_mask(int n) {
    return n == 32 ? ~0U : ((1U << n) - 1U);
}

bool all_fitness_distinct(const NKLandscape& landscape) {
    std::vector<double> values = exhaustive_fitness(landscape);
    std::sort(values.begin(), values.end());
    return std::adjacent_find(values.begin(), values.end()) == values.end();
}

}  // namespace

BitString::BitString(int length, std::uint32_t bits) : length_(length), bits_(bits) {
    if (length < 1 || length > kMaxStringLength) {
        throw ParameterError(fmt::format("bit string length must be in [1, {}], got {}", kMaxStringLength, length));
    }
    if ((bits & ~length_mask(length)) != 0) {
        throw ParameterError(fmt::format("bits 0x{:x} exceed string length {}", bits, length));
    }
}

BitString BitString::from_text(std::string_view text) {
    std::uint32_t bits = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '1') {
            bits |= 1U << i;
        } else if (text[i] != '0') {
            throw ParameterError(fmt::format("invalid bit character '{}'", text[i]));
        }
    }
    return BitString(static_cast<int>(text.size()), bits);
}

int BitString::hamming_distance(const BitString& other) const noexcept {
    return std::popcount(bits_ ^ other.bits_);
}

std::string BitString::to_text() const {
    std::string out(static_cast<std::size_t>(length_), '0');
    for (int i = 0; i < length_; ++i) {
        if ((*this)[i]) out[static_cast<std::size_t>(i)] = '1';
    }
    return out;
}

NKLandscape::NKLandscape(int n, int k, Seed seed, std::vector<double> tables)
    : n_(n), k_(k), seed_(seed), tables_(std::move(tables)) {
    check_dimensions(n, k);
    const std::size_t expected = static_cast<std::size_t>(n) * table_size();
    if (tables_.size() != expected) {
        throw ParameterError(fmt::format("expected {} table entries for N={}, K={}, got {}", expected, n, k,
                                         tables_.size()));
    }
    for (std::size_t i = 0; i < tables_.size(); ++i) {
        if (!(tables_[i] > 0.0 && tables_[i] < 1.0)) {
            throw ParameterError(fmt::format("table entry {} = {} is outside (0, 1)", i, tables_[i]));
        }
    }
    const std::uint32_t states = static_cast<std::uint32_t>(table_size());
    window_to_index_.resize(states);
    for (std::uint32_t w = 0; w < states; ++w) {
        std::uint32_t idx = 0;
        for (int j = 0; j <= k_; ++j) idx = (idx << 1) | ((w >> j) & 1U);
        window_to_index_[w] = idx;
    }
}

std::span<const double> NKLandscape::table(int component) const {
    if (component < 0 || component >= n_) {
        throw ParameterError(fmt::format("component {} out of range [0, {})", component, n_));
    }
    return std::span<const double>(tables_).subspan(static_cast<std::size_t>(component) * table_size(),
                                                   table_size());
}

double NKLandscape::fitness_of(std::uint32_t bits) const noexcept {
    // Two copies of the string side by side make every cyclic window contiguous.
    const std::uint64_t doubled = static_cast<std::uint64_t>(bits) | (static_cast<std::uint64_t>(bits) << n_);
    const std::uint64_t window_mask = (std::uint64_t{1} << (k_ + 1)) - 1;
    const std::size_t stride = table_size();
    double sum = 0.0;
    const double* row = tables_.data();
    for (int i = 0; i < n_; ++i, row += stride) {
        sum += row[window_to_index_[(doubled >> i) & window_mask]];
    }
    return sum / n_;
}

double NKLandscape::fitness(const BitString& s) const {
    if (s.length() != n_) {
        throw ParameterError(fmt::format("string length {} does not match N = {}", s.length(), n_));
    }
    return fitness_of(s.bits());
}

NKLandscape generate_landscape(int n, int k, Seed seed) {
    check_dimensions(n, k);
    const std::size_t count = static_cast<std::size_t>(n) << (k + 1);
    for (Seed current = seed;; ++current) {
        Rng rng(current);
        std::vector<double> tables(count);
        for (double& v : tables) v = rng.uniform_open();
        NKLandscape landscape(n, k, current, std::move(tables));
        if (n > kMaxExhaustiveLength || all_fitness_distinct(landscape)) return landscape;
    }
}

double fitness(const NKLandscape& landscape, const BitString& s) {
    return landscape.fitness(s);
}

std::vector<double> exhaustive_fitness(const NKLandscape& landscape) {
    check_exhaustive(landscape.n());
    const std::uint32_t count = 1U << landscape.n();
    std::vector<double> values(count);
    for (std::uint32_t b = 0; b < count; ++b) values[b] = landscape.fitness_of(b);
    return values;
}

GlobalMaximum global_maximum_exhaustive(const NKLandscape& landscape) {
    const std::vector<double> values = exhaustive_fitness(landscape);
    const auto best = std::max_element(values.begin(), values.end());
    const auto bits = static_cast<std::uint32_t>(best - values.begin());
    return {BitString(landscape.n(), bits), *best};
}

GlobalMaximum global_maximum(const NKLandscape& landscape) {
    if (landscape.k() > 0) return global_maximum_exhaustive(landscape);
    std::uint32_t bits = 0;
    for (int i = 0; i < landscape.n(); ++i) {
        const auto t = landscape.table(i);
        if (!(t[0] > t[1])) bits |= 1U << i;
    }
    return {BitString(landscape.n(), bits), landscape.fitness_of(bits)};
}

int count_local_maxima(const NKLandscape& landscape) {
    const std::vector<double> values = exhaustive_fitness(landscape);
    int count = 0;
    for (std::uint32_t b = 0; b < values.size(); ++b) {
        bool is_max = true;
        for (int i = 0; i < landscape.n() && is_max; ++i) {
            is_max = values[b] > values[b ^ (1U << i)];
        }
        count += is_max ? 1 : 0;
    }
    return count;
}

}  // namespace nkpolicy
