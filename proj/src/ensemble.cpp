#include "nkpolicy/ensemble.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fmt/format.h>
#include <fstream>
#include <iterator>
#include <string_view>

#include "nkpolicy/errors.hpp"

namespace nkpolicy {

namespace {

constexpr std::array<char, 8> kMagic = {'N', 'K', 'L', 'A', 'N', 'D', 'E', 'N'};
constexpr std::uint64_t kEnsembleSeedTag = 0x4e4b4c414e44ULL;  // "NKLAND"

class Writer {
public:
    void bytes(const void* data, std::size_t size) {
        const auto* p = static_cast<const char*>(data);
        buffer_.insert(buffer_.end(), p, p + size);
    }
    template <class T>
    void little_endian(T value) {
        static_assert(std::is_unsigned_v<T>);
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            buffer_.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
        }
    }
    void f64(double value) { little_endian(std::bit_cast<std::uint64_t>(value)); }
    const std::vector<char>& buffer() const { return buffer_; }

private:
    std::vector<char> buffer_;
};

class Reader {
public:
    explicit Reader(std::vector<char> data) : data_(std::move(data)) {}

    template <class T>
    T little_endian(std::string_view field) {
        require(sizeof(T), field);
        T value = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            value |= static_cast<T>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        }
        pos_ += sizeof(T);
        return value;
    }
    double f64(std::string_view field) { return std::bit_cast<double>(little_endian<std::uint64_t>(field)); }
    void bytes(void* out, std::size_t size, std::string_view field) {
        require(size, field);
        std::memcpy(out, data_.data() + pos_, size);
        pos_ += size;
    }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void require(std::size_t size, std::string_view field) const {
        if (data_.size() - pos_ < size) {
            throw FormatError(fmt::format("ensemble file truncated while reading '{}' at byte {}", field, pos_));
        }
    }

    std::vector<char> data_;
    std::size_t pos_ = 0;
};

}  // namespace

Seed ensemble_member_seed(Seed master_seed, std::size_t index) noexcept {
    return derive_seed(master_seed, {kEnsembleSeedTag, static_cast<std::uint64_t>(index)});
}

LandscapeEnsemble make_ensemble(int count, int n, int k, Seed master_seed) {
    if (count < 1) throw ParameterError(fmt::format("ensemble count must be >= 1, got {}", count));
    LandscapeEnsemble ensemble{n, k, master_seed, {}};
    ensemble.landscapes.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        ensemble.landscapes.push_back(generate_landscape(n, k, ensemble_member_seed(master_seed, i)));
    }
    return ensemble;
}

LandscapeEnsemble generate_ensemble(int count, int n, int k, Seed master_seed, const std::filesystem::path& path) {
    LandscapeEnsemble ensemble = make_ensemble(count, n, k, master_seed);
    save_ensemble(ensemble, path);
    return ensemble;
}

void save_ensemble(const LandscapeEnsemble& ensemble, const std::filesystem::path& path) {
    Writer w;
    w.bytes(kMagic.data(), kMagic.size());
    w.little_endian(kEnsembleFormatVersion);
    w.little_endian(static_cast<std::uint32_t>(ensemble.n));
    w.little_endian(static_cast<std::uint32_t>(ensemble.k));
    w.little_endian(static_cast<std::uint32_t>(ensemble.landscapes.size()));
    w.little_endian(static_cast<std::uint64_t>(ensemble.master_seed));
    for (const NKLandscape& l : ensemble.landscapes) {
        if (l.n() != ensemble.n || l.k() != ensemble.k) {
            throw ParameterError("ensemble members must share (N, K)");
        }
        w.little_endian(static_cast<std::uint64_t>(l.seed()));
        for (double v : l.tables()) w.f64(v);
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    out.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
    out.flush();
    if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

LandscapeEnsemble load_ensemble(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open ensemble file '{}'", path.string()));
    Reader r(std::vector<char>(std::istreambuf_iterator<char>(in), {}));

    std::array<char, 8> magic{};
    r.bytes(magic.data(), magic.size(), "magic");
    if (magic != kMagic) throw FormatError("ensemble file has wrong magic bytes (field 'magic')");
    const auto version = r.little_endian<std::uint32_t>("format_version");
    if (version != kEnsembleFormatVersion) {
        throw FormatError(fmt::format("unsupported ensemble format_version {} (expected {})", version,
                                      kEnsembleFormatVersion));
    }
    const auto n = r.little_endian<std::uint32_t>("N");
    const auto k = r.little_endian<std::uint32_t>("K");
    const auto count = r.little_endian<std::uint32_t>("count");
    const auto master = r.little_endian<std::uint64_t>("master_seed");
    if (n < 1 || n > static_cast<std::uint32_t>(kMaxStringLength)) {
        throw FormatError(fmt::format("field 'N' = {} out of range [1, {}]", n, kMaxStringLength));
    }
    if (k >= n) throw FormatError(fmt::format("field 'K' = {} must be < N = {}", k, n));
    if (count < 1) throw FormatError("field 'count' must be >= 1");

    LandscapeEnsemble ensemble{static_cast<int>(n), static_cast<int>(k), master, {}};
    const std::size_t entries = static_cast<std::size_t>(n) << (k + 1);
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto seed = r.little_endian<std::uint64_t>(fmt::format("landscape[{}].seed", i));
        std::vector<double> tables(entries);
        const std::string field = fmt::format("landscape[{}].tables", i);
        for (double& v : tables) v = r.f64(field);
        try {
            ensemble.landscapes.emplace_back(static_cast<int>(n), static_cast<int>(k), seed, std::move(tables));
        } catch (const ParameterError& e) {
            throw FormatError(fmt::format("{}: {}", field, e.what()));
        }
    }
    if (r.remaining() != 0) {
        throw FormatError(fmt::format("ensemble file has {} trailing bytes after field 'landscape[{}]'",
                                      r.remaining(), count - 1));
    }
    return ensemble;
}

}  // namespace nkpolicy
