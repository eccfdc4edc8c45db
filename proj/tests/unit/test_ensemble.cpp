#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <cstring>
#include <iterator>

#include "nkpolicy/ensemble.hpp"
#include "nkpolicy/errors.hpp"

using namespace nkpolicy;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::path(NKPOLICY_TEST_TMPDIR);
    fs::create_directories(dir);
    return dir / name;
}

std::vector<char> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void write_bytes(const fs::path& p, const std::vector<char>& bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("ensemble round-trips bit-identically") {
    const fs::path path = temp_file("thirty.nkl");
    const LandscapeEnsemble e = generate_ensemble(30, 12, 4, 77, path);
    CHECK(e.landscapes.size() == 30);
    // 32-byte header + 30 * (8 + 12 * 32 * 8)
    CHECK(fs::file_size(path) == 32 + 30 * (8 + 12 * 32 * 8));

    const LandscapeEnsemble loaded = load_ensemble(path);
    CHECK(loaded == e);

    const fs::path again = temp_file("thirty_again.nkl");
    generate_ensemble(30, 12, 4, 77, again);
    CHECK(read_bytes(path) == read_bytes(again));
}

TEST_CASE("singleton ensemble") {
    const fs::path path = temp_file("single.nkl");
    const LandscapeEnsemble e = generate_ensemble(1, 12, 0, 5, path);
    CHECK(e.landscapes.size() == 1);
    CHECK(load_ensemble(path).landscapes.front() == e.landscapes.front());
    CHECK_THROWS_AS(make_ensemble(0, 12, 0, 5), ParameterError);
}

TEST_CASE("member seeds come from the master seed") {
    const LandscapeEnsemble e = make_ensemble(3, 8, 2, 123);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(e.landscapes[i] == generate_landscape(8, 2, ensemble_member_seed(123, i)));
    }
}

TEST_CASE("load_ensemble reports malformed files") {
    const fs::path good = temp_file("good.nkl");
    generate_ensemble(2, 6, 1, 9, good);
    const std::vector<char> bytes = read_bytes(good);
    const fs::path bad = temp_file("bad.nkl");

    SUBCASE("missing file") { CHECK_THROWS_AS(load_ensemble(temp_file("nope.nkl")), IoError); }
    SUBCASE("truncated") {
        write_bytes(bad, std::vector<char>(bytes.begin(), bytes.end() - 5));
        CHECK_THROWS_WITH_AS(load_ensemble(bad), doctest::Contains("truncated"), FormatError);
    }
    SUBCASE("trailing bytes") {
        std::vector<char> longer = bytes;
        longer.push_back(0);
        write_bytes(bad, longer);
        CHECK_THROWS_AS(load_ensemble(bad), FormatError);
    }
    SUBCASE("wrong version") {
        std::vector<char> v = bytes;
        v[8] = 9;
        write_bytes(bad, v);
        CHECK_THROWS_WITH_AS(load_ensemble(bad), doctest::Contains("format_version"), FormatError);
    }
    SUBCASE("K >= N") {
        std::vector<char> v = bytes;
        v[16] = 6;  // K field
        write_bytes(bad, v);
        CHECK_THROWS_WITH_AS(load_ensemble(bad), doctest::Contains("'K'"), FormatError);
    }
    SUBCASE("table entry outside (0,1)") {
        std::vector<char> v = bytes;
        // First table entry of landscape 0 starts after the header and the seed.
        const double one = 1.0;
        std::memcpy(v.data() + 40, &one, sizeof one);
        write_bytes(bad, v);
        CHECK_THROWS_WITH_AS(load_ensemble(bad), doctest::Contains("landscape[0].tables"), FormatError);
    }
    SUBCASE("bad magic") {
        std::vector<char> v = bytes;
        v[0] = 'X';
        write_bytes(bad, v);
        CHECK_THROWS_AS(load_ensemble(bad), FormatError);
    }
}

TEST_CASE("unwritable path") {
    CHECK_THROWS_AS(generate_ensemble(1, 4, 0, 1, "/nonexistent-dir/x/e.nkl"), IoError);
}
