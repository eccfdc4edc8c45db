#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nkpolicy/errors.hpp"
#include "nkpolicy/experiment.hpp"
#include "nkpolicy/table_io.hpp"

using namespace nkpolicy;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path(NKPOLICY_TEST_TMPDIR) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.n = 8;
    c.k = 2;
    c.landscapes = 2;
    c.group_sizes = {3, 10};
    c.alphas = {-5, 0, 5};
    c.runs = 15;
    c.master_seed = 42;
    return c;
}

void parse_and_validate(std::string_view text) { validate(parse_config(text)); }

}  // namespace

TEST_CASE("config parsing") {
    const ExperimentConfig c = parse_config(
        "# sweep\n"
        "N = 10\n"
        "K = 3   # rugged\n"
        "\n"
        "landscapes = 4\n"
        "M = 3, 26,100\n"
        "alpha = -30,0.5,30\n"
        "p = 0.25\n"
        "rho = 2\n"
        "runs = 7\n"
        "seed = 99\n"
        "max_updates = 1000\n"
        "workers = 3\n"
        "out = results/a\n");
    CHECK(c.n == 10);
    CHECK(c.k == 3);
    CHECK(c.landscape_count() == 4);
    CHECK(c.group_sizes == std::vector<int>{3, 26, 100});
    CHECK(c.alphas == std::vector<double>{-30, 0.5, 30});
    CHECK(c.imitation_prob == 0.25);
    CHECK(c.density == 2.0);
    CHECK(c.runs == 7);
    CHECK(c.master_seed == 99);
    CHECK(c.max_updates == 1000);
    CHECK(c.workers == 3);
    CHECK(c.output_dir == fs::path("results/a"));
    CHECK_NOTHROW(validate(c));

    const ExperimentConfig defaults = parse_config("");
    CHECK(defaults.landscape_count() == 1);
    CHECK(defaults.group_sizes.size() == 12);
    CHECK(parse_config("K = 4").landscape_count() == 10);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config("N 12"), ConfigError);
    CHECK_THROWS_AS(parse_config("colour = red"), ConfigError);
    CHECK_THROWS_AS(parse_config("N = twelve"), ConfigError);
    CHECK_THROWS_AS(parse_config("M = 3,,5"), ConfigError);
    CHECK_THROWS_AS(parse_and_validate("p = 1.5"), ConfigError);
    CHECK_THROWS_AS(parse_and_validate("N = 6\nK = 6"), ConfigError);
    CHECK_THROWS_AS(parse_and_validate("M = 0"), ConfigError);
    CHECK_THROWS_AS(parse_and_validate("runs = 0"), ConfigError);
    CHECK_THROWS_AS(parse_and_validate("rho = 0"), ConfigError);
    CHECK_THROWS_AS(load_config(fs::path(NKPOLICY_TEST_TMPDIR) / "does-not-exist.cfg"), ConfigError);
    try {
        parse_config("N = 12\n\nbogus = 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("overrides and canonical text") {
    ExperimentConfig c = small_config();
    apply_override(c, "runs=9");
    apply_override(c, "alpha = 1,2");
    CHECK(c.runs == 9);
    CHECK(c.alphas == std::vector<double>{1, 2});
    CHECK_THROWS_AS(apply_override(c, "runs"), ConfigError);

    const ExperimentConfig back = parse_config(config_to_text(c));
    CHECK(config_to_text(back) == config_to_text(c));
    CHECK(back.alphas == c.alphas);
    CHECK(back.group_sizes == c.group_sizes);
    CHECK(back.landscape_count() == c.landscape_count());

    apply_paper_scale(c);
    CHECK(c.runs == 10000);
    CHECK(c.landscape_count() == 30);
}

TEST_CASE("run seeds") {
    CHECK(run_seed(1, 0, 26, 0) == run_seed(1, 0, 26, 0));
    CHECK(run_seed(1, 0, 26, 0) != run_seed(1, 0, 26, 1));
    CHECK(run_seed(1, 0, 26, 0) != run_seed(1, 1, 26, 0));
    CHECK(run_seed(1, 0, 26, 0) != run_seed(1, 0, 27, 0));
    CHECK(run_seed(1, 0, 26, 0) != run_seed(2, 0, 26, 0));
}

TEST_CASE("raw table round trip") {
    const ResultTable t = run_experiment(small_config());
    REQUIRE(t.rows.size() == 2 * 3 * 2 * 15);
    REQUIRE(t.cells.size() == 6);
    std::stringstream s;
    write_raw_csv(s, t.rows);
    const std::vector<RawRow> back = read_raw_csv(s);
    CHECK(back == t.rows);

    // Same initial groups for every alpha at fixed M.
    CHECK(t.rows[0].seed == t.rows[2 * 15].seed);
    CHECK(t.rows[0].phi_bar0 == t.rows[2 * 15].phi_bar0);

    const auto cells = aggregate_rows(back);
    std::ostringstream a1, a2;
    write_aggregate_csv(a1, t.cells);
    write_aggregate_csv(a2, cells);
    CHECK(a1.str() == a2.str());
}

TEST_CASE("csv headers") {
    std::ostringstream raw, agg, hist;
    write_raw_csv(raw, std::vector<RawRow>{});
    write_aggregate_csv(agg, std::vector<CellAggregate>{});
    write_histogram_csv(hist, std::vector<CellAggregate>{});
    CHECK(raw.str() ==
          "# nkpolicy-raw v1\nM,alpha,p,N,K,landscape_id,run_id,seed,t_star,cost,updates,winner_id,phi_w0,phi_bar0,"
          "omega_winner,omega_random,n_c,g_c,timeout_flag\n");
    CHECK(agg.str() ==
          "# nkpolicy-aggregate v1\nM,alpha,mean_cost,stderr_cost,mean_edge,stderr_edge,mean_nc,mean_gc,runs_used,"
          "timeouts\n");
    CHECK(hist.str() == "# nkpolicy-histogram v1\nM,alpha,omega,prob,which\n");
}

TEST_CASE("raw table format errors") {
    std::istringstream empty("");
    CHECK_THROWS_AS(read_raw_csv(empty), FormatError);
    std::istringstream wrong_version("# nkpolicy-raw v9\nM\n");
    CHECK_THROWS_AS(read_raw_csv(wrong_version), FormatError);

    std::ostringstream good;
    write_raw_csv(good, run_experiment(small_config()).rows);
    std::string text = good.str();
    const auto pos = text.find(",cost,");
    std::string missing = text;
    missing.replace(pos, 6, ",kost,");
    std::istringstream in(missing);
    try {
        read_raw_csv(in);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("'cost'") != std::string::npos);
    }

    std::string bad = text;
    bad.insert(bad.rfind('\n', bad.size() - 2) + 1, "3,x,0.5,8,2,0,0,1,1,1,1,1,1,1,1,1,1,1,0\n");
    std::istringstream in2(bad);
    CHECK_THROWS_AS(read_raw_csv(in2), FormatError);
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.0, 1.0, -30.0, 0.1, 1.0 / 3.0, 1e-300, 123456.789, 0.99978126047})
        CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(-5) == "-5");
}

TEST_CASE("timeouts are flagged and excluded") {
    ExperimentConfig c = small_config();
    c.max_updates = 3;
    c.group_sizes = {3};
    c.alphas = {0};
    c.landscapes = 1;
    c.runs = 40;
    const ResultTable t = run_experiment(c);
    std::size_t flagged = 0;
    for (const RawRow& r : t.rows) {
        if (r.timed_out) {
            ++flagged;
            CHECK(r.winner_id == -1);
        }
    }
    REQUIRE(flagged > 0);
    CHECK(t.cells[0].aggregate.timeouts == flagged);
    CHECK(t.cells[0].aggregate.runs_used + flagged == 40);
}

TEST_CASE("worker count does not change the output") {
    ExperimentConfig c = small_config();
    c.workers = 1;
    c.output_dir = scratch("w1");
    run_experiment(c, false);
    c.workers = 8;
    c.output_dir = scratch("w8");
    run_experiment(c, false);
    for (const char* f : {"raw.csv", "aggregate.csv", "histogram.csv"})
        CHECK(slurp(fs::path(NKPOLICY_TEST_TMPDIR) / "w1" / f) == slurp(fs::path(NKPOLICY_TEST_TMPDIR) / "w8" / f));
    CHECK_FALSE(fs::exists(fs::path(NKPOLICY_TEST_TMPDIR) / "w1" / "INCOMPLETE"));

    const fs::path re = scratch("re");
    analyze_raw_file(fs::path(NKPOLICY_TEST_TMPDIR) / "w1" / "raw.csv", re);
    CHECK(slurp(re / "aggregate.csv") == slurp(fs::path(NKPOLICY_TEST_TMPDIR) / "w1" / "aggregate.csv"));
    CHECK(slurp(re / "histogram.csv") == slurp(fs::path(NKPOLICY_TEST_TMPDIR) / "w1" / "histogram.csv"));

    const ExperimentConfig saved = load_config(fs::path(NKPOLICY_TEST_TMPDIR) / "w8" / "config.cfg");
    CHECK(saved.master_seed == 42);
    CHECK(saved.group_sizes == c.group_sizes);
}

TEST_CASE("ensemble file drives the sweep") {
    const fs::path dir = scratch("ens");
    generate_ensemble(3, 8, 2, 5, dir / "e.nkl");
    ExperimentConfig c = small_config();
    c.ensemble_path = dir / "e.nkl";
    c.runs = 4;
    const ResultTable t = run_experiment(c);
    std::size_t max_id = 0;
    for (const RawRow& r : t.rows) max_id = std::max(max_id, r.landscape_id);
    CHECK(max_id == 2);
    CHECK(t.rows.size() == 2 * 3 * 3 * 4);
}
