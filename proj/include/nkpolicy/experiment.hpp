#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nkpolicy/analysis.hpp"
#include "nkpolicy/ensemble.hpp"
#include "nkpolicy/rng.hpp"

namespace nkpolicy {

/// A sweep over group sizes and policy strengths on a set of landscapes.
///
/// Config files are flat `key = value` lines; `#` starts a comment. Keys:
///   ensemble        path of an ensemble file (overrides N, K, landscapes, landscape_seed)
///   N, K            landscape parameters when generating (default 12, 0)
///   landscapes      number of generated landscapes (default 1 for K = 0, 10 otherwise)
///   landscape_seed  master seed of the generated ensemble (default 1)
///   M               comma-separated group sizes
///   alpha           comma-separated policy strengths
///   p               imitation probability (default 0.5)
///   rho             density (default 1)
///   runs            runs per (M, alpha, landscape) cell (default 500)
///   seed            master seed for run streams (default 1)
///   max_updates     per-run update cap, 0 = 10^4 * 2^N (default 0)
///   workers         thread count, 0 = NKPOLICY_WORKERS or hardware (default 0)
///   out             output directory
struct ExperimentConfig {
    std::optional<std::filesystem::path> ensemble_path;
    int n = 12;
    int k = 0;
    std::optional<int> landscapes;
    Seed landscape_seed = 1;
    std::vector<int> group_sizes = {3, 5, 8, 13, 20, 26, 32, 50, 80, 130, 200, 300};
    std::vector<double> alphas = {-30, -5, 0, 5, 30};
    double imitation_prob = 0.5;
    double density = 1.0;
    int runs = 500;
    Seed master_seed = 1;
    std::uint64_t max_updates = 0;
    int workers = 0;
    std::filesystem::path output_dir;

    int landscape_count() const { return landscapes.value_or(k == 0 ? 1 : 10); }
};

/// Thrown for malformed configuration text or overrides.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

ExperimentConfig parse_config(std::string_view text);
/// Throws ConfigError if the file is missing or malformed.
ExperimentConfig load_config(const std::filesystem::path& path);
/// Applies one `key=value` override.
void apply_override(ExperimentConfig& config, std::string_view assignment);
void validate(const ExperimentConfig& config);
/// Canonical text with every key, defaults included; parse_config round-trips it.
std::string config_to_text(const ExperimentConfig& config);
/// 10^4 runs per cell and, for K > 0, 30 landscapes.
void apply_paper_scale(ExperimentConfig& config);

/// Seed of run `run_id` for group size M on landscape `landscape_id`.
/// Alpha is deliberately not a key, so every policy sees the same initial groups.
Seed run_seed(Seed master_seed, std::size_t landscape_id, int group_size, std::size_t run_id) noexcept;

struct RawRow {
    int group_size = 0;
    double alpha = 0.0;
    double imitation_prob = 0.0;
    int n = 0;
    int k = 0;
    std::size_t landscape_id = 0;
    std::size_t run_id = 0;
    Seed seed = 0;
    double t_star = 0.0;
    double cost = 0.0;
    std::uint64_t updates = 0;
    long long winner_id = -1;
    double phi_w0 = 0.0;
    double phi_bar0 = 0.0;
    std::size_t omega_winner = 0;
    std::size_t omega_random = 0;
    double n_c = 0.0;
    double g_c = 0.0;
    bool timed_out = false;

    friend bool operator==(const RawRow&, const RawRow&) = default;
};

RawRow make_raw_row(const SearchResult& result, const SearchParams& params, int n, int k, std::size_t landscape_id,
                    std::size_t run_id);
RunSummary to_summary(const RawRow& row);

struct CellAggregate {
    int group_size = 0;
    double alpha = 0.0;
    RunAggregate aggregate;
};

struct ResultTable {
    std::vector<RawRow> rows;
    std::vector<CellAggregate> cells;
};

/// Groups rows by (M, alpha) in order of first appearance and aggregates
/// each group, pooling landscapes.
std::vector<CellAggregate> aggregate_rows(std::span<const RawRow> rows);

LandscapeEnsemble resolve_landscapes(const ExperimentConfig& config);

/// Executes every (M, alpha, landscape, run) unit, one (M, alpha) cell at a
/// time in config order. When config.output_dir is set, writes config.cfg,
/// raw.csv (streamed cell by cell), aggregate.csv and histogram.csv there. An
/// INCOMPLETE marker file exists in the directory until all outputs are
/// written, so an I/O failure leaves it behind. With keep_rows = false the
/// returned table holds only the aggregates.
ResultTable run_experiment(const ExperimentConfig& config, bool keep_rows = true);

/// Re-aggregates a raw table file into aggregate.csv and histogram.csv under `dir`.
std::vector<CellAggregate> analyze_raw_file(const std::filesystem::path& raw_csv, const std::filesystem::path& dir);

}  // namespace nkpolicy
