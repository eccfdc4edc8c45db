#include "nkpolicy/experiment.hpp"

#include <charconv>
#include <cstdlib>
#include <fmt/format.h>
#include <fstream>
#include <sstream>
#include <thread>

#include "nkpolicy/errors.hpp"
#include "nkpolicy/parallel.hpp"
#include "nkpolicy/table_io.hpp"

namespace nkpolicy {

namespace {

constexpr std::uint64_t kRunSeedTag = 0x52554e53ULL;  // "RUNS"

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
    text = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError(fmt::format("invalid value '{}' for key '{}'", text, key));
    }
    return value;
}

template <class T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
    std::vector<T> out;
    while (true) {
        const auto comma = text.find(',');
        out.push_back(parse_number<T>(key, text.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

void set_key(ExperimentConfig& c, std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "ensemble") {
        if (value.empty()) throw ConfigError("empty value for key 'ensemble'");
        c.ensemble_path = std::filesystem::path(std::string(value));
    } else if (key == "N") {
        c.n = parse_number<int>(key, value);
    } else if (key == "K") {
        c.k = parse_number<int>(key, value);
    } else if (key == "landscapes") {
        c.landscapes = parse_number<int>(key, value);
    } else if (key == "landscape_seed") {
        c.landscape_seed = parse_number<Seed>(key, value);
    } else if (key == "M") {
        c.group_sizes = parse_list<int>(key, value);
    } else if (key == "alpha") {
        c.alphas = parse_list<double>(key, value);
    } else if (key == "p") {
        c.imitation_prob = parse_number<double>(key, value);
    } else if (key == "rho") {
        c.density = parse_number<double>(key, value);
    } else if (key == "runs") {
        c.runs = parse_number<int>(key, value);
    } else if (key == "seed") {
        c.master_seed = parse_number<Seed>(key, value);
    } else if (key == "max_updates") {
        c.max_updates = parse_number<std::uint64_t>(key, value);
    } else if (key == "workers") {
        c.workers = parse_number<int>(key, value);
    } else if (key == "out") {
        c.output_dir = std::filesystem::path(std::string(value));
    } else {
        throw ConfigError(fmt::format("unknown config key '{}'", key));
    }
}

template <class T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        if constexpr (std::is_floating_point_v<T>) {
            out += format_double(values[i]);
        } else {
            out += std::to_string(values[i]);
        }
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    out << content;
    out.flush();
    if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace

int default_worker_count() {
    if (const char* env = std::getenv("NKPOLICY_WORKERS")) {
        int value = 0;
        const std::string_view s(env);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec == std::errc{} && ptr == s.data() + s.size() && value > 0) return value;
    }
    return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig c;
    int line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(fmt::format("line {}: expected 'key = value', got '{}'", line_no, line));
        }
        try {
            set_key(c, trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("line {}: {}", line_no, e.what()));
        }
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

void apply_override(ExperimentConfig& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError(fmt::format("override '{}' is not of the form key=value", assignment));
    }
    set_key(config, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void validate(const ExperimentConfig& c) {
    if (c.group_sizes.empty()) throw ConfigError("M sweep list is empty");
    if (c.alphas.empty()) throw ConfigError("alpha sweep list is empty");
    if (c.runs < 1) throw ConfigError(fmt::format("runs must be >= 1, got {}", c.runs));
    for (int m : c.group_sizes) {
        if (m < 1) throw ConfigError(fmt::format("group size must be >= 1, got {}", m));
    }
    for (double a : c.alphas) {
        if (!std::isfinite(a)) throw ConfigError("alpha values must be finite");
    }
    if (!(c.imitation_prob >= 0.0 && c.imitation_prob <= 1.0)) {
        throw ConfigError(fmt::format("p must be in [0, 1], got {}", c.imitation_prob));
    }
    if (!(c.density > 0.0)) throw ConfigError(fmt::format("rho must be positive, got {}", c.density));
    if (c.workers < 0) throw ConfigError("workers must be >= 0");
    if (!c.ensemble_path) {
        if (c.n < 1 || c.n > kMaxExhaustiveLength) {
            throw ConfigError(fmt::format("N must be in [1, {}], got {}", kMaxExhaustiveLength, c.n));
        }
        if (c.k < 0 || c.k >= c.n) throw ConfigError(fmt::format("K must be in [0, N-1], got {}", c.k));
        if (c.landscape_count() < 1) throw ConfigError("landscapes must be >= 1");
    }
}

std::string config_to_text(const ExperimentConfig& c) {
    std::string out;
    if (c.ensemble_path) out += fmt::format("ensemble = {}\n", c.ensemble_path->string());
    out += fmt::format("N = {}\nK = {}\nlandscapes = {}\nlandscape_seed = {}\n", c.n, c.k, c.landscape_count(),
                       c.landscape_seed);
    out += fmt::format("M = {}\nalpha = {}\n", join(c.group_sizes), join(c.alphas));
    out += fmt::format("p = {}\nrho = {}\nruns = {}\nseed = {}\nmax_updates = {}\nworkers = {}\n",
                       format_double(c.imitation_prob), format_double(c.density), c.runs, c.master_seed,
                       c.max_updates, c.workers);
    if (!c.output_dir.empty()) out += fmt::format("out = {}\n", c.output_dir.string());
    return out;
}

void apply_paper_scale(ExperimentConfig& config) {
    config.runs = 10000;
    if (config.k > 0 && !config.ensemble_path) config.landscapes = 30;
}

Seed run_seed(Seed master_seed, std::size_t landscape_id, int group_size, std::size_t run_id) noexcept {
    return derive_seed(master_seed, {kRunSeedTag, static_cast<std::uint64_t>(landscape_id),
                                     static_cast<std::uint64_t>(group_size), static_cast<std::uint64_t>(run_id)});
}

RawRow make_raw_row(const SearchResult& result, const SearchParams& params, int n, int k, std::size_t landscape_id,
                    std::size_t run_id) {
    const RunSummary s = summarize(result);
    RawRow row;
    row.group_size = params.group_size;
    row.alpha = params.alpha;
    row.imitation_prob = params.imitation_prob;
    row.n = n;
    row.k = k;
    row.landscape_id = landscape_id;
    row.run_id = run_id;
    row.seed = params.seed;
    row.t_star = result.t_star;
    row.cost = result.cost;
    row.updates = result.updates;
    row.winner_id = result.winner ? static_cast<long long>(*result.winner) : -1;
    row.phi_w0 = s.phi_w0;
    row.phi_bar0 = s.phi_bar0;
    row.omega_winner = s.omega_winner;
    row.omega_random = s.omega_random;
    row.n_c = s.n_c;
    row.g_c = s.g_c;
    row.timed_out = s.timed_out;
    return row;
}

RunSummary to_summary(const RawRow& row) {
    return {row.cost, row.phi_w0, row.phi_bar0, row.omega_winner, row.omega_random, row.n_c, row.g_c, row.timed_out};
}

std::vector<CellAggregate> aggregate_rows(std::span<const RawRow> rows) {
    std::vector<CellAggregate> cells;
    std::vector<std::vector<RunSummary>> groups;
    for (const RawRow& row : rows) {
        std::size_t idx = 0;
        while (idx < cells.size() && !(cells[idx].group_size == row.group_size && cells[idx].alpha == row.alpha)) ++idx;
        if (idx == cells.size()) {
            cells.push_back({row.group_size, row.alpha, {}});
            groups.emplace_back();
        }
        groups[idx].push_back(to_summary(row));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        cells[i].aggregate = aggregate_runs(groups[i], cells[i].group_size);
    }
    return cells;
}

LandscapeEnsemble resolve_landscapes(const ExperimentConfig& config) {
    if (config.ensemble_path) return load_ensemble(*config.ensemble_path);
    return make_ensemble(config.landscape_count(), config.n, config.k, config.landscape_seed);
}

ResultTable run_experiment(const ExperimentConfig& config, bool keep_rows) {
    validate(config);
    const LandscapeEnsemble ensemble = resolve_landscapes(config);
    std::vector<SearchContext> contexts;
    contexts.reserve(ensemble.landscapes.size());
    for (const NKLandscape& l : ensemble.landscapes) contexts.emplace_back(l);

    const std::size_t runs = static_cast<std::size_t>(config.runs);
    const std::size_t landscapes = contexts.size();
    const int workers = config.workers > 0 ? config.workers : default_worker_count();

    const bool writing = !config.output_dir.empty();
    const auto& dir = config.output_dir;
    std::ofstream raw;
    if (writing) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
        write_file(dir / "INCOMPLETE", "output incomplete: run did not finish writing\n");
        write_file(dir / "config.cfg", config_to_text(config));
        raw.open(dir / "raw.csv", std::ios::binary | std::ios::trunc);
        if (!raw) throw IoError(fmt::format("cannot open '{}' for writing", (dir / "raw.csv").string()));
        write_raw_csv(raw, {});
    }

    ResultTable table;
    for (int group_size : config.group_sizes) {
        for (double alpha : config.alphas) {
            std::vector<RawRow> rows = parallel_map(landscapes * runs, workers, [&](std::size_t unit) {
                const std::size_t landscape = unit / runs;
                const std::size_t run = unit % runs;
                SearchParams params;
                params.group_size = group_size;
                params.alpha = alpha;
                params.imitation_prob = config.imitation_prob;
                params.density = config.density;
                params.max_updates = config.max_updates;
                params.seed = run_seed(config.master_seed, landscape, group_size, run);
                const SearchResult result = run_search(contexts[landscape], params);
                return make_raw_row(result, params, ensemble.n, ensemble.k, landscape, run);
            });
            std::vector<CellAggregate> cell = aggregate_rows(rows);
            table.cells.push_back(std::move(cell.front()));
            if (writing) {
                write_raw_rows(raw, rows);
                if (!raw) throw IoError(fmt::format("failed writing '{}'", (dir / "raw.csv").string()));
            }
            if (keep_rows) table.rows.insert(table.rows.end(), rows.begin(), rows.end());
        }
    }

    if (writing) {
        raw.flush();
        if (!raw) throw IoError(fmt::format("failed writing '{}'", (dir / "raw.csv").string()));
        raw.close();
        std::ostringstream agg, hist;
        write_aggregate_csv(agg, table.cells);
        write_histogram_csv(hist, table.cells);
        write_file(dir / "aggregate.csv", agg.str());
        write_file(dir / "histogram.csv", hist.str());
        std::error_code ec;
        std::filesystem::remove(dir / "INCOMPLETE", ec);
    }
    return table;
}

std::vector<CellAggregate> analyze_raw_file(const std::filesystem::path& raw_csv, const std::filesystem::path& dir) {
    std::ifstream in(raw_csv, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open raw table '{}'", raw_csv.string()));
    const std::vector<RawRow> rows = read_raw_csv(in);
    if (rows.empty()) throw FormatError(fmt::format("raw table '{}' has no rows", raw_csv.string()));
    std::vector<CellAggregate> cells = aggregate_rows(rows);

    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
    std::ostringstream agg, hist;
    write_aggregate_csv(agg, cells);
    write_histogram_csv(hist, cells);
    write_file(dir / "aggregate.csv", agg.str());
    write_file(dir / "histogram.csv", hist.str());
    return cells;
}

}  // namespace nkpolicy
