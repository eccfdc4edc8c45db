#include "nkpolicy/table_io.hpp"

#include <charconv>
#include <fmt/format.h>
#include <istream>
#include <ostream>

#include "nkpolicy/errors.hpp"

namespace nkpolicy {

const std::vector<std::string> kRawColumns = {
    "M",         "alpha",   "p",       "N",      "K",        "landscape_id", "run_id",
    "seed",      "t_star",  "cost",    "updates", "winner_id", "phi_w0",      "phi_bar0",
    "omega_winner", "omega_random", "n_c", "g_c",   "timeout_flag"};

const std::vector<std::string> kAggregateColumns = {"M",         "alpha",       "mean_cost", "stderr_cost",
                                                    "mean_edge", "stderr_edge", "mean_nc",   "mean_gc",
                                                    "runs_used", "timeouts"};

const std::vector<std::string> kHistogramColumns = {"M", "alpha", "omega", "prob", "which"};

namespace {

void write_header(std::ostream& out, std::string_view kind, const std::vector<std::string>& columns) {
    out << "# nkpolicy-" << kind << " v" << kTableFormatVersion << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n';
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = line.find(',');
        out.push_back(line.substr(0, comma));
        if (comma == std::string_view::npos) return out;
        line.remove_prefix(comma + 1);
    }
}

template <class T>
T parse_field(std::string_view text, std::string_view column, std::size_t line_no) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw FormatError(fmt::format("line {}: bad value '{}' in column '{}'", line_no, text, column));
    }
    return value;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

void write_raw_rows(std::ostream& out, std::span<const RawRow> rows) {
    for (const RawRow& r : rows) {
        out << r.group_size << ',' << format_double(r.alpha) << ',' << format_double(r.imitation_prob) << ',' << r.n
            << ',' << r.k << ',' << r.landscape_id << ',' << r.run_id << ',' << r.seed << ','
            << format_double(r.t_star) << ',' << format_double(r.cost) << ',' << r.updates << ',' << r.winner_id
            << ',' << format_double(r.phi_w0) << ',' << format_double(r.phi_bar0) << ',' << r.omega_winner << ','
            << r.omega_random << ',' << format_double(r.n_c) << ',' << format_double(r.g_c) << ','
            << (r.timed_out ? 1 : 0) << '\n';
    }
}

void write_raw_csv(std::ostream& out, std::span<const RawRow> rows) {
    write_header(out, "raw", kRawColumns);
    write_raw_rows(out, rows);
}

void write_aggregate_csv(std::ostream& out, std::span<const CellAggregate> cells) {
    write_header(out, "aggregate", kAggregateColumns);
    for (const CellAggregate& c : cells) {
        const RunAggregate& a = c.aggregate;
        out << c.group_size << ',' << format_double(c.alpha) << ',' << format_double(a.mean_cost) << ','
            << format_double(a.stderr_cost) << ',' << format_double(a.mean_edge) << ','
            << format_double(a.stderr_edge) << ',' << format_double(a.mean_nc) << ',' << format_double(a.mean_gc)
            << ',' << a.runs_used << ',' << a.timeouts << '\n';
    }
}

void write_histogram_csv(std::ostream& out, std::span<const CellAggregate> cells) {
    write_header(out, "histogram", kHistogramColumns);
    for (const CellAggregate& c : cells) {
        const auto emit = [&](const std::vector<double>& hist, std::string_view which) {
            for (std::size_t omega = 0; omega < hist.size(); ++omega) {
                out << c.group_size << ',' << format_double(c.alpha) << ',' << omega << ','
                    << format_double(hist[omega]) << ',' << which << '\n';
            }
        };
        emit(c.aggregate.omega_winner_hist, "winner");
        emit(c.aggregate.omega_random_hist, "random");
    }
}

std::vector<RawRow> read_raw_csv(std::istream& in) {
    std::string line;
    const std::string expected_tag = fmt::format("# nkpolicy-raw v{}", kTableFormatVersion);
    if (!std::getline(in, line)) throw FormatError("raw table is empty (missing version line)");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected_tag) {
        throw FormatError(fmt::format("raw table version line is '{}', expected '{}'", line, expected_tag));
    }
    if (!std::getline(in, line)) throw FormatError("raw table is missing its column header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string_view> header = split(line);

    std::vector<std::size_t> where(kRawColumns.size());
    for (std::size_t c = 0; c < kRawColumns.size(); ++c) {
        std::size_t i = 0;
        while (i < header.size() && header[i] != kRawColumns[c]) ++i;
        if (i == header.size()) throw FormatError(fmt::format("raw table is missing column '{}'", kRawColumns[c]));
        where[c] = i;
    }

    std::vector<RawRow> rows;
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string_view> f = split(line);
        if (f.size() != header.size()) {
            throw FormatError(fmt::format("line {}: expected {} fields, got {}", line_no, header.size(), f.size()));
        }
        const auto get = [&](std::size_t c) { return f[where[c]]; };
        const auto num = [&]<class T>(std::size_t c, T) { return parse_field<T>(get(c), kRawColumns[c], line_no); };
        RawRow r;
        r.group_size = num(0, int{});
        r.alpha = num(1, double{});
        r.imitation_prob = num(2, double{});
        r.n = num(3, int{});
        r.k = num(4, int{});
        r.landscape_id = num(5, std::size_t{});
        r.run_id = num(6, std::size_t{});
        r.seed = num(7, Seed{});
        r.t_star = num(8, double{});
        r.cost = num(9, double{});
        r.updates = num(10, std::uint64_t{});
        r.winner_id = num(11, 0LL);
        r.phi_w0 = num(12, double{});
        r.phi_bar0 = num(13, double{});
        r.omega_winner = num(14, std::size_t{});
        r.omega_random = num(15, std::size_t{});
        r.n_c = num(16, double{});
        r.g_c = num(17, double{});
        const int flag = num(18, int{});
        if (flag != 0 && flag != 1) {
            throw FormatError(fmt::format("line {}: timeout_flag must be 0 or 1, got {}", line_no, flag));
        }
        r.timed_out = flag == 1;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace nkpolicy
