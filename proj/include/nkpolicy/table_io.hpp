#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nkpolicy/experiment.hpp"

namespace nkpolicy {

inline constexpr int kTableFormatVersion = 1;

/// Column lists of the three CSV outputs, in file order.
extern const std::vector<std::string> kRawColumns;
extern const std::vector<std::string> kAggregateColumns;
extern const std::vector<std::string> kHistogramColumns;

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Every file starts with `# nkpolicy-<kind> v<version>` and a column header line.
void write_raw_csv(std::ostream& out, std::span<const RawRow> rows);
/// Data lines only, for appending to a file started by write_raw_csv.
void write_raw_rows(std::ostream& out, std::span<const RawRow> rows);
void write_aggregate_csv(std::ostream& out, std::span<const CellAggregate> cells);
void write_histogram_csv(std::ostream& out, std::span<const CellAggregate> cells);

/// Throws FormatError naming the missing column or bad field.
std::vector<RawRow> read_raw_csv(std::istream& in);

}  // namespace nkpolicy
