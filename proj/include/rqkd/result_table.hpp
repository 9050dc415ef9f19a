#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rqkd::io {

/// Empty cells mark values that do not exist (infeasible points, unbounded
/// sizes). They are written as empty fields.
using Cell = std::optional<double>;

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    /// Written as '# key: value' lines, in order.
    std::vector<std::pair<std::string, std::string>> metadata;
    /// Kept in memory only, so that emitted files are reproducible.
    double wall_time_s = 0.0;

    /// Throws std::invalid_argument on width mismatch or a NaN cell.
    void add_row(std::vector<Cell> row);
    std::size_t column_index(std::string_view name) const;
    Cell at(std::size_t row, std::string_view column) const;
};

enum class Format { csv, tsv };

std::optional<Format> parse_format(std::string_view text);

/// Shortest decimal in scientific notation that reads back to the same
/// double.
std::string format_number(double value);

void emit(const ResultTable& table, Format format, std::ostream& out);
std::string emit_to_string(const ResultTable& table, Format format);

/// Inverse of emit. Throws std::runtime_error on malformed input.
ResultTable parse_table(std::istream& in, Format format);

}  // namespace rqkd::io
