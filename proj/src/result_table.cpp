#include "rqkd/result_table.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rqkd::io {

void ResultTable::add_row(std::vector<Cell> row)
{
    if (row.size() != columns.size())
        throw std::invalid_argument("ResultTable: row width does not match the header");
    for (const Cell& c : row)
        if (c && std::isnan(*c))
            throw std::invalid_argument("ResultTable: NaN cell");
    rows.push_back(std::move(row));
}

std::size_t ResultTable::column_index(std::string_view name) const
{
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name)
            return i;
    throw std::out_of_range("ResultTable: no column '" + std::string(name) + "'");
}

Cell ResultTable::at(std::size_t row, std::string_view column) const
{
    return rows.at(row).at(column_index(column));
}

std::optional<Format> parse_format(std::string_view text)
{
    if (text == "csv") return Format::csv;
    if (text == "tsv") return Format::tsv;
    return std::nullopt;
}

std::string format_number(double value)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific);
    return std::string(buf, res.ptr);
}

void emit(const ResultTable& table, Format format, std::ostream& out)
{
    const char sep = format == Format::csv ? ',' : '\t';
    for (const auto& [key, value] : table.metadata)
        out << "# " << key << ": " << value << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out << (i ? std::string(1, sep) : std::string()) << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out << sep;
            if (row[i])
                out << format_number(*row[i]);
        }
        out << '\n';
    }
    if (!out)
        throw std::ios_base::failure("emit: write failed");
}

std::string emit_to_string(const ResultTable& table, Format format)
{
    std::ostringstream s;
    emit(table, format, s);
    return s.str();
}

namespace {

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

ResultTable parse_table(std::istream& in, Format format)
{
    const char sep = format == Format::csv ? ',' : '\t';
    ResultTable t;
    std::string line;
    bool have_header = false;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!have_header && line.rfind("# ", 0) == 0) {
            const auto colon = line.find(": ", 2);
            if (colon == std::string::npos)
                throw std::runtime_error("parse_table: line " + std::to_string(line_no) +
                                         ": metadata without ': '");
            t.metadata.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
            continue;
        }
        if (!have_header) {
            t.columns = split(line, sep);
            have_header = true;
            continue;
        }
        const auto fields = split(line, sep);
        if (fields.size() != t.columns.size())
            throw std::runtime_error("parse_table: line " + std::to_string(line_no) +
                                     ": wrong number of fields");
        std::vector<Cell> row;
        row.reserve(fields.size());
        for (const auto& f : fields) {
            if (f.empty()) {
                row.emplace_back();
                continue;
            }
            double v = 0.0;
            const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (res.ec != std::errc() || res.ptr != f.data() + f.size())
                throw std::runtime_error("parse_table: line " + std::to_string(line_no) +
                                         ": bad number '" + f + "'");
            row.emplace_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (!have_header)
        throw std::runtime_error("parse_table: missing header row");
    return t;
}

}  // namespace rqkd::io
