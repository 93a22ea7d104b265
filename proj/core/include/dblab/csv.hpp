#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace dblab {

using Cell = std::variant<std::string, double, std::int64_t, bool>;

// Fixed-format rendering shared by CSV and JSON emission: doubles use
// "%.9e", non-finite values render as "inf", "-inf" or "nan".
std::string format_cell(const Cell& c);
std::string format_double(double x);

// RFC 4180 field quoting.
std::string csv_quote(const std::string& field);

// Rectangular report with named columns.
class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }
    void add_row(std::vector<Cell> row);
    // Stable sort by the rendered values of the first `key_columns` columns.
    void sort_by_key(std::size_t key_columns);

    // Header row plus one record per row, CRLF line endings.
    void write_csv(std::ostream& os) const;
    // Array of objects with keys in column order; doubles as formatted numbers.
    nlohmann::ordered_json to_json() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

// Parses RFC 4180 text into records (used for round-trip checks and reading
// matrix files).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace dblab
