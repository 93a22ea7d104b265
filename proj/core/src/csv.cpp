#include "dblab/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dblab/common.hpp"

namespace dblab {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) x = 0.0;  // drop the sign of negative zero
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9e", x);
    return buf;
}

std::string format_cell(const Cell& c) {
    struct V {
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(double d) const { return format_double(d); }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
    };
    return std::visit(V{}, c);
}

std::string csv_quote(const std::string& f) {
    if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
    std::string out = "\"";
    for (char ch : f) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) throw InputError("report row width does not match the header");
    rows_.push_back(std::move(row));
}

void Table::sort_by_key(std::size_t key_columns) {
    const std::size_t k = std::min(key_columns, columns_.size());
    std::stable_sort(rows_.begin(), rows_.end(), [k](const auto& a, const auto& b) {
        for (std::size_t i = 0; i < k; ++i) {
            // Integers compare numerically so that N = 64 sorts before N = 128.
            if (std::holds_alternative<std::int64_t>(a[i]) && std::holds_alternative<std::int64_t>(b[i])) {
                const auto x = std::get<std::int64_t>(a[i]), y = std::get<std::int64_t>(b[i]);
                if (x != y) return x < y;
                continue;
            }
            const std::string x = format_cell(a[i]), y = format_cell(b[i]);
            if (x != y) return x < y;
        }
        return false;
    });
}

void Table::write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << csv_quote(columns_[i]);
    os << "\r\n";
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_quote(format_cell(r[i]));
        os << "\r\n";
    }
}

nlohmann::ordered_json Table::to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows_) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < r.size(); ++i) {
            const Cell& c = r[i];
            if (std::holds_alternative<double>(c)) {
                const double d = std::get<double>(c);
                // Round-trip through the fixed text format so JSON and CSV agree.
                if (std::isfinite(d))
                    obj[columns_[i]] = std::stod(format_double(d));
                else
                    obj[columns_[i]] = format_double(d);
            } else if (std::holds_alternative<std::int64_t>(c)) {
                obj[columns_[i]] = std::get<std::int64_t>(c);
            } else if (std::holds_alternative<bool>(c)) {
                obj[columns_[i]] = std::get<bool>(c);
            } else {
                obj[columns_[i]] = std::get<std::string>(c);
            }
        }
        arr.push_back(std::move(obj));
    }
    return arr;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    std::vector<std::string> rec;
    std::string field;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
            continue;
        }
        if (ch == '"') {
            quoted = true;
            any = true;
        } else if (ch == ',') {
            rec.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (ch == '\r' || ch == '\n') {
            if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                rec.push_back(std::move(field));
                out.push_back(std::move(rec));
            }
            rec.clear();
            field.clear();
            any = false;
        } else {
            field += ch;
            any = true;
        }
    }
    if (quoted) throw InputError("csv: unterminated quoted field");
    if (any || !field.empty()) {
        rec.push_back(std::move(field));
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace dblab
