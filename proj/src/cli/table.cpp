#include "ergoflow/cli/table.hpp"

#include "ergoflow/errors.hpp"

#include "json.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace ergoflow::cli {

namespace {

std::string quote_csv(const std::string& field)
{
    if (field.find_first_of(",\"\r\n") == std::string::npos) {
        return field;
    }
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string format_real(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    return fmt::format("{:.17g}", value);
}

} // namespace

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(std::vector<Cell> row)
{
    if (row.size() != columns_.size()) {
        throw std::logic_error("row width does not match the table header");
    }
    rows_.push_back(std::move(row));
}

void Table::add_sparse_row(const std::vector<std::pair<std::string, Cell>>& cells)
{
    std::vector<Cell> row(columns_.size());
    for (const auto& [name, value] : cells) {
        const auto it = std::find(columns_.begin(), columns_.end(), name);
        if (it == columns_.end()) {
            throw std::logic_error("unknown column " + name);
        }
        row[static_cast<std::size_t>(it - columns_.begin())] = value;
    }
    rows_.push_back(std::move(row));
}

std::string format_cell(const Cell& cell)
{
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_real(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, cell);
}

void write_csv(std::ostream& out, const Table& table)
{
    const auto write_line = [&](const auto& fields, auto to_text) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i > 0) {
                out << ',';
            }
            out << quote_csv(to_text(fields[i]));
        }
        out << '\n';
    };
    write_line(table.columns(), [](const std::string& s) { return s; });
    for (const auto& row : table.rows()) {
        write_line(row, [](const Cell& c) { return format_cell(c); });
    }
}

void write_jsonl(std::ostream& out, const Table& table)
{
    for (const auto& row : table.rows()) {
        // Keys in column order; values formatted here so reals keep 17 digits.
        out << '{';
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) {
                out << ',';
            }
            out << nlohmann::json(table.columns()[i]).dump() << ':';
            const Cell& cell = row[i];
            if (std::holds_alternative<std::monostate>(cell)) {
                out << "null";
            } else if (const double* real = std::get_if<double>(&cell)) {
                out << (std::isfinite(*real) ? format_real(*real) : "null");
            } else if (const auto* text = std::get_if<std::string>(&cell)) {
                out << nlohmann::json(*text).dump();
            } else {
                out << format_cell(cell);
            }
        }
        out << "}\n";
    }
}

void write_table(std::ostream& out, const Table& table, OutputFormat format)
{
    if (format == OutputFormat::kCsv) {
        write_csv(out, table);
    } else {
        write_jsonl(out, table);
    }
}

} // namespace ergoflow::cli
