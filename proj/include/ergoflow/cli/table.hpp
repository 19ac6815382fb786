#pragma once

#include "ergoflow/cli/scenario_file.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace ergoflow::cli {

/// Empty, integer, real, boolean or text.
using Cell = std::variant<std::monostate, std::int64_t, double, bool, std::string>;

class Table {
public:
    explicit Table(std::vector<std::string> columns);

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }

    /// Appends a row; must have one cell per column.
    void add_row(std::vector<Cell> row);

    /// Appends a row given as (column, value) pairs; other cells stay empty.
    void add_sparse_row(const std::vector<std::pair<std::string, Cell>>& cells);

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

/// Reals use 17 significant digits; nan and inf are spelled out.
std::string format_cell(const Cell& cell);

/// RFC 4180: comma separated, CRLF-free, fields quoted when needed.
void write_csv(std::ostream& out, const Table& table);

/// One JSON object per row; empty cells and non-finite reals become null.
void write_jsonl(std::ostream& out, const Table& table);

void write_table(std::ostream& out, const Table& table, OutputFormat format);

} // namespace ergoflow::cli
