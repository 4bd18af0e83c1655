#pragma once

#include <string>
#include <variant>
#include <vector>

namespace rfdop::csv {

using Cell = std::variant<double, long long, std::string>;

// Comment lines (emitted with a leading "# "), a snake_case header row and
// data rows. Doubles are printed with 12 significant digits.
struct Table {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
    std::size_t column(const std::string& name) const;  // throws std::out_of_range
    double number(std::size_t row, const std::string& name) const;
    std::string to_string() const;
};

std::string format_double(double v);

}  // namespace rfdop::csv
