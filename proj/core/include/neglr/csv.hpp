#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace neglr {

/// Header plus rows of raw cells. Every row has as many cells as the header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;  ///< throws ParseError when absent
    std::vector<double> numeric_column(std::size_t index) const;
    std::vector<double> numeric_column(std::string_view name) const {
        return numeric_column(column(name));
    }
};

/// Shortest text with 17 significant digits; parses back to the same double.
std::string format_double(double value);
std::string format_int(std::int64_t value);

/// Parses a cell as a double. Throws ParseError on anything else.
double parse_double(std::string_view cell);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    /// Throws ShapeError when the cell count differs from the header.
    void add_row(std::vector<std::string> cells);
    std::size_t row_count() const { return rows_; }
    const std::string& str() const { return text_; }

private:
    void append_line(const std::vector<std::string>& cells);

    std::size_t columns_;
    std::size_t rows_ = 0;
    std::string text_;
};

/// Quoted fields may contain commas, quotes ("") and newlines. Accepts LF or
/// CRLF line endings. Empty input, ragged rows and unterminated quotes raise
/// ParseError.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary and renames over `path`.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace neglr
