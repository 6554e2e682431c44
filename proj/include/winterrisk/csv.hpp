#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace winterrisk::csv {

/// A parsed comma-separated table with a header row. Fields are trimmed;
/// quoting is not supported. Blank lines and lines starting with '#' are
/// skipped. Errors carry the source name and 1-based line number.
class Table {
public:
    struct Row {
        std::size_t line = 0;
        std::vector<std::string> fields;
    };

    static Table read(const std::filesystem::path& path);
    static Table parse(std::istream& in, std::string source);

    const std::string& source() const { return source_; }
    const std::vector<std::string>& header() const { return header_; }
    const std::vector<Row>& rows() const { return rows_; }
    bool empty() const { return rows_.empty(); }

    /// Index of a required column; throws InputError naming the column.
    std::size_t column(std::string_view name) const;
    bool has_column(std::string_view name) const;

    double number(const Row& row, std::size_t col) const;
    const std::string& text(const Row& row, std::size_t col) const;

    /// Error message prefix "<source>:<line>: ".
    std::string where(const Row& row) const;

private:
    std::string source_;
    std::vector<std::string> header_;
    std::vector<Row> rows_;
};

/// Fixed-precision formatting shared by every CSV writer, so repeated runs
/// produce identical bytes.
std::string num(double v, int decimals = 6);

/// Writes a file atomically enough for our purposes: whole content at once.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace winterrisk::csv
