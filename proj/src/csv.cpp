#include "winterrisk/csv.hpp"

#include "winterrisk/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace winterrisk::csv {

namespace {

std::string trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

}  // namespace

Table Table::read(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
    return parse(in, path.string());
}

Table Table::parse(std::istream& in, std::string source)
{
    Table t;
    t.source_ = std::move(source);
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string trimmed = trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        auto fields = split(trimmed);
        if (!have_header) {
            t.header_ = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header_.size())
            throw InputError(fmt::format("{}:{}: expected {} fields, found {}", t.source_, lineno,
                                         t.header_.size(), fields.size()));
        t.rows_.push_back(Row{lineno, std::move(fields)});
    }
    if (!have_header) throw InputError(fmt::format("{}: missing header row", t.source_));
    return t;
}

bool Table::has_column(std::string_view name) const
{
    return std::find(header_.begin(), header_.end(), name) != header_.end();
}

std::size_t Table::column(std::string_view name) const
{
    const auto it = std::find(header_.begin(), header_.end(), name);
    if (it == header_.end())
        throw InputError(fmt::format("{}:1: missing column '{}'", source_, name));
    return static_cast<std::size_t>(it - header_.begin());
}

std::string Table::where(const Row& row) const
{
    return fmt::format("{}:{}: ", source_, row.line);
}

const std::string& Table::text(const Row& row, std::size_t col) const
{
    return row.fields.at(col);
}

double Table::number(const Row& row, std::size_t col) const
{
    const std::string& s = row.fields.at(col);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        throw InputError(fmt::format("{}column '{}': not a finite number '{}'", where(row), header_[col], s));
    return v;
}

std::string num(double v, int decimals)
{
    if (v == 0.0) v = 0.0;  // no "-0.000000"
    std::string s = fmt::format("{:.{}f}", v, decimals);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

void write_file(const std::filesystem::path& path, std::string_view content)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError(fmt::format("write failed for '{}'", path.string()));
}

}  // namespace winterrisk::csv
