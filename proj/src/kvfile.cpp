#include "winterrisk/kvfile.hpp"

#include "winterrisk/csv.hpp"
#include "winterrisk/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <boost/property_tree/ini_parser.hpp>
#include <fmt/format.h>

namespace winterrisk::kv {

Tree read(const std::filesystem::path& path)
{
    Tree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw InputError(fmt::format("{}:{}: {}", path.string(), e.line(), e.message()));
    }
    return tree;
}

void write(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& entries,
           const std::string& comment)
{
    std::string out;
    if (!comment.empty()) out += "; " + comment + "\n";
    for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
    csv::write_file(path, out);
}

std::string text(const Tree& t, const std::string& key, const std::string& source)
{
    const auto v = t.get_optional<std::string>(key);
    if (!v) throw InputError(fmt::format("{}: missing key '{}'", source, key));
    return *v;
}

double number(const Tree& t, const std::string& key, const std::string& source)
{
    const std::string s = text(t, key, source);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        throw InputError(fmt::format("{}: key '{}' is not a finite number: '{}'", source, key, s));
    return v;
}

double number_or(const Tree& t, const std::string& key, double fallback, const std::string& source)
{
    return t.get_optional<std::string>(key) ? number(t, key, source) : fallback;
}

std::string exact(double v)
{
    return fmt::format("{:.17g}", v);
}

}  // namespace winterrisk::kv
