#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace winterrisk::kv {

using Tree = boost::property_tree::ptree;

/// Reads an INI-style key = value file (optional [sections]).
/// Throws InputError with the parser's line number.
Tree read(const std::filesystem::path& path);

/// Writes keys in the given order, one `key = value` per line.
void write(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& entries,
           const std::string& comment = {});

double number(const Tree& t, const std::string& key, const std::string& source);
double number_or(const Tree& t, const std::string& key, double fallback, const std::string& source);
std::string text(const Tree& t, const std::string& key, const std::string& source);

/// Round-trippable representation of a double.
std::string exact(double v);

}  // namespace winterrisk::kv
