#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "synclab/mat.hpp"

namespace synclab {

// Shortest decimal string that round-trips the double exactly.
std::string format_double(double v);

// Parse with full precision; throws config_error on trailing garbage.
double parse_double(const std::string& s);

// Write content to path atomically: temp file in the same directory, fsync'd
// stream, then rename.  Partial files never become visible.
void atomic_write(const std::filesystem::path& path, const std::string& content);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<Vec> rows;

    std::size_t column_index(const std::string& name) const;  // throws config_error
};

std::string to_csv(const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace synclab
