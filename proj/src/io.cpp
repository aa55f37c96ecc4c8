#include "synclab/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "synclab/errors.hpp"

namespace synclab {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e)
        throw config_error("not a number: '" + s + "'");
    return v;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    fs::create_directories(dir);
    const fs::path tmp = dir / (path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw error("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw error("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw config_error("no such column: '" + name + "'");
}

std::string to_csv(const CsvTable& table) {
    std::ostringstream out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out << ',';
        out << table.columns[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw error("csv row width mismatch");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_double(row[i]);
        }
        out << '\n';
    }
    return out.str();
}

static std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') { out.push_back(cur); cur.clear(); }
        else if (c != '\r') cur.push_back(c);
    }
    out.push_back(cur);
    return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw config_error("empty csv: " + path.string());
    t.columns = split_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != t.columns.size())
            throw config_error("csv row width mismatch in " + path.string());
        Vec row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) row[i] = parse_double(cells[i]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace synclab
